from rest_framework import serializers

from core.serializers import StrictSerializer
from .models import DspConfig


class DspConfigSerializer(StrictSerializer):
    sample_rate = serializers.IntegerField(default=16000, min_value=1)
    window_s = serializers.FloatField(default=0.025, min_value=0.0)
    hop_s = serializers.FloatField(default=0.010, min_value=0.0)
    n_fft = serializers.IntegerField(default=512, min_value=1)
    mel_bins = serializers.IntegerField(default=128, min_value=1)
    fmin = serializers.FloatField(default=0.0, min_value=0.0)
    fmax = serializers.FloatField(default=8000.0, min_value=0.0)
    log_floor = serializers.FloatField(default=1e-10, min_value=0.0)
    n_mfcc = serializers.IntegerField(default=60, min_value=1)
    pitch_floor = serializers.FloatField(default=60.0, min_value=1.0)
    pitch_ceiling = serializers.FloatField(default=400.0, min_value=1.0)
    voicing_threshold = serializers.FloatField(default=0.45, min_value=0.0, max_value=1.0)
    silence_threshold = serializers.FloatField(default=0.03, min_value=0.0, max_value=1.0)
    octave_cost = serializers.FloatField(default=0.01, min_value=0.0)
    max_formants = serializers.FloatField(default=5.0, min_value=1.0)
    max_formant_hz = serializers.FloatField(default=5500.0, min_value=1.0)
    formant_window_s = serializers.FloatField(default=0.025, min_value=0.0)
    pre_emphasis_from_hz = serializers.FloatField(default=50.0, min_value=0.0)
    workers = serializers.IntegerField(default=1, min_value=1)

    class Meta:
        dataclass = DspConfig

    def validate_log_floor(self, value):
        if value <= 0:
            raise serializers.ValidationError('Log floor must be greater than 0.')
        return value

    def validate(self, attrs):
        sample_rate = attrs['sample_rate']
        window = int(round(attrs['window_s'] * sample_rate))
        hop = int(round(attrs['hop_s'] * sample_rate))
        if not window > hop > 0:
            raise serializers.ValidationError({'hop_s': 'Window must be longer than hop, and hop must be positive.'})
        if attrs['n_fft'] < window:
            raise serializers.ValidationError({'n_fft': 'FFT size cannot be smaller than the window.'})
        if attrs['fmax'] > sample_rate / 2 or attrs['fmin'] >= attrs['fmax']:
            raise serializers.ValidationError({'fmax': 'Mel range must satisfy fmin < fmax <= sample_rate / 2.'})
        if attrs['pitch_floor'] >= attrs['pitch_ceiling']:
            raise serializers.ValidationError({'pitch_floor': 'Pitch floor must be below the pitch ceiling.'})
        if attrs['max_formant_hz'] > sample_rate / 2:
            raise serializers.ValidationError({'max_formant_hz': 'Formant ceiling cannot exceed sample_rate / 2.'})
        return attrs
