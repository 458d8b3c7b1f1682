from rest_framework import serializers

from core.serializers import StrictSerializer
from .models import AugmentConfig


def _probability():
    return serializers.FloatField(default=0.5, min_value=0.0, max_value=1.0)


class AugmentConfigSerializer(StrictSerializer):
    mfcc_noise_sigma = serializers.FloatField(default=0.01, min_value=0.0)
    mfcc_freq_mask_bins = serializers.IntegerField(default=8, min_value=0)
    mfcc_time_mask_frames = serializers.IntegerField(default=20, min_value=0)
    spec_freq_mask_fraction = serializers.FloatField(default=0.15, min_value=0.0, max_value=1.0)
    spec_time_mask_fraction = serializers.FloatField(default=0.15, min_value=0.0, max_value=1.0)
    noise_probability = _probability()
    mfcc_freq_mask_probability = _probability()
    mfcc_time_mask_probability = _probability()
    spec_freq_mask_probability = _probability()
    spec_time_mask_probability = _probability()
    fixed_frames = serializers.IntegerField(default=512, min_value=1)

    class Meta:
        dataclass = AugmentConfig

    def validate(self, attrs):
        if attrs['mfcc_time_mask_frames'] >= attrs['fixed_frames']:
            raise serializers.ValidationError({'mfcc_time_mask_frames': 'Time mask must be shorter than fixed_frames.'})
        for name in ('spec_freq_mask_fraction', 'spec_time_mask_fraction'):
            if attrs[name] >= 1.0:
                raise serializers.ValidationError({name: 'Mask fraction must be below 1.'})
        return attrs
