from rest_framework import serializers

from core.serializers import StrictSerializer
from .models import PRESET_CHOICES, ModelConfig, ModelKind, NetworkSpec


class ModelConfigSerializer(StrictSerializer):
    preset = serializers.ChoiceField(choices=sorted(PRESET_CHOICES), default='full')
    d_shared = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    d_head_hidden = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)
    leaky_slope = serializers.FloatField(default=0.1, min_value=0.0)
    dropout = serializers.FloatField(default=0.3, min_value=0.0, max_value=0.99)
    bn_eps = serializers.FloatField(default=1e-5, min_value=0.0)
    bn_momentum = serializers.FloatField(default=0.1, min_value=0.0, max_value=1.0)
    init = serializers.ChoiceField(choices=['random', 'pretrained_file'], default='random')
    pretrained_mfcc_path = serializers.CharField(required=False, allow_null=True, default=None)
    pretrained_spec_path = serializers.CharField(required=False, allow_null=True, default=None)
    mlp_hidden = serializers.ListField(child=serializers.IntegerField(min_value=1), default=[256, 64], min_length=1)

    class Meta:
        dataclass = ModelConfig

    def validate_mlp_hidden(self, value):
        return tuple(value)

    def validate(self, attrs):
        if attrs['init'] == 'pretrained_file' and not (attrs['pretrained_mfcc_path'] or attrs['pretrained_spec_path']):
            raise serializers.ValidationError({'init': 'pretrained_file needs at least one pretrained_*_path.'})
        return attrs


class NetworkSpecSerializer(StrictSerializer):
    """Checkpoint sidecar section describing how to rebuild the network."""
    kind = serializers.ChoiceField(choices=[kind.value for kind in ModelKind])
    config = ModelConfigSerializer()
    tasks = serializers.ListField(child=serializers.CharField(), min_length=1)
    n_mfcc = serializers.IntegerField(min_value=1)
    mel_bins = serializers.IntegerField(min_value=1)
    feature_names = serializers.ListField(child=serializers.CharField(), default=list)
    dsp_fingerprint = serializers.CharField(allow_blank=True, default='')

    class Meta:
        dataclass = NetworkSpec

    def create(self, validated_data):
        return NetworkSpec(
            kind=ModelKind(validated_data['kind']),
            config=ModelConfig(**validated_data['config']),
            tasks=tuple(validated_data['tasks']),
            n_mfcc=validated_data['n_mfcc'],
            mel_bins=validated_data['mel_bins'],
            feature_names=tuple(validated_data['feature_names']),
            dsp_fingerprint=validated_data['dsp_fingerprint'],
        )
