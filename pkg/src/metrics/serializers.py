from rest_framework import serializers

from core.serializers import StrictSerializer
from networks.models import ModelKind
from .models import EvalConfig


class EvalConfigSerializer(StrictSerializer):
    unit = serializers.ChoiceField(choices=['recording', 'participant'], default='recording')
    batch_size = serializers.IntegerField(default=64, min_value=1)
    models = serializers.ListField(
        child=serializers.ChoiceField(choices=[kind.value for kind in ModelKind]),
        default=[kind.value for kind in ModelKind], min_length=1,
    )

    class Meta:
        dataclass = EvalConfig

    def validate_models(self, value):
        if len(set(value)) != len(value):
            raise serializers.ValidationError('Model names must be unique.')
        return tuple(value)
