from rest_framework import serializers

from core.serializers import StrictSerializer
from .models import TrainConfig


class TrainConfigSerializer(StrictSerializer):
    lr = serializers.FloatField(default=1e-4, min_value=0.0)
    weight_decay = serializers.FloatField(default=1e-5, min_value=0.0)
    betas = serializers.ListField(
        child=serializers.FloatField(min_value=0.0, max_value=1.0), min_length=2, max_length=2, default=[0.9, 0.999],
    )
    eps = serializers.FloatField(default=1e-8, min_value=0.0)
    max_epochs = serializers.IntegerField(default=40, min_value=1)
    grad_clip_norm = serializers.FloatField(default=1.0, min_value=0.0)
    runs = serializers.IntegerField(default=5, min_value=1)
    items_per_class = serializers.IntegerField(default=6, min_value=1)
    baseline_items_per_class = serializers.IntegerField(default=54, min_value=1)
    checkpoint_selection = serializers.ChoiceField(choices=['final', 'best_validation'], default='final')
    class_weights = serializers.DictField(
        child=serializers.ListField(child=serializers.FloatField(), min_length=2, max_length=2), default=dict,
    )

    class Meta:
        dataclass = TrainConfig

    def validate_lr(self, value):
        if value <= 0:
            raise serializers.ValidationError('Learning rate must be greater than 0.')
        return value

    def validate_grad_clip_norm(self, value):
        if value <= 0:
            raise serializers.ValidationError('Gradient clip norm must be greater than 0.')
        return value

    def validate_betas(self, value):
        return tuple(value)

    def validate_class_weights(self, value):
        for task, weights in value.items():
            if min(weights) <= 0:
                raise serializers.ValidationError(f'Class weights for {task} must be positive.')
        return {task: tuple(weights) for task, weights in value.items()}
