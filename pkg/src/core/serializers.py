from rest_framework import serializers


class StrictSerializer(serializers.Serializer):
    """
    Serializer for config sections and on-disk documents.

    Unknown keys are rejected instead of silently dropped, and `save()` builds
    the frozen dataclass named by `Meta.dataclass` from the validated data.
    """

    class Meta:
        dataclass = None

    def to_internal_value(self, data):
        if isinstance(data, dict):
            unknown = sorted(set(data) - set(self.fields))
            if unknown:
                raise serializers.ValidationError({key: 'Unknown key.' for key in unknown})
        return super().to_internal_value(data)

    def create(self, validated_data):
        return self.Meta.dataclass(**validated_data)

    def update(self, instance, validated_data):
        raise NotImplementedError('Config objects are immutable.')


def flatten_errors(errors, prefix=''):
    """Turn a nested DRF error dict into 'a.b: message' lines."""
    lines = []
    if isinstance(errors, dict):
        for key, value in errors.items():
            lines.extend(flatten_errors(value, f'{prefix}{key}.'))
    elif isinstance(errors, list):
        for value in errors:
            lines.extend(flatten_errors(value, prefix))
    else:
        lines.append(f'{prefix.rstrip(".")}: {errors}')
    return lines
