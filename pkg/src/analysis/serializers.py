from rest_framework import serializers

from core.serializers import StrictSerializer
from .models import LAYER_CHOICES, AnalysisConfig


class AnalysisConfigSerializer(StrictSerializer):
    layer = serializers.ChoiceField(choices=LAYER_CHOICES, default='head_hidden')
    top_k = serializers.IntegerField(default=5, min_value=1)
    min_common = serializers.IntegerField(default=10, min_value=3)
    tsne_tasks = serializers.ListField(child=serializers.CharField(), default=['AD/MCI', "Parkinson's"])
    tsne_perplexity = serializers.FloatField(default=30.0, min_value=1.0)
    tsne_iterations = serializers.IntegerField(default=1000, min_value=250)
    shap_max_evals = serializers.IntegerField(default=2048, min_value=16)
    shap_background = serializers.IntegerField(default=100, min_value=50, max_value=200)
    shap_instances = serializers.IntegerField(min_value=1, required=False, allow_null=True, default=None)

    class Meta:
        dataclass = AnalysisConfig

    def validate_tsne_tasks(self, value):
        return tuple(value)
