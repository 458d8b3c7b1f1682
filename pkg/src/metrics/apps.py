from django.apps import AppConfig


class MetricsConfig(AppConfig):
    name = 'metrics'
    verbose_name = 'AUROC evaluation and reports'
