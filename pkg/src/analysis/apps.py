from django.apps import AppConfig


class AnalysisConfig(AppConfig):
    name = 'analysis'
    verbose_name = 'Embedding correlation, t-SNE and Shapley attribution'
