from django.apps import AppConfig


class TrainingConfig(AppConfig):
    name = 'training'
    verbose_name = 'Weighted multi-task objective and optimisation'
