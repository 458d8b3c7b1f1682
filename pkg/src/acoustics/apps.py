from django.apps import AppConfig


class AcousticsConfig(AppConfig):
    name = 'acoustics'
    verbose_name = 'Acoustic representations and handcrafted descriptors'
