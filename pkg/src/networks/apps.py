from django.apps import AppConfig


class NetworksConfig(AppConfig):
    name = 'networks'
    verbose_name = 'Dual-branch fusion network and baselines'
