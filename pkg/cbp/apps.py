"""Use 'cbp.apps.CbpConfig' in INSTALLED_APPS if the label 'cbp' is taken in the Django registry"""
from django.apps import AppConfig


class CbpConfig(AppConfig):
    name = 'cbp'
    label = 'cbp'
    verbose_name = "Competing Brownian particles"
