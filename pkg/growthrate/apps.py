from django.apps import AppConfig


class GrowthRateConfig(AppConfig):
    name = 'growthrate'
