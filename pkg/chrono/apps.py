from django.apps import AppConfig


class ChronoConfig(AppConfig):
    name = 'chrono'
