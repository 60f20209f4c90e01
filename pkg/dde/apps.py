from django.apps import AppConfig


class DdeConfig(AppConfig):
    name = 'dde'
