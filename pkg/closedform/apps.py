from django.apps import AppConfig


class ClosedFormConfig(AppConfig):
    name = 'closedform'
