from django.apps import AppConfig


class UltraApiConfig(AppConfig):
    name = "ultra_api"
