from django.apps import AppConfig


class UltraConfig(AppConfig):
    name = "ultra"
    verbose_name = "超度量空间的 Ramsey 扩张"
