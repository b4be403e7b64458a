from django.apps import AppConfig


class TensorsConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'tensors'
    verbose_name = 'Feature Tensors'
