from django.apps import AppConfig


class RescalingConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'rescaling'
    verbose_name = 'Z-score Rescaling'
