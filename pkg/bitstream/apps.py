from django.apps import AppConfig


class BitstreamConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'bitstream'
    verbose_name = 'FCMS Bitstream'
