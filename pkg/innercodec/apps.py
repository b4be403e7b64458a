from django.apps import AppConfig


class InnerCodecConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'innercodec'
    verbose_name = 'Inner Frame Codecs'
