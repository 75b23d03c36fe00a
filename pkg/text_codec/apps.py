from django.apps import AppConfig


class TextCodecConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'text_codec'
    verbose_name = 'Text codec'
