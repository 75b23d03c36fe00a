from django.apps import AppConfig


class KeygenConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'keygen'
    verbose_name = 'Key generation'
