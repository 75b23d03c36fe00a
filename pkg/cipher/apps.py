from django.apps import AppConfig


class CipherConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'cipher'
    verbose_name = 'Ciphertext generation'
