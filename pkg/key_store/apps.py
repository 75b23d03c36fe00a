from django.apps import AppConfig


class KeyStoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'key_store'
    verbose_name = 'Key storage'
