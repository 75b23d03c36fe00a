from django.apps import AppConfig


class Seq2SeqCoreConfig(AppConfig):
    default_auto_field = 'django.db.models.BigAutoField'
    name = 'seq2seq_core'
    verbose_name = 'Sequence-to-sequence core'
