from django.db import models

from obfuscation_backend.fields import UInt64Field
from seq2seq_core.config import Seq2SeqConfig


class CipherRecord(models.Model):
    """A generated ciphertext with the seed and randomness index behind it.

    The plaintext is referenced by digest only, so a record may travel
    publicly next to its ciphertext.
    """

    ciphertext = models.TextField(blank=True)
    plaintext_sha256 = models.CharField(max_length=64, help_text="Hex SHA-256 of the UTF-8 plaintext")
    seed = UInt64Field()
    randomness_index = models.PositiveIntegerField(default=10)
    charset_id = models.CharField(max_length=100)
    config = models.JSONField(help_text="Seq2SeqConfig snapshot used for the draw")

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']
        verbose_name = 'Cipher Record'
        verbose_name_plural = 'Cipher Records'
        indexes = [
            models.Index(fields=['plaintext_sha256'], name='cipher_plaintext_sha_idx'),
        ]

    def __str__(self):
        return f"{self.plaintext_sha256[:12]} - seed {self.seed} - n={self.randomness_index}"

    @property
    def plaintext_digest(self):
        return bytes.fromhex(self.plaintext_sha256)

    @property
    def config_snapshot(self):
        return Seq2SeqConfig.from_dict(self.config)

    @property
    def ciphertext_len(self):
        return len(self.ciphertext)
