from django.core.validators import MinValueValidator
from django.db import models

from obfuscation_backend.fields import UInt64Field


class EvalRecord(models.Model):
    """One point of the execution-cost sweep"""

    plaintext_len = models.PositiveIntegerField()
    lev_distance = models.PositiveIntegerField()
    encrypt_time_s = models.FloatField(validators=[MinValueValidator(0)])
    keygen_time_s = models.FloatField(validators=[MinValueValidator(0)])
    char_variation = models.PositiveIntegerField(help_text="Distinct characters in the ciphertext")
    ciphertext_len = models.PositiveIntegerField()
    seed = UInt64Field()

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['plaintext_len', '-created_at']
        verbose_name = 'Cost Record'
        verbose_name_plural = 'Cost Records'

    def __str__(self):
        return f"len {self.plaintext_len} - lev {self.lev_distance} - keygen {self.keygen_time_s:.3f}s"


class StealthRow(models.Model):
    """Levenshtein comparison of one corpus pair against generated ciphertexts"""

    set_id = models.CharField(max_length=100)
    benchmark_distance = models.PositiveIntegerField()
    proposed_mean_distance = models.FloatField()
    ratio = models.FloatField(null=True, blank=True, help_text="Empty when the benchmark distance is 0")
    trials = models.PositiveIntegerField()
    mean_normalized_distance = models.FloatField(help_text="Mean of lev(p, c) / max(|p|, |c|)")
    flagged = models.BooleanField(default=False)

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['set_id', '-created_at']
        verbose_name = 'Stealth Row'
        verbose_name_plural = 'Stealth Rows'

    def __str__(self):
        ratio = 'n/a' if self.ratio is None else f'{self.ratio:.4f}'
        return f"{self.set_id} - ratio {ratio}"
