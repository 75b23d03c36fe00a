from django.core.validators import MinValueValidator
from django.db import models

from obfuscation_backend.fields import UInt64Field


class KeyGenReport(models.Model):
    """Outcome of one generate_key call, across all of its attempts"""

    plaintext_sha256 = models.CharField(max_length=64)
    seed = UInt64Field(help_text="Seed of the attempt that produced the key (or of the last attempt)")
    iterations_used = models.PositiveIntegerField(help_text="Training iterations summed over attempts")
    final_loss = models.FloatField(validators=[MinValueValidator(0)])
    wall_time_s = models.FloatField()
    attempts = models.PositiveIntegerField()
    success = models.BooleanField(default=False)

    created_at = models.DateTimeField(auto_now_add=True)

    class Meta:
        ordering = ['-created_at']
        verbose_name = 'Key Generation Report'
        verbose_name_plural = 'Key Generation Reports'

    def __str__(self):
        outcome = 'ok' if self.success else 'failed'
        return f"{self.plaintext_sha256[:12]} - {outcome} after {self.attempts} attempt(s)"
