from rest_framework import serializers

from .models import KeyGenReport


class KeyGenReportSerializer(serializers.ModelSerializer):
    """Report printed on stdout by the keygen command"""

    seed = serializers.IntegerField()

    class Meta:
        model = KeyGenReport
        fields = ['iterations_used', 'final_loss', 'wall_time_s', 'attempts', 'success',
                  'plaintext_sha256', 'seed']
