from rest_framework import serializers

from .models import EvalRecord, StealthRow

COST_COLUMNS = ['plaintext_len', 'lev_distance', 'encrypt_time_s', 'keygen_time_s',
                'char_variation', 'ciphertext_len', 'seed']
STEALTH_COLUMNS = ['set_id', 'benchmark_distance', 'proposed_mean_distance', 'ratio', 'trials']


class EvalRecordSerializer(serializers.ModelSerializer):
    """Cost sweep CSV row"""

    seed = serializers.IntegerField()

    class Meta:
        model = EvalRecord
        fields = COST_COLUMNS


class StealthRowSerializer(serializers.ModelSerializer):
    """Stealth benchmark CSV row"""

    class Meta:
        model = StealthRow
        fields = STEALTH_COLUMNS
