from rest_framework import serializers

from obfuscation_backend.fields import UINT64_MAX
from seq2seq_core.weights import ARRAY_NAMES

MAX_CODE_POINT = 0x10FFFF


class KeyHeaderSerializer(serializers.Serializer):
    """JSON header of a .dobk key file"""

    version = serializers.IntegerField(min_value=1)
    hidden_size = serializers.IntegerField(min_value=1)
    max_decode_len = serializers.IntegerField(min_value=1)
    learning_rate = serializers.FloatField()
    max_iterations = serializers.IntegerField(min_value=0)
    check_interval = serializers.IntegerField(min_value=1)
    seed = serializers.IntegerField(min_value=0, max_value=UINT64_MAX)
    optimizer = serializers.CharField(max_length=200)
    enc_vocab = serializers.ListField(
        child=serializers.IntegerField(min_value=0, max_value=MAX_CODE_POINT), allow_empty=False
    )
    dec_vocab = serializers.ListField(
        child=serializers.IntegerField(min_value=0, max_value=MAX_CODE_POINT), min_length=3
    )
    shapes = serializers.ListField(
        child=serializers.ListField(child=serializers.IntegerField(min_value=1), min_length=1, max_length=2),
        min_length=len(ARRAY_NAMES), max_length=len(ARRAY_NAMES),
    )

    def validate_learning_rate(self, value):
        if not value > 0:
            raise serializers.ValidationError("learning_rate must be positive")
        return value

    def validate(self, attrs):
        for field in ('enc_vocab', 'dec_vocab'):
            if len(set(attrs[field])) != len(attrs[field]):
                raise serializers.ValidationError({field: "code points must be distinct"})
        return attrs

    def to_representation(self, key):
        config = key.config
        return super().to_representation({
            'version': key.format_version,
            'hidden_size': config.hidden_size,
            'max_decode_len': config.max_decode_len,
            'learning_rate': config.learning_rate,
            'max_iterations': config.max_iterations,
            'check_interval': config.check_interval,
            'seed': config.seed,
            'optimizer': key.optimizer_id,
            'enc_vocab': key.encoder_vocab.code_points(),
            'dec_vocab': key.decoder_vocab.code_points(),
            'shapes': [list(shape) for shape in key.weights.shapes()],
        })
