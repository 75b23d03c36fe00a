from rest_framework import serializers

from obfuscation_backend.fields import UINT64_MAX

from .models import CipherRecord

META_VERSION = 1


class CipherMetaSerializer(serializers.Serializer):
    """The single-line .obf.meta.json sidecar next to a ciphertext file"""

    version = serializers.IntegerField(min_value=1, max_value=META_VERSION)
    seed = serializers.IntegerField(min_value=0, max_value=UINT64_MAX)
    n = serializers.IntegerField(min_value=1, source='randomness_index')
    charset_id = serializers.CharField(max_length=100)
    sha256 = serializers.RegexField(r'^[0-9a-f]{64}$', source='plaintext_sha256')
    max_decode_len = serializers.IntegerField(min_value=1)
    hidden_size = serializers.IntegerField(min_value=1)

    def to_representation(self, instance):
        if isinstance(instance, CipherRecord):
            snapshot = instance.config_snapshot
            instance = {
                'version': META_VERSION,
                'seed': instance.seed,
                'randomness_index': instance.randomness_index,
                'charset_id': instance.charset_id,
                'plaintext_sha256': instance.plaintext_sha256,
                'max_decode_len': snapshot.max_decode_len,
                'hidden_size': snapshot.hidden_size,
            }
        return super().to_representation(instance)
