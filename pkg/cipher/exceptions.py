from obfuscation_backend.exceptions import ObfuscationError


class CharsetTooSmall(ObfuscationError):
    default_code = 'charset_too_small'


class CipherMetaError(ObfuscationError):
    """The .obf.meta.json sidecar is missing fields or holds invalid values."""

    default_code = 'invalid_cipher_meta'
