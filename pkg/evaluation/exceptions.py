from obfuscation_backend.exceptions import ObfuscationError


class CorpusError(ObfuscationError):
    """Stealth corpus directory is missing, empty or has unpaired files."""

    default_code = 'corpus_error'


class InsufficientData(ObfuscationError):
    default_code = 'insufficient_data'
