from obfuscation_backend.exceptions import ObfuscationError


class KeyGenFailed(ObfuscationError):
    """No training attempt reproduced the plaintext exactly."""

    default_code = 'keygen_failed'
    exit_code = 2

    def __init__(self, attempts, report=None):
        self.attempts = attempts
        self.report = report
        super().__init__(f'key generation failed after {attempts} attempt(s)')
