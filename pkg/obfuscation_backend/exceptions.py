"""Exception base shared by every app of the obfuscation pipeline."""


class ObfuscationError(Exception):
    """Base class for pipeline errors.

    ``exit_code`` is the process exit status a management command reports
    when this error ends it.
    """

    default_code = 'error'
    exit_code = 1

    def __init__(self, message=None):
        super().__init__(message or self.default_message())

    def default_message(self):
        return self.default_code.replace('_', ' ')


class DigestMismatch(ObfuscationError):
    """Plaintext digest differs from the recorded one."""

    default_code = 'digest_mismatch'
    exit_code = 3

    def __init__(self, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(
            f'plaintext digest mismatch: expected {expected}, got {actual}'
        )


class TextEncodingError(ObfuscationError):
    """A text file is not valid UTF-8."""

    default_code = 'text_encoding'

    def __init__(self, path, position):
        self.path = path
        self.position = position
        super().__init__(f'{path}: not valid UTF-8 (byte offset {position})')
