from obfuscation_backend.exceptions import ObfuscationError


class KeyIOError(ObfuscationError):
    default_code = 'key_io_error'


class CorruptKey(ObfuscationError):
    default_code = 'corrupt_key'

    def __init__(self, reason):
        self.reason = reason
        super().__init__(f'corrupt key file: {reason}')


class UnsupportedVersion(ObfuscationError):
    default_code = 'unsupported_version'

    def __init__(self, version):
        self.version = version
        super().__init__(f'unsupported key format version {version}')
