from obfuscation_backend.exceptions import ObfuscationError


class ExecutionConfigError(ObfuscationError):
    """Missing or malformed interpreter command template."""

    default_code = 'execution_config_error'


class SpawnError(ObfuscationError):
    default_code = 'spawn_error'
