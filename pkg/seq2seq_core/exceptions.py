from obfuscation_backend.exceptions import ObfuscationError


class InvalidConfig(ObfuscationError, ValueError):
    default_code = 'invalid_config'


class NumericalDivergence(ObfuscationError):
    default_code = 'numerical_divergence'
