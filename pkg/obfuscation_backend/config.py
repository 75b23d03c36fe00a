"""Option resolution for the pipeline commands.

Precedence is command flag, then the TOML file given with ``--config``,
then the constants in settings. Seeds additionally fall back to the
``DOBF_SEED`` environment variable and finally to OS entropy.
"""
import logging
import os
import secrets
try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from django.conf import settings

from .exceptions import ObfuscationError
from .fields import UINT64_MAX

logger = logging.getLogger(__name__)

# TOML key -> settings constant holding its built-in default
OPTION_DEFAULTS = {
    'hidden_size': 'SEQ2SEQ_HIDDEN_SIZE',
    'randomness_index': 'RANDOMNESS_INDEX',
    'max_decode_len': 'MAX_DECODE_LEN',
    'learning_rate': 'LEARNING_RATE',
    'max_iterations': 'MAX_ITERATIONS',
    'check_interval': 'CHECK_INTERVAL',
    'max_attempts': 'MAX_KEYGEN_ATTEMPTS',
    'trials': 'STEALTH_TRIALS',
    'keygen_iterations': 'COST_KEYGEN_ITERATIONS',
    'jobs': 'EVAL_JOBS',
}


class ConfigError(ObfuscationError):
    default_code = 'invalid_config'


def load_config_file(path):
    """Read a TOML option file and validate its keys and value types."""
    if path is None:
        return {}
    with open(path, 'rb') as fh:
        try:
            values = tomllib.load(fh)
        except tomllib.TOMLDecodeError as exc:
            raise ConfigError(f'{path}: {exc}') from exc

    unknown = sorted(set(values) - set(OPTION_DEFAULTS) - {'seed'})
    if unknown:
        raise ConfigError(f'{path}: unknown option(s) {", ".join(unknown)}')

    for name, value in values.items():
        if name == 'seed':
            values[name] = parse_seed(value)
            continue
        default = getattr(settings, OPTION_DEFAULTS[name])
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f'{path}: {name} must be a number')
        if isinstance(default, int) and not isinstance(value, int):
            raise ConfigError(f'{path}: {name} must be an integer')
    return values


def resolve_option(name, flag_value, file_values):
    if flag_value is not None:
        return flag_value
    if name in file_values:
        return file_values[name]
    return getattr(settings, OPTION_DEFAULTS[name])


def parse_seed(raw):
    try:
        seed = int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f'seed must be an integer, got {raw!r}')
    if not 0 <= seed <= UINT64_MAX:
        raise ConfigError(f'seed must fit in 64 unsigned bits, got {seed}')
    return seed


def resolve_seed(flag_value, file_values):
    """Return ``(seed, drawn)``; ``drawn`` is True when OS entropy was used."""
    if flag_value is not None:
        return parse_seed(flag_value), False
    if 'seed' in file_values:
        return file_values['seed'], False
    env_value = os.environ.get(settings.SEED_ENV_VAR)
    if env_value:
        return parse_seed(env_value), False
    seed = secrets.randbits(64)
    logger.debug('Drew seed %d from OS entropy', seed)
    return seed, True
