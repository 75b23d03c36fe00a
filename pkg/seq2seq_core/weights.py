"""The eight-array parameter set of the encoder-decoder.

Gates are packed along the 4H axis in the order input, forget,
cell-candidate, output.
"""
import logging
from dataclasses import dataclass, fields

import numpy as np

from .exceptions import InvalidConfig

logger = logging.getLogger(__name__)

ARRAY_NAMES = (
    'enc_input_kernel',
    'enc_recurrent_kernel',
    'enc_bias',
    'dec_input_kernel',
    'dec_recurrent_kernel',
    'dec_bias',
    'proj_kernel',
    'proj_bias',
)

PARAM_DTYPE = np.float32
TRAINABLE_INIT_SCALE = 0.08
FORGET_BIAS = 1.0


def expected_shapes(config):
    h4 = 4 * config.hidden_size
    return {
        'enc_input_kernel': (config.input_vocab_size, h4),
        'enc_recurrent_kernel': (config.hidden_size, h4),
        'enc_bias': (h4,),
        'dec_input_kernel': (config.output_vocab_size, h4),
        'dec_recurrent_kernel': (config.hidden_size, h4),
        'dec_bias': (h4,),
        'proj_kernel': (config.hidden_size, config.output_vocab_size),
        'proj_bias': (config.output_vocab_size,),
    }


@dataclass(frozen=True, eq=False)
class ModelWeights:
    enc_input_kernel: np.ndarray
    enc_recurrent_kernel: np.ndarray
    enc_bias: np.ndarray
    dec_input_kernel: np.ndarray
    dec_recurrent_kernel: np.ndarray
    dec_bias: np.ndarray
    proj_kernel: np.ndarray
    proj_bias: np.ndarray

    @classmethod
    def from_mapping(cls, arrays, dtype=PARAM_DTYPE):
        return cls(**{name: np.array(arrays[name], dtype=dtype) for name in ARRAY_NAMES})

    def items(self):
        return [(f.name, getattr(self, f.name)) for f in fields(self)]

    def arrays(self):
        return [getattr(self, name) for name in ARRAY_NAMES]

    @property
    def hidden_size(self):
        return self.enc_recurrent_kernel.shape[0]

    @property
    def input_vocab_size(self):
        return self.enc_input_kernel.shape[0]

    @property
    def output_vocab_size(self):
        return self.proj_bias.shape[0]

    def shapes(self):
        return [arr.shape for arr in self.arrays()]

    def leading_dims(self):
        return [arr.shape[0] for arr in self.arrays()]

    def parameter_count(self):
        return sum(arr.size for arr in self.arrays())

    def layout_value_count(self):
        """Values when every array row is tallied as a full 4H-wide row.

        The 4H bias vectors count once; every other array counts its leading
        dimension times 4H. At V_in=39, H=256, V_out=72 this gives 975,872.
        """
        h4 = 4 * self.hidden_size
        total = 0
        for arr in self.arrays():
            if arr.ndim == 1 and arr.shape[0] == h4:
                total += h4
            else:
                total += arr.shape[0] * h4
        return total

    def matches(self, config):
        shapes = expected_shapes(config)
        return all(getattr(self, name).shape == shapes[name] for name in ARRAY_NAMES)

    def astype(self, dtype):
        return ModelWeights.from_mapping(dict(self.items()), dtype=dtype)

    def copy(self):
        return self.astype(self.enc_bias.dtype)

    def all_finite(self):
        return all(np.isfinite(arr).all() for arr in self.arrays())

    def bitwise_equal(self, other):
        return all(
            a.dtype == b.dtype and a.shape == b.shape and a.tobytes() == b.tobytes()
            for a, b in zip(self.arrays(), other.arrays())
        )


def zeros(config):
    return ModelWeights.from_mapping(
        {name: np.zeros(shape) for name, shape in expected_shapes(config).items()}
    )


def _draw(rng, config, scale):
    return ModelWeights.from_mapping({
        name: rng.uniform(-scale, scale, size=shape)
        for name, shape in expected_shapes(config).items()
    })


def init_random(config, randomness_index, scale=0.5):
    """Draw the full weight set ``randomness_index`` times and keep the last draw.

    Every draw advances the generator seeded with ``config.seed``, so the
    index changes the result.
    """
    if randomness_index < 1:
        raise InvalidConfig(f'randomness_index must be >= 1, got {randomness_index}')
    rng = np.random.default_rng(config.seed)
    for _ in range(randomness_index):
        weights = _draw(rng, config, scale)
    logger.debug(
        'Drew %d weight sets (seed=%d, %d parameters)',
        randomness_index, config.seed, weights.parameter_count(),
    )
    return weights


def init_trainable(config):
    """Single small draw with forget-gate biases at +1, the keygen starting point."""
    weights = init_random(config, 1, scale=TRAINABLE_INIT_SCALE)
    h = config.hidden_size
    weights.enc_bias[h:2 * h] = FORGET_BIAS
    weights.dec_bias[h:2 * h] = FORGET_BIAS
    return weights
