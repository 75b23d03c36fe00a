from dataclasses import asdict, dataclass, replace

from obfuscation_backend.fields import UINT64_MAX

from .exceptions import InvalidConfig

REFERENCE_HIDDEN_SIZE = 256
REFERENCE_INPUT_VOCAB = 39
REFERENCE_OUTPUT_VOCAB = 72


@dataclass(frozen=True)
class Seq2SeqConfig:
    """Sizes and training knobs of one encoder-decoder."""

    hidden_size: int
    input_vocab_size: int
    output_vocab_size: int
    max_decode_len: int = 100
    learning_rate: float = 1e-2
    max_iterations: int = 2000
    check_interval: int = 50
    seed: int = 0

    def __post_init__(self):
        for name in ('hidden_size', 'input_vocab_size', 'output_vocab_size', 'max_decode_len',
                     'check_interval'):
            value = getattr(self, name)
            if isinstance(value, bool) or not isinstance(value, int) or value < 1:
                raise InvalidConfig(f'{name} must be a positive integer, got {value!r}')
        if not isinstance(self.max_iterations, int) or self.max_iterations < 0:
            raise InvalidConfig(f'max_iterations must be >= 0, got {self.max_iterations!r}')
        if 0 < self.max_iterations < self.check_interval:
            raise InvalidConfig('check_interval must not exceed max_iterations')
        if not self.learning_rate > 0:
            raise InvalidConfig(f'learning_rate must be positive, got {self.learning_rate!r}')
        if not 0 <= self.seed <= UINT64_MAX:
            raise InvalidConfig(f'seed must fit in 64 unsigned bits, got {self.seed!r}')

    def replace(self, **changes):
        return replace(self, **changes)

    def to_dict(self):
        return asdict(self)

    @classmethod
    def from_dict(cls, data):
        return cls(**data)


def reference_config(**overrides):
    """Reference model size: V_in=39, H=256, V_out=72."""
    values = dict(
        hidden_size=REFERENCE_HIDDEN_SIZE,
        input_vocab_size=REFERENCE_INPUT_VOCAB,
        output_vocab_size=REFERENCE_OUTPUT_VOCAB,
    )
    values.update(overrides)
    return Seq2SeqConfig(**values)


def pipeline_config(hidden_size, **values):
    """Config whose vocabulary sizes are placeholders.

    The cipher and keygen services derive both vocabularies from their
    texts and replace the sizes before building any weights.
    """
    return Seq2SeqConfig(hidden_size=hidden_size, input_vocab_size=1, output_vocab_size=1, **values)
