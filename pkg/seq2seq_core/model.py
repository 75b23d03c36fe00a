"""Forward pass and greedy decoding of the character encoder-decoder."""
from dataclasses import dataclass

import numpy as np

from .exceptions import NumericalDivergence
from .lstm import lstm_step

COMPUTE_DTYPE = np.float64


@dataclass(frozen=True)
class EncoderState:
    hidden: np.ndarray
    cell: np.ndarray

    @classmethod
    def zeros(cls, hidden_size):
        return cls(np.zeros(hidden_size, COMPUTE_DTYPE), np.zeros(hidden_size, COMPUTE_DTYPE))


def softmax(logits):
    shifted = np.exp(logits - np.max(logits))
    return shifted / shifted.sum()


def log_softmax(logits):
    shifted = logits - np.max(logits)
    return shifted - np.log(np.exp(shifted).sum())


def run_encoder(params, indices):
    """Encoder recurrence on float64 ``params``; returns (h, c, caches)."""
    h = np.zeros(params.hidden_size, COMPUTE_DTYPE)
    c = np.zeros(params.hidden_size, COMPUTE_DTYPE)
    caches = []
    for x in indices:
        h, c, cache = lstm_step(
            x, h, c, params.enc_input_kernel, params.enc_recurrent_kernel, params.enc_bias
        )
        caches.append(cache)
    return h, c, caches


def encode(weights, inputs):
    """Final (hidden, cell) after consuming ``inputs`` from a zero state."""
    params = weights.astype(COMPUTE_DTYPE)
    h, c, _ = run_encoder(params, inputs.indices)
    if not (np.isfinite(h).all() and np.isfinite(c).all()):
        raise NumericalDivergence('encoder state is not finite')
    return EncoderState(h, c)


def decode_greedy(weights, state, out_vocab, max_len, suppress=()):
    """Greedy decode from ``state`` until EOS or ``max_len`` characters.

    The SOS marker and any character in ``suppress`` are never emitted.
    """
    if not out_vocab.has_markers:
        raise ValueError('decoding requires an output vocabulary with markers')
    if max_len < 1:
        raise ValueError(f'max_len must be >= 1, got {max_len}')

    params = weights.astype(COMPUTE_DTYPE)
    blocked = np.zeros(out_vocab.size, dtype=bool)
    blocked[out_vocab.sos_index] = True
    for char in suppress:
        if char in out_vocab.symbols:
            blocked[out_vocab.index_of[char]] = True

    h = np.asarray(state.hidden, COMPUTE_DTYPE)
    c = np.asarray(state.cell, COMPUTE_DTYPE)
    previous = out_vocab.sos_index
    output = []
    for _ in range(max_len):
        h, c, _ = lstm_step(
            previous, h, c, params.dec_input_kernel, params.dec_recurrent_kernel, params.dec_bias
        )
        probs = softmax(h @ params.proj_kernel + params.proj_bias)
        if not np.isfinite(probs).all():
            raise NumericalDivergence('decoder distribution is not finite')
        previous = int(np.argmax(np.where(blocked, -1.0, probs)))
        if previous == out_vocab.eos_index:
            break
        output.append(out_vocab.char_at[previous])
    return ''.join(output)
