"""Teacher-forced training with backpropagation through time."""
import logging
import math
from dataclasses import dataclass

import numpy as np

from text_codec.vocab import IndexSequence, decode_text

from .exceptions import NumericalDivergence
from .lstm import lstm_step, lstm_step_backward
from .model import COMPUTE_DTYPE, decode_greedy, encode, log_softmax, run_encoder
from .weights import ARRAY_NAMES, ModelWeights

logger = logging.getLogger(__name__)


def loss_and_gradients(weights, inputs, target):
    """Mean per-character cross-entropy of ``target`` and its gradients.

    ``target`` is framed (SOS ... EOS): the decoder reads target[t] and
    is scored on target[t + 1].
    """
    if len(target) < 2:
        raise ValueError('target must hold at least the SOS and EOS markers')
    params = weights.astype(COMPUTE_DTYPE)
    labels = target.indices
    steps = len(labels) - 1

    h, c, enc_caches = run_encoder(params, inputs.indices)

    dec_caches = []
    dlogits = []
    loss = 0.0
    for t in range(steps):
        h, c, cache = lstm_step(
            labels[t], h, c, params.dec_input_kernel, params.dec_recurrent_kernel, params.dec_bias
        )
        log_probs = log_softmax(h @ params.proj_kernel + params.proj_bias)
        loss -= log_probs[labels[t + 1]]
        delta = np.exp(log_probs)
        delta[labels[t + 1]] -= 1.0
        dec_caches.append(cache)
        dlogits.append(delta / steps)
    loss /= steps

    grads = {name: np.zeros_like(arr) for name, arr in params.items()}
    dh_next = np.zeros(params.hidden_size, COMPUTE_DTYPE)
    dc_next = np.zeros(params.hidden_size, COMPUTE_DTYPE)
    for cache, delta in zip(reversed(dec_caches), reversed(dlogits)):
        grads['proj_kernel'] += np.outer(cache.h, delta)
        grads['proj_bias'] += delta
        dh = params.proj_kernel @ delta + dh_next
        dh_next, dc_next = lstm_step_backward(
            cache, dh, dc_next, params.dec_recurrent_kernel,
            grads['dec_input_kernel'], grads['dec_recurrent_kernel'], grads['dec_bias'],
        )
    for cache in reversed(enc_caches):
        dh_next, dc_next = lstm_step_backward(
            cache, dh_next, dc_next, params.enc_recurrent_kernel,
            grads['enc_input_kernel'], grads['enc_recurrent_kernel'], grads['enc_bias'],
        )
    return float(loss), grads


class RMSprop:
    """RMSprop with elementwise gradient clipping.

    Accumulators persist across ``apply`` calls, so one instance belongs to
    one training run.
    """

    def __init__(self, decay=0.9, epsilon=1e-7, clip=5.0):
        self.decay = decay
        self.epsilon = epsilon
        self.clip = clip
        self._accumulators = None

    @property
    def identifier(self):
        return f'rmsprop(decay={self.decay},eps={self.epsilon},clip={self.clip})'

    def apply(self, weights, grads, learning_rate):
        if self._accumulators is None:
            self._accumulators = {
                name: np.zeros_like(grads[name], dtype=COMPUTE_DTYPE) for name in ARRAY_NAMES
            }
        updated = {}
        for name, param in weights.items():
            grad = np.clip(grads[name], -self.clip, self.clip)
            acc = self._accumulators[name]
            acc *= self.decay
            acc += (1.0 - self.decay) * grad * grad
            updated[name] = param.astype(COMPUTE_DTYPE) - learning_rate * grad / (
                np.sqrt(acc) + self.epsilon
            )
        return ModelWeights.from_mapping(updated, dtype=weights.enc_bias.dtype)


def train_step(weights, inputs, target, learning_rate, optimizer=None):
    """One forward/backward pass and one optimizer update; returns (weights, loss).

    The loss is measured before the update.
    """
    loss, grads = loss_and_gradients(weights, inputs, target)
    if not math.isfinite(loss):
        raise NumericalDivergence(f'loss is not finite ({loss})')
    for name, grad in grads.items():
        if not np.isfinite(grad).all():
            raise NumericalDivergence(f'gradient of {name} is not finite')
    optimizer = optimizer or RMSprop()
    updated = optimizer.apply(weights, grads, learning_rate)
    if not updated.all_finite():
        raise NumericalDivergence('weights left the finite range after the update')
    return updated, loss


@dataclass(frozen=True)
class TrainingResult:
    """``final_loss`` is measured on ``weights``, after the last update."""

    weights: ModelWeights
    iterations_used: int
    success: bool
    final_loss: float


def train_to_target(weights, inputs, target, out_vocab, config, early_stop=True, optimizer=None):
    """Train until greedy decoding reproduces ``target`` exactly.

    With ``early_stop`` the round trip is checked before the first step and
    every ``config.check_interval`` steps; otherwise only once, after
    ``config.max_iterations`` steps.
    """
    target_text = decode_text(IndexSequence(target.indices[1:-1], target.vocab_size), out_vocab)
    max_len = len(target_text) + 1
    optimizer = optimizer or RMSprop()

    def reproduces(current):
        return decode_greedy(current, encode(current, inputs), out_vocab, max_len) == target_text

    loss = None
    success = False
    iteration = 0
    while True:
        due = early_stop and iteration % config.check_interval == 0
        if due or iteration == config.max_iterations:
            if reproduces(weights):
                success = True
                break
            if loss is not None:
                logger.debug('iteration %d: loss %.6f, no exact match yet', iteration, loss)
        if iteration == config.max_iterations:
            break
        weights, loss = train_step(weights, inputs, target, config.learning_rate, optimizer)
        iteration += 1

    final_loss = loss_and_gradients(weights, inputs, target)[0]
    return TrainingResult(weights, iteration, success, final_loss)
