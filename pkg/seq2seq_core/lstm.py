"""Single LSTM cell step and its backward pass on one-hot inputs.

Gate layout along the 4H axis: input, forget, cell-candidate, output.
All arithmetic is float64; callers cast stored float32 parameters first.
"""
from dataclasses import dataclass

import numpy as np


def sigmoid(x):
    # tanh form does not overflow for large |x|
    return 0.5 * (1.0 + np.tanh(0.5 * x))


@dataclass
class StepCache:
    x: int
    h_prev: np.ndarray
    c_prev: np.ndarray
    i: np.ndarray
    f: np.ndarray
    g: np.ndarray
    o: np.ndarray
    tanh_c: np.ndarray
    h: np.ndarray


def lstm_step(x, h_prev, c_prev, input_kernel, recurrent_kernel, bias):
    """Advance one timestep; ``x`` is the index of the one-hot input."""
    n = h_prev.shape[0]
    z = input_kernel[x] + h_prev @ recurrent_kernel + bias
    i = sigmoid(z[:n])
    f = sigmoid(z[n:2 * n])
    g = np.tanh(z[2 * n:3 * n])
    o = sigmoid(z[3 * n:])
    c = f * c_prev + i * g
    tanh_c = np.tanh(c)
    h = o * tanh_c
    return h, c, StepCache(x, h_prev, c_prev, i, f, g, o, tanh_c, h)


def lstm_step_backward(cache, dh, dc, recurrent_kernel, d_input_kernel, d_recurrent_kernel, d_bias):
    """Accumulate parameter gradients in place; return (dh_prev, dc_prev)."""
    do = dh * cache.tanh_c
    dc = dc + dh * cache.o * (1.0 - cache.tanh_c ** 2)
    di = dc * cache.g
    df = dc * cache.c_prev
    dg = dc * cache.i
    dz = np.concatenate([
        di * cache.i * (1.0 - cache.i),
        df * cache.f * (1.0 - cache.f),
        dg * (1.0 - cache.g ** 2),
        do * cache.o * (1.0 - cache.o),
    ])
    d_input_kernel[cache.x] += dz
    d_recurrent_kernel += np.outer(cache.h_prev, dz)
    d_bias += dz
    return recurrent_kernel @ dz, dc * cache.f
