"""Parameter initializers (embeddings uniform, weights Glorot-uniform, biases zero)."""

import math
import typing

import numpy as np

from ..autodiff import Tensor

__all__ = ['EMBEDDING_SCALE',
           'uniform_embedding', 'glorot_uniform', 'zeros', 'ones']

EMBEDDING_SCALE = 0.05


def uniform_embedding(rng: np.random.Generator, shape: typing.Sequence[int], *,
                      requires_grad: bool = True) -> Tensor:
    """Return a table drawn from ``uniform(-0.05, 0.05)``."""
    values = rng.uniform(-EMBEDDING_SCALE, EMBEDDING_SCALE, size=tuple(shape))
    return Tensor(values, requires_grad=requires_grad)


def glorot_uniform(rng: np.random.Generator, shape: typing.Sequence[int], *,
                   requires_grad: bool = True) -> Tensor:
    """Return weights drawn from ``uniform(-l, l)`` with ``l = sqrt(6 / (fan_in + fan_out))``.

    For 4-d convolution kernels (kh x kw x Cin x Cout) the receptive field
    multiplies both fans.
    """
    shape = tuple(shape)
    receptive = math.prod(shape[:-2]) if len(shape) > 2 else 1
    fan_in, fan_out = shape[-2] * receptive, shape[-1] * receptive
    limit = math.sqrt(6.0 / (fan_in + fan_out))
    return Tensor(rng.uniform(-limit, limit, size=shape), requires_grad=requires_grad)


def zeros(shape: typing.Sequence[int], *, requires_grad: bool = True) -> Tensor:
    return Tensor.zeros(shape, requires_grad=requires_grad)


def ones(shape: typing.Sequence[int], *, requires_grad: bool = True) -> Tensor:
    return Tensor.ones(shape, requires_grad=requires_grad)
