"""Verify analytic gradients against central finite differences."""

import logging
import typing

import numpy as np

from .tensor import Tensor, Tape

__all__ = ['grad_check', 'analytic_grad', 'numeric_grad', 'relative_error']

EPSILON = 1e-5

DENOMINATOR_FLOOR = 1e-8


log = logging.getLogger(__name__)

ScalarFunction = typing.Callable[[Tensor], Tensor]


def analytic_grad(f: ScalarFunction, x: Tensor) -> np.ndarray:
    """Return ``df/dx`` by reverse-mode differentiation
        (leaves the gradient buffer of ``x`` as it was)."""
    saved_grad, saved_flag = x.grad, x.requires_grad
    x.grad, x.requires_grad = None, True
    try:
        with Tape() as tape:
            out = f(x)
        tape.backward(out)
        return x.grad.copy() if x.grad is not None else np.zeros(x.shape)
    finally:
        x.grad, x.requires_grad = saved_grad, saved_flag


def numeric_grad(f: ScalarFunction, x: Tensor, *, epsilon: float = EPSILON) -> np.ndarray:
    """Return ``df/dx`` by central differences, perturbing ``x`` in place."""
    if not x.values.flags.c_contiguous:
        x.values = np.ascontiguousarray(x.values)
    flat = x.values.reshape(-1)  # view
    grad = np.zeros(flat.shape)
    for i in range(flat.size):
        orig = flat[i]
        flat[i] = orig + epsilon
        plus = f(x).item()
        flat[i] = orig - epsilon
        minus = f(x).item()
        flat[i] = orig
        grad[i] = (plus - minus) / (2 * epsilon)
    return grad.reshape(x.shape)


def relative_error(analytic: np.ndarray, numeric: np.ndarray) -> float:
    """Return ``max |a - n| / max(1e-8, |a| + |n|)`` over all coordinates."""
    if analytic.size == 0:
        return 0.0
    denominator = np.maximum(DENOMINATOR_FLOOR, np.abs(analytic) + np.abs(numeric))
    return float((np.abs(analytic - numeric) / denominator).max())


def grad_check(f: ScalarFunction, x: Tensor, epsilon: float = EPSILON) -> float:
    """Return the maximum relative error between analytic and numeric ``df/dx``.

    Args:
        f: Scalar-valued function of ``x`` built from differentiable ops.
        x: Point to check at (must be away from relu/maxpool kinks).
        epsilon: Central difference step.

    >>> from hncf.autodiff import ops
    >>> grad_check(ops.sum, Tensor([1.0, 2.0, 3.0])) <= 1e-9
    True
    """
    analytic = analytic_grad(f, x)
    numeric = numeric_grad(f, x, epsilon=epsilon)
    error = relative_error(analytic, numeric)
    log.debug('grad_check %s over %d coordinates: %.3g', x.name or 'tensor', x.size, error)
    return error
