"""Differentiable primitives of the fused network."""

import typing

import numpy as np

from .. import exceptions
from .tensor import Tensor, record

__all__ = ['MODES', 'verify_mode',
           'matmul', 'add', 'mul', 'scale', 'transpose', 'reshape', 'flatten',
           'slice_axis', 'sum', 'mean',
           'relu', 'sigmoid', 'softmax', 'layernorm', 'dropout',
           'embedding_lookup', 'concat', 'bce_loss']

MODES = {'train', 'eval'}

LAYERNORM_EPS = 1e-5

BCE_CLAMP = 1e-12

_SIGMOID_LOW = np.finfo(np.float64).tiny

_SIGMOID_HIGH = np.nextafter(1.0, 0.0)


def verify_mode(mode: str) -> None:
    if mode not in MODES:
        raise exceptions.InvalidParam(f'unknown mode: {mode!r}'
                                      f' (must be one of {sorted(MODES)})')


def _unbroadcast(grad: np.ndarray, shape: typing.Tuple[int, ...]) -> np.ndarray:
    """Sum ``grad`` down to ``shape`` (inverse of numpy broadcasting)."""
    while grad.ndim > len(shape):
        grad = grad.sum(axis=0)
    for axis, extent in enumerate(shape):
        if extent == 1 and grad.shape[axis] != 1:
            grad = grad.sum(axis=axis, keepdims=True)
    return grad


def matmul(a: Tensor, b: Tensor) -> Tensor:
    """Return the matrix product of ``a`` (m x k) and ``b`` (k x n).

    >>> matmul(Tensor([[1, 2], [3, 4]]), Tensor([[5], [6]])).values.tolist()
    [[17.0], [39.0]]
    """
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise exceptions.ShapeMismatch(f'cannot multiply {a.shape!r} by {b.shape!r}')

    av, bv = a.values, b.values

    def backward(g):
        return g @ bv.T, av.T @ g

    return record(av @ bv, (a, b), backward)


def add(a: Tensor, b: Tensor) -> Tensor:
    """Return ``a + b`` with numpy broadcasting (e.g. a bias row)."""
    try:
        out = a.values + b.values
    except ValueError as e:
        raise exceptions.ShapeMismatch(f'cannot add {a.shape!r} and {b.shape!r}') from e

    def backward(g):
        return _unbroadcast(g, a.shape), _unbroadcast(g, b.shape)

    return record(out, (a, b), backward)


def mul(a: Tensor, b: Tensor) -> Tensor:
    """Return the elementwise product ``a * b`` with numpy broadcasting."""
    av, bv = a.values, b.values
    try:
        out = av * bv
    except ValueError as e:
        raise exceptions.ShapeMismatch(f'cannot multiply {a.shape!r} and {b.shape!r}') from e

    def backward(g):
        return _unbroadcast(g * bv, a.shape), _unbroadcast(g * av, b.shape)

    return record(out, (a, b), backward)


def scale(x: Tensor, factor: float) -> Tensor:
    """Return ``x`` multiplied by the constant ``factor``."""
    def backward(g):
        return (g * factor,)

    return record(x.values * factor, (x,), backward)


def transpose(x: Tensor) -> Tensor:
    if x.ndim != 2:
        raise exceptions.ShapeMismatch(f'transpose needs a matrix: {x.shape!r}')

    def backward(g):
        return (g.T,)

    return record(x.values.T, (x,), backward)


def reshape(x: Tensor, shape: typing.Sequence[int]) -> Tensor:
    try:
        out = x.values.reshape(tuple(shape))
    except ValueError as e:
        raise exceptions.ShapeMismatch(f'cannot reshape {x.shape!r}'
                                       f' into {tuple(shape)!r}') from e

    def backward(g):
        return (g.reshape(x.shape),)

    return record(out, (x,), backward)


def flatten(x: Tensor) -> Tensor:
    """Return ``x`` as a one-dimensional tensor (row-major order)."""
    return reshape(x, (x.size,))


def slice_axis(x: Tensor, start: int, stop: int, *, axis: int = 0) -> Tensor:
    """Return ``x[start:stop]`` along ``axis``."""
    axis = _normalize_axis(axis, x.ndim)
    if not 0 <= start < stop <= x.shape[axis]:
        raise exceptions.InvalidParam(f'invalid slice {start}:{stop}'
                                      f' of extent {x.shape[axis]}')
    index = (slice(None),) * axis + (slice(start, stop),)

    def backward(g):
        grad = np.zeros(x.shape, dtype=g.dtype)
        grad[index] = g
        return (grad,)

    return record(x.values[index], (x,), backward)


def sum(x: Tensor) -> Tensor:
    """Return the sum of all elements as scalar tensor."""
    def backward(g):
        return (np.broadcast_to(g, x.shape).copy(),)

    return record(np.asarray(x.values.sum()), (x,), backward)


def mean(x: Tensor) -> Tensor:
    """Return the mean of all elements as scalar tensor."""
    n = x.size

    def backward(g):
        return (np.full(x.shape, g / n),)

    return record(np.asarray(x.values.mean()), (x,), backward)


def relu(x: Tensor) -> Tensor:
    """Return ``max(0, x)`` elementwise (gradient 0 at exactly 0).

    >>> relu(Tensor([-1, 0, 2])).values.tolist()
    [0.0, 0.0, 2.0]
    """
    gate = x.values > 0

    def backward(g):
        return (g * gate,)

    return record(np.where(gate, x.values, 0.0), (x,), backward)


def sigmoid(x: Tensor) -> Tensor:
    """Return the logistic function elementwise, strictly inside ``(0, 1)``.

    >>> sigmoid(Tensor(1.0)).item()  # doctest: +APPROX
    0.731059
    >>> 1 - 1e-12 < sigmoid(Tensor(100.0)).item() < 1.0
    True
    """
    xv = x.values
    z = np.exp(-np.abs(xv))
    out = np.where(xv >= 0, 1.0 / (1.0 + z), z / (1.0 + z))
    out = np.clip(out, _SIGMOID_LOW, _SIGMOID_HIGH)

    def backward(g):
        return (g * out * (1.0 - out),)

    return record(out, (x,), backward)


def softmax(x: Tensor, axis: int = -1) -> Tensor:
    """Return ``exp(x - max) / sum(exp(x - max))`` along ``axis``.

    >>> softmax(Tensor([0.0, 0.0, 0.0])).values.round(6).tolist()
    [0.333333, 0.333333, 0.333333]
    """
    axis = _normalize_axis(axis, x.ndim)
    shifted = x.values - x.values.max(axis=axis, keepdims=True)
    e = np.exp(shifted)
    out = e / e.sum(axis=axis, keepdims=True)

    def backward(g):
        return (out * (g - (g * out).sum(axis=axis, keepdims=True)),)

    return record(out, (x,), backward)


def layernorm(x: Tensor, gamma: Tensor, beta: Tensor, axis: int = -1) -> Tensor:
    """Return ``(x - mean) / sqrt(var + 1e-5) * gamma + beta`` per slice along ``axis``."""
    axis = _normalize_axis(axis, x.ndim)
    n = x.shape[axis]
    if gamma.shape != (n,) or beta.shape != (n,):
        raise exceptions.ShapeMismatch(f'gamma {gamma.shape!r} and beta {beta.shape!r}'
                                       f' must have shape ({n},)')

    bshape = [1] * x.ndim
    bshape[axis] = n
    gv = gamma.values.reshape(bshape)
    bv = beta.values.reshape(bshape)

    mu = x.values.mean(axis=axis, keepdims=True)
    centered = x.values - mu
    var = (centered * centered).mean(axis=axis, keepdims=True)
    inv = 1.0 / np.sqrt(var + LAYERNORM_EPS)
    xhat = centered * inv
    other = tuple(i for i in range(x.ndim) if i != axis)

    def backward(g):
        dxhat = g * gv
        dx = inv / n * (n * dxhat
                        - dxhat.sum(axis=axis, keepdims=True)
                        - xhat * (dxhat * xhat).sum(axis=axis, keepdims=True))
        dgamma = (g * xhat).sum(axis=other).reshape(n)
        dbeta = g.sum(axis=other).reshape(n)
        return dx, dgamma, dbeta

    return record(xhat * gv + bv, (x, gamma, beta), backward)


def dropout(x: Tensor, rate: float, mode: str, rng: np.random.Generator) -> Tensor:
    """Return inverted dropout of ``x`` in ``'train'`` mode, ``x`` itself in ``'eval'``."""
    if not 0 <= rate < 1:
        raise exceptions.InvalidParam(f'invalid dropout rate: {rate!r} (must be in [0, 1))')
    verify_mode(mode)
    if mode == 'eval' or rate == 0:
        return x

    keep = (rng.random(x.shape) >= rate) / (1.0 - rate)

    def backward(g):
        return (g * keep,)

    return record(x.values * keep, (x,), backward)


def embedding_lookup(table: Tensor, ids: typing.Sequence[int]) -> Tensor:
    """Return the rows of ``table`` (V x d) selected by ``ids``.

    Raises:
        IndexOutOfRange: For the first id outside ``[0, V)``.
    """
    if table.ndim != 2:
        raise exceptions.ShapeMismatch(f'embedding table must be a matrix: {table.shape!r}')
    size = table.shape[0]
    for i in ids:
        if not 0 <= i < size:
            raise exceptions.IndexOutOfRange(i, size)
    index = np.asarray(ids, dtype=np.intp).reshape(-1)

    def backward(g):
        grad = np.zeros(table.shape, dtype=g.dtype)
        np.add.at(grad, index, g)
        return (grad,)

    return record(table.values[index], (table,), backward)


def concat(parts: typing.Sequence[Tensor], axis: int = 0) -> Tensor:
    """Return ``parts`` joined along ``axis``.

    >>> concat([Tensor([1, 2]), Tensor([3])]).values.tolist()
    [1.0, 2.0, 3.0]
    """
    if not parts:
        raise exceptions.ShapeMismatch('nothing to concatenate')
    if len(parts) == 1:
        return parts[0]

    ndim = parts[0].ndim
    axis = _normalize_axis(axis, ndim)
    rest = [p.shape[:axis] + p.shape[axis + 1:] for p in parts]
    if any(p.ndim != ndim for p in parts) or any(r != rest[0] for r in rest):
        raise exceptions.ShapeMismatch(f'cannot concatenate {[p.shape for p in parts]!r}'
                                       f' along axis {axis}')

    bounds = np.cumsum([p.shape[axis] for p in parts])[:-1]

    def backward(g):
        return tuple(np.split(g, bounds, axis=axis))

    return record(np.concatenate([p.values for p in parts], axis=axis),
                  tuple(parts), backward)


def bce_loss(p: Tensor, y: typing.Union[Tensor, np.ndarray, typing.Sequence[float]]) -> Tensor:
    """Return the mean binary cross entropy of probabilities ``p`` against labels ``y``.

    >>> bce_loss(Tensor([0.5]), [0.0]).item()  # doctest: +APPROX
    0.693147
    """
    yv = np.asarray(y.values if isinstance(y, Tensor) else y, dtype=np.float64)
    if yv.shape != p.shape:
        raise exceptions.ShapeMismatch(f'probabilities {p.shape!r}'
                                       f' and labels {yv.shape!r} differ')
    if not np.isin(yv, (0.0, 1.0)).all():
        raise exceptions.InvalidParam('labels must be 0 or 1')

    clamped = np.clip(p.values, BCE_CLAMP, 1.0 - BCE_CLAMP)
    interior = (p.values > BCE_CLAMP) & (p.values < 1.0 - BCE_CLAMP)
    n = max(p.size, 1)
    losses = -(yv * np.log(clamped) + (1.0 - yv) * np.log(1.0 - clamped))

    def backward(g):
        dp = (-yv / clamped + (1.0 - yv) / (1.0 - clamped)) / n
        return (g * dp * interior,)

    return record(np.asarray(losses.mean()), (p,), backward)


def _normalize_axis(axis: int, ndim: int) -> int:
    if not -ndim <= axis < ndim:
        raise exceptions.InvalidParam(f'invalid axis {axis!r} for {ndim} dimensions')
    return axis % ndim
