"""64-bit float tensors and the tape recording their operations."""

import logging
import threading
import typing

import numpy as np

from .. import exceptions

__all__ = ['Tensor', 'Tape', 'backward', 'active_tape', 'record', 'as_tensor']

DTYPE = np.float64

BackwardRule = typing.Callable[[np.ndarray], typing.Sequence[typing.Optional[np.ndarray]]]

ArrayLike = typing.Union[np.ndarray, typing.Sequence, float, int]


log = logging.getLogger(__name__)

_local = threading.local()


class Tensor:
    """N-dimensional array of 64-bit floats with an optional gradient buffer.

    >>> t = Tensor([[1, 2], [3, 4]], requires_grad=True)
    >>> t.shape
    (2, 2)
    >>> t.grad is None
    True
    """

    __slots__ = ('values', 'grad', 'requires_grad', 'name', '__weakref__')

    def __init__(self, values: ArrayLike, *, requires_grad: bool = False,
                 name: typing.Optional[str] = None) -> None:
        self.values: np.ndarray = np.array(values, dtype=DTYPE)
        """:class:`numpy.ndarray` of the tensor's values (row-major)."""

        self.grad: typing.Optional[np.ndarray] = None
        """Accumulated gradient (same shape as ``values``) or ``None``."""

        self.requires_grad = bool(requires_grad)

        self.name = name

    @classmethod
    def _wrap(cls, values: np.ndarray, *, requires_grad: bool = False) -> 'Tensor':
        """Return a new tensor around ``values`` without copying."""
        inst = cls.__new__(cls)
        inst.values = np.asarray(values, dtype=DTYPE)
        inst.grad = None
        inst.requires_grad = requires_grad
        inst.name = None
        return inst

    @classmethod
    def zeros(cls, shape: typing.Sequence[int], **kwargs) -> 'Tensor':
        return cls(np.zeros(tuple(shape), dtype=DTYPE), **kwargs)

    @classmethod
    def ones(cls, shape: typing.Sequence[int], **kwargs) -> 'Tensor':
        return cls(np.ones(tuple(shape), dtype=DTYPE), **kwargs)

    def __repr__(self) -> str:
        name = f', name={self.name!r}' if self.name is not None else ''
        return (f'{self.__class__.__name__}(shape={self.shape!r},'
                f' requires_grad={self.requires_grad!r}{name})')

    @property
    def shape(self) -> typing.Tuple[int, ...]:
        return self.values.shape

    @property
    def ndim(self) -> int:
        return self.values.ndim

    @property
    def size(self) -> int:
        return self.values.size

    def item(self) -> float:
        """Return the value of a one-element tensor as :class:`float`."""
        return float(self.values.reshape(-1)[0]) if self.size == 1 else float(self.values)

    def numpy(self) -> np.ndarray:
        """Return a copy of the values."""
        return self.values.copy()

    def zero_grad(self) -> None:
        self.grad = None

    def accumulate_grad(self, grad: np.ndarray) -> None:
        """Add ``grad`` into the gradient buffer (allocating it on first use)."""
        if grad.shape != self.values.shape:
            raise exceptions.ShapeMismatch(f'gradient shape {grad.shape!r}'
                                           f' differs from tensor shape {self.shape!r}')
        if self.grad is None:
            self.grad = np.array(grad, dtype=DTYPE)
        else:
            self.grad += grad

    def __add__(self, other):
        from . import ops
        return ops.add(self, as_tensor(other))

    __radd__ = __add__

    def __mul__(self, other):
        from . import ops
        return ops.mul(self, as_tensor(other))

    __rmul__ = __mul__

    def __matmul__(self, other):
        from . import ops
        return ops.matmul(self, other)

    def sum(self):
        from . import ops
        return ops.sum(self)


def as_tensor(value: typing.Union[Tensor, ArrayLike]) -> Tensor:
    """Return ``value`` if it is a :class:`Tensor`, else a constant tensor."""
    if isinstance(value, Tensor):
        return value
    return Tensor(value)


class _Node(typing.NamedTuple):

    output: Tensor

    inputs: typing.Tuple[Tensor, ...]

    backward: BackwardRule


class Tape:
    """Ordered record of differentiable operations.

    Operations are recorded on the innermost tape entered with ``with``
    in the current thread; without an active tape nothing is recorded.

    >>> from hncf.autodiff import ops
    >>> x = Tensor([1.0, -2.0, 3.0], requires_grad=True)
    >>> with Tape() as tape:
    ...     loss = ops.sum(ops.mul(x, x))
    >>> tape.backward(loss)
    >>> x.grad.tolist()
    [2.0, -4.0, 6.0]
    """

    def __init__(self) -> None:
        self._nodes: typing.List[_Node] = []
        self._produced: typing.Dict[int, int] = {}

    def __len__(self) -> int:
        return len(self._nodes)

    def __enter__(self) -> 'Tape':
        stack = _tape_stack()
        stack.append(self)
        return self

    def __exit__(self, *exc_info) -> None:
        stack = _tape_stack()
        popped = stack.pop()
        assert popped is self, 'tapes must be exited in reverse order'

    def __contains__(self, tensor: Tensor) -> bool:
        index = self._produced.get(id(tensor))
        return index is not None and self._nodes[index].output is tensor

    def record(self, output: Tensor, inputs: typing.Sequence[Tensor],
               backward: BackwardRule) -> None:
        """Append an operation producing ``output`` from ``inputs``."""
        self._produced[id(output)] = len(self._nodes)
        self._nodes.append(_Node(output, tuple(inputs), backward))

    def backward(self, loss: Tensor) -> None:
        """Accumulate ``dloss/dtensor`` into every reachable tensor with ``requires_grad``.

        Raises:
            NotOnTape: If ``loss`` was not produced by an operation on this tape.
            ShapeMismatch: If ``loss`` is not a one-element tensor.
        """
        if loss not in self:
            raise exceptions.NotOnTape(f'{loss!r} was not recorded on this tape')
        if loss.size != 1:
            raise exceptions.ShapeMismatch(f'loss must be scalar: {loss.shape!r}')

        log.debug('backward over %d recorded operations', len(self._nodes))
        loss.accumulate_grad(np.ones_like(loss.values))
        end = self._produced[id(loss)]
        for node in reversed(self._nodes[:end + 1]):
            upstream = node.output.grad
            if upstream is None:
                continue
            grads = node.backward(upstream)
            for tensor, grad in zip(node.inputs, grads):
                if grad is not None and tensor.requires_grad:
                    tensor.accumulate_grad(grad)


def _tape_stack() -> typing.List[Tape]:
    try:
        return _local.stack
    except AttributeError:
        _local.stack = []
        return _local.stack


def active_tape() -> typing.Optional[Tape]:
    """Return the innermost tape of the current thread or ``None``."""
    stack = _tape_stack()
    return stack[-1] if stack else None


def record(values: np.ndarray, inputs: typing.Sequence[Tensor],
           backward: BackwardRule) -> Tensor:
    """Return a tensor for the op result ``values`` and record it
        if a tape is active and any input requires a gradient."""
    requires_grad = any(t.requires_grad for t in inputs)
    out = Tensor._wrap(values, requires_grad=requires_grad)
    tape = active_tape()
    if requires_grad and tape is not None:
        tape.record(out, inputs, backward)
    return out


def backward(loss: Tensor, tape: Tape) -> None:
    """Run :meth:`Tape.backward` for ``loss`` on ``tape``."""
    tape.backward(loss)
