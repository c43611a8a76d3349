"""Convolution and max-pooling over height x width x channel maps."""

import typing

import numpy as np

from .. import exceptions
from .tensor import Tensor, record

__all__ = ['conv_output_extent', 'conv2d', 'maxpool2d']


def conv_output_extent(extent: int, kernel: int, *, stride: int, padding: int) -> int:
    """Return the output extent of a strided window over a padded axis.

    >>> conv_output_extent(5, 3, stride=1, padding=1)
    5
    >>> conv_output_extent(32, 2, stride=2, padding=0)
    16
    """
    return (extent + 2 * padding - kernel) // stride + 1


def conv2d(x: Tensor, kernels: Tensor, *, stride: int = 1, padding: int = 0) -> Tensor:
    """Return the cross-correlation of ``x`` (H x W x Cin) with ``kernels``
        (kh x kw x Cin x Cout) over the zero-padded input.

    Raises:
        ShapeMismatch: If the channel counts disagree.
        InvalidParam: For ``stride < 1``, negative padding, or a kernel larger
            than the padded input.
    """
    if x.ndim != 3 or kernels.ndim != 4:
        raise exceptions.ShapeMismatch(f'conv2d needs HxWxC input and 4-d kernels:'
                                       f' {x.shape!r}, {kernels.shape!r}')
    if stride < 1:
        raise exceptions.InvalidParam(f'invalid stride: {stride!r} (must be >= 1)')
    if padding < 0:
        raise exceptions.InvalidParam(f'invalid padding: {padding!r} (must be >= 0)')

    height, width, channels = x.shape
    kh, kw, cin, cout = kernels.shape
    if cin != channels:
        raise exceptions.ShapeMismatch(f'input has {channels} channels,'
                                       f' kernels expect {cin}')
    if kh > height + 2 * padding or kw > width + 2 * padding:
        raise exceptions.InvalidParam(f'kernel {kh}x{kw} exceeds padded input'
                                      f' {height + 2 * padding}x{width + 2 * padding}')

    out_h = conv_output_extent(height, kh, stride=stride, padding=padding)
    out_w = conv_output_extent(width, kw, stride=stride, padding=padding)
    padded = np.pad(x.values, ((padding, padding), (padding, padding), (0, 0)))
    kv = kernels.values

    def window(i, j):
        return (slice(i, i + stride * (out_h - 1) + 1, stride),
                slice(j, j + stride * (out_w - 1) + 1, stride))

    out = np.zeros((out_h, out_w, cout))
    for i in range(kh):
        for j in range(kw):
            out += padded[window(i, j)] @ kv[i, j]

    def backward(g):
        dpadded = np.zeros_like(padded)
        dkernels = np.zeros_like(kv)
        g_rows = g.reshape(-1, cout)
        for i in range(kh):
            for j in range(kw):
                rows, cols = window(i, j)
                dkernels[i, j] = padded[rows, cols].reshape(-1, cin).T @ g_rows
                dpadded[rows, cols] += g @ kv[i, j].T
        dx = dpadded[padding:padding + height, padding:padding + width]
        return dx, dkernels

    return record(out, (x, kernels), backward)


def maxpool2d(x: Tensor, window: int, stride: typing.Optional[int] = None) -> Tensor:
    """Return the maximum of each ``window x window`` patch per channel.

    The gradient flows to the first maximum in row-major order of each patch.

    >>> maxpool2d(Tensor([[[1], [2]], [[3], [4]]]), 2, 2).values.tolist()
    [[[4.0]]]
    """
    if stride is None:
        stride = window
    if x.ndim != 3:
        raise exceptions.ShapeMismatch(f'maxpool2d needs HxWxC input: {x.shape!r}')
    if window < 1 or stride < 1:
        raise exceptions.InvalidParam(f'invalid window {window!r} or stride {stride!r}'
                                      ' (must be >= 1)')

    height, width, channels = x.shape
    if window > height or window > width:
        raise exceptions.InvalidParam(f'window {window} exceeds input {height}x{width}')

    out_h = conv_output_extent(height, window, stride=stride, padding=0)
    out_w = conv_output_extent(width, window, stride=stride, padding=0)
    patches = np.lib.stride_tricks.sliding_window_view(x.values, (window, window),
                                                       axis=(0, 1))
    patches = patches[::stride, ::stride].reshape(out_h, out_w, channels, window * window)
    argmax = patches.argmax(axis=-1)
    out = np.take_along_axis(patches, argmax[..., np.newaxis], axis=-1)[..., 0]

    oi, oj, oc = np.indices((out_h, out_w, channels))
    rows = oi * stride + argmax // window
    cols = oj * stride + argmax % window

    def backward(g):
        dx = np.zeros(x.shape)
        np.add.at(dx, (rows, cols, oc), g)
        return (dx,)

    return record(out, (x,), backward)
