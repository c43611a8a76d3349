"""Decode, resize and normalize poster images (binary PPM)."""

import logging
import os
import pathlib
import threading
import typing

import numpy as np

from .. import _defaults
from .. import _tools
from .. import exceptions
from ..autodiff import Tensor

__all__ = ['MAX_INTENSITY', 'read_ppm', 'write_ppm', 'resize_nearest',
           'preprocess_image', 'ImageStore']

MAX_INTENSITY = 255

PPM_MAGIC = b'P6'


log = logging.getLogger(__name__)


def _header_tokens(data: bytes, count: int) -> typing.Tuple[typing.List[bytes], int]:
    """Return the first ``count`` whitespace separated header tokens
        (skipping ``#`` comments) and the offset after the last one."""
    tokens, pos = [], 0
    while len(tokens) < count:
        while pos < len(data) and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= len(data):
            break
        if data[pos:pos + 1] == b'#':
            end = data.find(b'\n', pos)
            pos = len(data) if end == -1 else end + 1
            continue
        start = pos
        while pos < len(data) and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    return tokens, pos


def read_ppm(path: typing.Union[os.PathLike, str]) -> np.ndarray:
    """Return the ``(height, width, 3)`` uint8 pixels of a binary 8-bit PPM file.

    Raises:
        FileNotFoundError: If ``path`` does not exist.
        DecodeError: If the file is not a valid P6 image with maxval 255.
    """
    log.debug('read image %r', path)
    data = pathlib.Path(path).read_bytes()

    tokens, pos = _header_tokens(data, 4)
    if len(tokens) != 4 or tokens[0] != PPM_MAGIC:
        raise exceptions.DecodeError(f'not a binary PPM (P6) image: {os.fspath(path)!r}')
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise exceptions.DecodeError(f'invalid PPM header in {os.fspath(path)!r}')
    if maxval != MAX_INTENSITY or width < 1 or height < 1:
        raise exceptions.DecodeError(f'unsupported PPM {width}x{height}'
                                     f' maxval {maxval} in {os.fspath(path)!r}')

    pixels = data[pos + 1:pos + 1 + width * height * 3]  # single whitespace after maxval
    if len(pixels) != width * height * 3:
        raise exceptions.DecodeError(f'truncated PPM pixel data in {os.fspath(path)!r}')
    return np.frombuffer(pixels, dtype=np.uint8).reshape(height, width, 3)


def write_ppm(path: typing.Union[os.PathLike, str], pixels: np.ndarray) -> str:
    """Write ``(height, width, 3)`` uint8 ``pixels`` as binary PPM and return the path."""
    pixels = np.asarray(pixels)
    if pixels.ndim != 3 or pixels.shape[2] != 3 or pixels.dtype != np.uint8:
        raise exceptions.ShapeMismatch(f'need (h, w, 3) uint8 pixels:'
                                       f' {pixels.shape!r} {pixels.dtype}')
    path = os.fspath(path)
    _tools.mkdirs(path)
    height, width, _ = pixels.shape
    log.debug('write image %r', path)
    with open(path, 'wb') as f:
        f.write(b'%s\n%d %d\n%d\n' % (PPM_MAGIC, width, height, MAX_INTENSITY))
        f.write(np.ascontiguousarray(pixels).tobytes())
    return path


def resize_nearest(pixels: np.ndarray, height: int, width: int) -> np.ndarray:
    """Return ``pixels`` resampled with source index ``floor(i * src / dst)``.

    >>> board = np.arange(16).reshape(4, 4, 1)
    >>> resize_nearest(board, 2, 2)[..., 0].tolist()
    [[0, 2], [8, 10]]
    """
    src_h, src_w = pixels.shape[:2]
    rows = (np.arange(height) * src_h) // height
    cols = (np.arange(width) * src_w) // width
    return pixels[rows[:, np.newaxis], cols[np.newaxis, :]]


def preprocess_image(path: typing.Union[os.PathLike, str],
                     target_shape: typing.Sequence[int] = _defaults.IMAGE_SHAPE) -> Tensor:
    """Return the image at ``path`` resized to ``target_shape`` with values in ``[0, 1]``."""
    height, width, channels = target_shape
    if channels != 3:
        raise exceptions.InvalidParam(f'invalid target_shape: {tuple(target_shape)!r}'
                                      ' (must have 3 channels)')
    pixels = resize_nearest(read_ppm(path), height, width)
    return Tensor(pixels.astype(np.float64) / MAX_INTENSITY)


class ImageStore:
    """Cache of preprocessed images keyed by resolved path.

    Reads may run concurrently; insertion happens under a lock.
    """

    def __init__(self, root: typing.Union[os.PathLike, str, None] = None, *,
                 target_shape: typing.Sequence[int] = _defaults.IMAGE_SHAPE) -> None:
        self.root = pathlib.Path(root) if root is not None else None
        self.target_shape = tuple(target_shape)
        self._cache: typing.Dict[str, Tensor] = {}
        self._lock = threading.Lock()

    def __len__(self) -> int:
        return len(self._cache)

    def resolve(self, image_path: typing.Union[os.PathLike, str]) -> pathlib.Path:
        path = pathlib.Path(image_path)
        if self.root is not None and not path.is_absolute():
            path = self.root / path
        return path

    def load(self, image_path: typing.Union[os.PathLike, str]) -> Tensor:
        """Return the preprocessed image, decoding it on first use."""
        key = os.fspath(self.resolve(image_path))
        cached = self._cache.get(key)
        if cached is not None:
            return cached
        image = preprocess_image(key, self.target_shape)
        with self._lock:
            return self._cache.setdefault(key, image)
