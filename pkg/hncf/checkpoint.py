"""Single-file checkpoints: magic, version, JSON header, little-endian float64 payload."""

import json
import logging
import os
import struct
import typing

import numpy as np

from . import _defaults
from . import _tools
from . import exceptions
from .encoders import Vocabulary
from .model import HncfConfig, HncfModel, build_model

__all__ = ['MAGIC', 'VERSION', 'NPZ_SUFFIX',
           'save_checkpoint', 'load_checkpoint', 'read_tensors', 'load_weights']

MAGIC = b'HNCF'

VERSION = 1

NPZ_SUFFIX = '.npz'

PREAMBLE = struct.Struct('<4sIQ')

PAYLOAD_DTYPE = np.dtype('<f8')


log = logging.getLogger(__name__)


def save_checkpoint(model: HncfModel, path: typing.Union[os.PathLike, str]) -> str:
    """Write the config, vocabulary, and all parameters of ``model`` to ``path``
        and return the path."""
    directory, offset, chunks = [], 0, []
    for name, tensor in model.params.items():
        data = np.ascontiguousarray(tensor.values, dtype=PAYLOAD_DTYPE).tobytes()
        directory.append({'name': name, 'shape': list(tensor.shape),
                          'offset': offset, 'nbytes': len(data)})
        chunks.append(data)
        offset += len(data)

    header = json.dumps({'config': model.config.to_dict(),
                         'vocabulary': {'tokens': list(model.config.text_cfg.vocab.tokens)},
                         'tensors': directory},
                        sort_keys=True).encode(_defaults.DEFAULT_ENCODING)

    path = os.fspath(path)
    _tools.mkdirs(path)
    log.debug('write checkpoint %r (%d tensors, %d bytes)', path, len(directory), offset)
    with open(path, 'wb') as f:
        f.write(PREAMBLE.pack(MAGIC, VERSION, len(header)))
        f.write(header)
        for data in chunks:
            f.write(data)
    return path


def _read_header(data: bytes, path: str) -> typing.Tuple[dict, int]:
    if len(data) < len(MAGIC) or data[:len(MAGIC)] != MAGIC:
        raise exceptions.BadMagic(f'not a checkpoint (bad magic): {path!r}')
    if len(data) < PREAMBLE.size:
        raise exceptions.CorruptDirectory(f'truncated checkpoint preamble: {path!r}')
    _, version, header_size = PREAMBLE.unpack_from(data)
    if version != VERSION:
        raise exceptions.UnsupportedVersion(f'unsupported checkpoint version {version!r}'
                                            f' (must be {VERSION}): {path!r}')
    end = PREAMBLE.size + header_size
    if end > len(data):
        raise exceptions.CorruptDirectory(f'truncated checkpoint header: {path!r}')
    try:
        header = json.loads(data[PREAMBLE.size:end].decode(_defaults.DEFAULT_ENCODING))
    except (UnicodeDecodeError, json.JSONDecodeError) as e:
        raise exceptions.CorruptDirectory(f'unreadable checkpoint header: {path!r}') from e
    if not isinstance(header, dict) or not isinstance(header.get('tensors'), list):
        raise exceptions.CorruptDirectory(f'checkpoint header lacks tensors: {path!r}')
    return header, end


def _read_payload(header: dict, payload: memoryview, path: str
                  ) -> typing.Dict[str, np.ndarray]:
    arrays: typing.Dict[str, np.ndarray] = {}
    spans = []
    for entry in header['tensors']:
        try:
            name, shape = entry['name'], tuple(int(n) for n in entry['shape'])
            offset, nbytes = int(entry['offset']), int(entry['nbytes'])
        except (KeyError, TypeError, ValueError) as e:
            raise exceptions.CorruptDirectory(f'invalid tensor entry {entry!r}'
                                              f' in {path!r}') from e
        expected = int(np.prod(shape, dtype=np.int64)) * PAYLOAD_DTYPE.itemsize
        if nbytes != expected or offset < 0 or offset + nbytes > len(payload):
            raise exceptions.CorruptDirectory(f'tensor {name!r} out of bounds'
                                              f' or size mismatch in {path!r}')
        if name in arrays:
            raise exceptions.CorruptDirectory(f'duplicate tensor {name!r} in {path!r}')
        spans.append((offset, offset + nbytes, name))
        arrays[name] = (np.frombuffer(payload[offset:offset + nbytes], dtype=PAYLOAD_DTYPE)
                        .reshape(shape).astype(np.float64))

    spans.sort()
    for (_, end, first), (start, _, second) in zip(spans, spans[1:]):
        if start < end:
            raise exceptions.CorruptDirectory(f'tensors {first!r} and {second!r}'
                                              f' overlap in {path!r}')
    return arrays


def _read(path: typing.Union[os.PathLike, str]
          ) -> typing.Tuple[dict, typing.Dict[str, np.ndarray]]:
    path = os.fspath(path)
    log.debug('read checkpoint %r', path)
    with open(path, 'rb') as f:
        data = f.read()
    header, end = _read_header(data, path)
    return header, _read_payload(header, memoryview(data)[end:], path)


def load_checkpoint(path: typing.Union[os.PathLike, str]) -> HncfModel:
    """Return the model stored in ``path`` by :func:`save_checkpoint`.

    Raises:
        OSError: If the file cannot be read.
        BadMagic: If the file does not start with ``b'HNCF'``.
        UnsupportedVersion: For another format version.
        CorruptDirectory: For truncated, overlapping, missing, or surplus tensors.
    """
    header, arrays = _read(path)
    try:
        vocab = Vocabulary(header['vocabulary']['tokens'])
        config = HncfConfig.from_dict(header['config'], vocab=vocab)
    except (KeyError, TypeError, exceptions.InvalidConfig) as e:
        raise exceptions.CorruptDirectory(f'invalid checkpoint config in'
                                          f' {os.fspath(path)!r}: {e}') from e

    model = build_model(config)
    missing = sorted(set(model.params).difference(arrays))
    surplus = sorted(set(arrays).difference(model.params))
    if missing or surplus:
        raise exceptions.CorruptDirectory(f'checkpoint tensors do not match its config:'
                                          f' missing {missing!r}, surplus {surplus!r}')
    for name, tensor in model.params.items():
        if arrays[name].shape != tensor.shape:
            raise exceptions.CorruptDirectory(f'tensor {name!r} has shape'
                                              f' {arrays[name].shape!r},'
                                              f' config implies {tensor.shape!r}')
        tensor.values = arrays[name]
    log.info('loaded %r from %r', model, os.fspath(path))
    return model


def read_tensors(path: typing.Union[os.PathLike, str]) -> typing.Dict[str, np.ndarray]:
    """Return the named arrays of a checkpoint or ``.npz`` archive."""
    if os.fspath(path).endswith(NPZ_SUFFIX):
        log.debug('read archive %r', path)
        with np.load(path, allow_pickle=False) as archive:
            return {name: archive[name].astype(np.float64) for name in archive.files}
    return _read(path)[1]


def load_weights(model: HncfModel, path: typing.Union[os.PathLike, str], *,
                 prefix: str = '') -> typing.List[str]:
    """Copy same-named tensors under ``prefix`` from ``path`` into ``model``.

    Returns:
        The names of the copied parameters.

    Raises:
        ShapeMismatch: If a same-named tensor has another shape.
    """
    arrays = read_tensors(path)
    copied = []
    for name, tensor in model.params.items():
        if not name.startswith(prefix):
            continue
        if name not in arrays:
            log.warning('no weights for %r in %r', name, os.fspath(path))
            continue
        if arrays[name].shape != tensor.shape:
            raise exceptions.ShapeMismatch(f'weights {name!r}: {arrays[name].shape!r}'
                                           f' differ from parameter {tensor.shape!r}')
        tensor.values = np.array(arrays[name], dtype=np.float64)
        copied.append(name)
    ignored = [name for name in arrays if name.startswith(prefix) and name not in model.params]
    if ignored:
        log.debug('ignored %d unknown tensors: %r', len(ignored), ignored)
    log.info('loaded %d of %d parameters from %r', len(copied),
             sum(name.startswith(prefix) for name in model.params), os.fspath(path))
    return copied
