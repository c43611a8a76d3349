"""Generic re-useable self-contained helper functions."""

import logging
import math
import os
import typing

import numpy as np

__all__ = ['mkdirs',
           'make_rng',
           'ceil_count',
           'seeded_permutation']


log = logging.getLogger(__name__)


def mkdirs(filename: typing.Union[os.PathLike, str], /, *, mode: int = 0o777) -> None:
    """Recursively create directories up to the path of ``filename``
        as needed."""
    dirname = os.path.dirname(filename)
    if not dirname:
        return
    log.debug('os.makedirs(%r)', dirname)
    os.makedirs(dirname, mode=mode, exist_ok=True)


def make_rng(seed: typing.Union[int, np.random.Generator, None], /) -> np.random.Generator:
    """Return a :class:`numpy.random.Generator` for ``seed``
        (passed through if it already is one).

    >>> make_rng(0).integers(10) == make_rng(0).integers(10)
    True
    """
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def ceil_count(fraction: float, n: int, /) -> int:
    """Return ``ceil(fraction * n)`` guarded against float noise.

    >>> ceil_count(0.2, 10)
    2
    >>> ceil_count(0.01, 1000)
    10
    >>> ceil_count(0.0, 7)
    0
    """
    # 0.7 * 10 == 7.000000000000001
    return math.ceil(round(fraction * n, 9))


def seeded_permutation(n: int, seed: typing.Union[int, np.random.Generator, None], /
                       ) -> typing.List[int]:
    """Return a deterministic permutation of ``range(n)`` as list of ints."""
    return [int(i) for i in make_rng(seed).permutation(n)]
