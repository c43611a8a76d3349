import functools
import os

import numpy as np
import pytest

from hncf import _tools

import _common


def itertree(root):
    for path, dirs, files in os.walk(root):
        base = os.path.relpath(path, root)
        rel_path = functools.partial(os.path.join, base if base != '.' else '')
        for is_file, names in enumerate((dirs, files)):
            for n in names:
                yield bool(is_file), rel_path(n).replace('\\', '/')


def test_mkdirs_invalid(tmp_path):
    with _common.as_cwd(tmp_path):
        (tmp_path / 'model.ckpt').write_bytes(b'')
        with pytest.raises(OSError):
            _tools.mkdirs('model.ckpt/weights')


def test_mkdirs(tmp_path):
    with _common.as_cwd(tmp_path):
        _tools.mkdirs('model.ckpt')
        assert list(itertree(str(tmp_path))) == []
        for _ in range(2):
            _tools.mkdirs('runs/first/model.ckpt')
            assert list(itertree(str(tmp_path))) == [(False, 'runs'),
                                                     (False, 'runs/first')]


@pytest.mark.parametrize('fraction, n, expected', [(0.7, 10, 7), (0.3, 10, 3), (0.25, 10, 3),
                                                   (0.2, 1, 1), (0.0, 5, 0), (0.5, 0, 0)])
def test_ceil_count(fraction, n, expected):
    assert _tools.ceil_count(fraction, n) == expected


def test_make_rng_passes_generator_through(rng):
    assert _tools.make_rng(rng) is rng


def test_seeded_permutation():
    order = _tools.seeded_permutation(20, 3)

    assert sorted(order) == list(range(20))
    assert order == _tools.seeded_permutation(20, np.random.default_rng(3))
    assert all(type(i) is int for i in order)
