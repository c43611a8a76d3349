"""pytest markers and fixtures."""

import numpy as np
import pytest

import hncf
from hncf import checks

RUN_SLOW = '--run-slow'

ONLY_SLOW = '--only-slow'


def pytest_configure(config):
    config.addinivalue_line('markers',
                            f'slow(reason): skip unless {RUN_SLOW} is given')


def pytest_collection_modifyitems(config, items):
    only = config.getoption(ONLY_SLOW, None)
    run = only or config.getoption(RUN_SLOW, None)
    for item in items:
        slow_marker = _make_slow_marker(item, run=run, only=only)
        if slow_marker is not None:
            item.add_marker(slow_marker)


def _make_slow_marker(item, *, run: bool = False, only: bool = False):
    slow = any(True for _ in item.iter_markers(name='slow'))

    if only and not slow:
        return pytest.mark.skip(reason=f'skipped by {ONLY_SLOW} flag')
    elif slow and not run:
        return pytest.mark.skip(reason=f'needs {RUN_SLOW} flag')
    return None


@pytest.fixture
def rng():
    return np.random.default_rng(0)


@pytest.fixture(params=list(hncf.ModelVariant), ids=lambda v: f'variant={v.value}')
def variant(request):
    return request.param


@pytest.fixture
def tiny_model(variant):
    return hncf.build_model(checks.tiny_config(variant))


@pytest.fixture
def synthetic(tmp_path):
    """Small two-topic dataset with posters written below ``tmp_path``."""
    dataset, _ = hncf.synth_generate(6, 8, seed=1, directory=tmp_path, pairs_per_user=5,
                                     image_shape=(8, 8, 3))
    return dataset


@pytest.fixture
def sentinel(mocker):
    return mocker.sentinel
