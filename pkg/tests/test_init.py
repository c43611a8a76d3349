import pytest

import hncf

DEFAULT_SEED = 0


@pytest.mark.parametrize('seed', [-1, 1.5, '1'])
def test_set_default_seed_invalid(seed):
    with pytest.raises(ValueError, match=r'invalid seed'):
        hncf.set_default_seed(seed)


def test_set_default_seed(monkeypatch, *, seed=17, explicit_seed=3):
    assert len({DEFAULT_SEED, seed, explicit_seed}) == 3

    from hncf import _defaults
    assert _defaults.get_default_seed() == DEFAULT_SEED

    # isolate the test
    monkeypatch.setattr('hncf._defaults._seed', DEFAULT_SEED)

    assert hncf.TrainConfig().seed == DEFAULT_SEED
    assert hncf.TrainConfig(seed=explicit_seed).seed == explicit_seed

    old = hncf.set_default_seed(seed)
    assert old == DEFAULT_SEED

    assert hncf.TrainConfig().seed == seed
    assert hncf.EvalProtocol().seed == seed
    assert hncf.TrainConfig(seed=explicit_seed).seed == explicit_seed

    old = hncf.set_default_seed(DEFAULT_SEED)
    assert old == seed
    assert hncf.TrainConfig().seed == DEFAULT_SEED


def test_version():
    assert hncf.__version__.startswith('0.')
    assert hncf.__title__ == 'hncf'
