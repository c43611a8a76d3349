import numpy as np
import pytest

from hncf import exceptions
from hncf.autodiff import Tape, Tensor, grad_check, ops

TOLERANCE = 1e-6


def _weighted(out, seed=0):
    weights = np.random.default_rng(seed).normal(size=out.shape)
    return ops.sum(ops.mul(out, Tensor(weights)))


@pytest.mark.parametrize('mode', ['train', 'eval'])
def test_verify_mode(mode):
    assert ops.verify_mode(mode) is None


def test_verify_mode_invalid():
    with pytest.raises(exceptions.InvalidParam, match=r'unknown mode'):
        ops.verify_mode('test')


def test_matmul_shape_mismatch():
    with pytest.raises(exceptions.ShapeMismatch, match=r'cannot multiply'):
        ops.matmul(Tensor(np.ones((2, 3))), Tensor(np.ones((2, 3))))


def test_add_broadcast_gradient_is_summed():
    x = Tensor(np.ones((3, 2)))
    bias = Tensor([1.0, 2.0], requires_grad=True)
    with Tape() as tape:
        loss = ops.sum(ops.add(x, bias))
    tape.backward(loss)

    assert bias.grad.tolist() == [3.0, 3.0]


def test_add_incompatible_shapes():
    with pytest.raises(exceptions.ShapeMismatch, match=r'cannot add'):
        ops.add(Tensor(np.ones((2, 3))), Tensor(np.ones(2)))


def test_reshape_size_mismatch():
    with pytest.raises(exceptions.ShapeMismatch, match=r'cannot reshape'):
        ops.reshape(Tensor(np.ones(6)), (4, 2))


def test_slice_axis_invalid():
    with pytest.raises(exceptions.InvalidParam, match=r'invalid slice'):
        ops.slice_axis(Tensor(np.ones((2, 4))), 3, 5, axis=1)


def test_transpose_needs_matrix():
    with pytest.raises(exceptions.ShapeMismatch, match=r'matrix'):
        ops.transpose(Tensor(np.ones(3)))


def test_softmax_rows_sum_to_one():
    out = ops.softmax(Tensor([[1000.0, 1000.0], [-5.0, 5.0]]), axis=-1)

    assert np.isfinite(out.values).all()
    np.testing.assert_allclose(out.values.sum(axis=-1), [1.0, 1.0])
    np.testing.assert_allclose(out.values[0], [0.5, 0.5])


def test_sigmoid_extreme_inputs_are_finite():
    out = ops.sigmoid(Tensor([-1000.0, 0.0, 1000.0]))

    assert np.isfinite(out.values).all()
    assert 0.0 < out.values[0] and out.values[2] < 1.0
    np.testing.assert_allclose(out.values, [0.0, 0.5, 1.0], atol=1e-12)


def test_layernorm_normalizes_last_axis():
    x = Tensor([[1.0, 2.0, 3.0, 4.0], [10.0, 10.0, 10.0, 14.0]])
    out = ops.layernorm(x, Tensor.ones((4,)), Tensor.zeros((4,)))

    np.testing.assert_allclose(out.values.mean(axis=-1), [0.0, 0.0], atol=1e-9)
    np.testing.assert_allclose(out.values.std(axis=-1), [1.0, 1.0], rtol=1e-4)


def test_layernorm_parameter_shape_mismatch():
    with pytest.raises(exceptions.ShapeMismatch, match=r'gamma'):
        ops.layernorm(Tensor(np.ones((2, 4))), Tensor.ones((3,)), Tensor.zeros((3,)))


def test_dropout_eval_is_identity():
    x = Tensor(np.ones((4, 4)))
    assert ops.dropout(x, 0.5, 'eval', np.random.default_rng(0)) is x


def test_dropout_train_scales_kept_units():
    out = ops.dropout(Tensor(np.ones((50, 50))), 0.2, 'train', np.random.default_rng(0))

    kept = out.values[out.values != 0]
    np.testing.assert_allclose(kept, 1.25)
    assert 0.7 < kept.size / out.size < 0.9


def test_dropout_train_gradient_uses_same_mask():
    x = Tensor(np.ones((10, 10)), requires_grad=True)
    with Tape() as tape:
        out = ops.dropout(x, 0.5, 'train', np.random.default_rng(3))
        loss = ops.sum(out)
    tape.backward(loss)

    np.testing.assert_array_equal(x.grad, out.values)


@pytest.mark.parametrize('rate', [-0.1, 1.0])
def test_dropout_invalid_rate(rate):
    with pytest.raises(exceptions.InvalidParam, match=r'dropout rate'):
        ops.dropout(Tensor([1.0]), rate, 'train', np.random.default_rng(0))


def test_embedding_lookup_out_of_range():
    with pytest.raises(exceptions.IndexOutOfRange, match=r'id 5 out of range') as e:
        ops.embedding_lookup(Tensor(np.ones((5, 2))), [0, 5])

    assert (e.value.index, e.value.size) == (5, 5)


def test_embedding_lookup_repeated_ids_accumulate():
    table = Tensor(np.zeros((4, 2)), requires_grad=True)
    with Tape() as tape:
        loss = ops.sum(ops.embedding_lookup(table, [1, 3, 1]))
    tape.backward(loss)

    assert table.grad.tolist() == [[0, 0], [2, 2], [0, 0], [1, 1]]


def test_concat_shape_mismatch():
    with pytest.raises(exceptions.ShapeMismatch, match=r'cannot concatenate'):
        ops.concat([Tensor(np.ones((2, 2))), Tensor(np.ones((3, 3)))], axis=0)


def test_bce_loss_clamps_certain_predictions():
    loss = ops.bce_loss(Tensor([0.0, 1.0]), [1.0, 0.0])

    assert np.isfinite(loss.item())
    assert loss.item() > 20


def test_bce_loss_rejects_soft_labels():
    with pytest.raises(exceptions.InvalidParam, match=r'0 or 1'):
        ops.bce_loss(Tensor([0.5]), [0.5])


def test_bce_loss_shape_mismatch():
    with pytest.raises(exceptions.ShapeMismatch):
        ops.bce_loss(Tensor([0.5, 0.5]), [1.0])


@pytest.mark.parametrize('name, f, shape', [
    ('matmul', lambda x: _weighted(ops.matmul(x, Tensor(np.arange(8.0).reshape(4, 2)))), (3, 4)),
    ('transpose', lambda x: _weighted(ops.transpose(x)), (3, 4)),
    ('mean', lambda x: ops.mean(ops.mul(x, x)), (3, 4)),
    ('slice_axis', lambda x: _weighted(ops.slice_axis(x, 1, 3, axis=1)), (3, 4)),
    ('flatten', lambda x: _weighted(ops.flatten(x)), (3, 4)),
    ('sigmoid', lambda x: _weighted(ops.sigmoid(x)), (3, 4)),
    ('softmax', lambda x: _weighted(ops.softmax(x, axis=0)), (3, 4)),
    ('layernorm', lambda x: _weighted(ops.layernorm(x, Tensor.ones((4,)),
                                                    Tensor.zeros((4,)))), (3, 4)),
    ('bce_loss', lambda x: ops.bce_loss(ops.sigmoid(x), [1.0, 0.0, 0.0]), (3,)),
])
def test_grad_check(name, f, shape):
    x = Tensor(np.random.default_rng(1).normal(size=shape))

    assert grad_check(f, x) <= TOLERANCE, name


def test_grad_check_layernorm_parameters():
    x = Tensor(np.random.default_rng(2).normal(size=(3, 4)))
    beta = Tensor(np.random.default_rng(3).normal(size=4))

    assert grad_check(lambda g: _weighted(ops.layernorm(x, g, beta)),
                      Tensor(np.random.default_rng(4).normal(size=4))) <= TOLERANCE


def naive_matmul(a, b):
    m, k = a.shape
    n = b.shape[1]
    out = np.zeros((m, n))
    for i in range(m):
        for j in range(n):
            for p in range(k):
                out[i, j] += a[i, p] * b[p, j]
    return out


@pytest.mark.parametrize('seed', range(20))
def test_matmul_matches_naive_loops(seed):
    rng = np.random.default_rng(seed)
    m, k, n = rng.integers(1, 9, size=3)
    a, b = rng.normal(size=(m, k)), rng.normal(size=(k, n))

    out = ops.matmul(Tensor(a), Tensor(b))

    assert out.shape == (m, n)
    np.testing.assert_allclose(out.values, naive_matmul(a, b), rtol=0, atol=1e-12)
