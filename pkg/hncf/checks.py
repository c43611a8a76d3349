"""Finite-difference verification of every primitive and each model variant."""

import logging
import typing

import numpy as np

from . import _tools
from .autodiff import (Tensor, grad_check, ops, conv2d, maxpool2d)
from .encoders import (IdEmbeddingConfig, ImageEncoderConfig, TextEncoderConfig,
                       Vocabulary, tokenize)
from .inputs import EncodedRow
from .model import HncfConfig, ModelVariant, build_model, forward_batch

__all__ = ['TOLERANCE', 'CheckResult', 'primitive_checks', 'model_checks', 'run_suite']

TOLERANCE = 1e-4

KINK_MARGIN = 0.05

TINY_VOCAB = ('action', 'drama', 'space')


log = logging.getLogger(__name__)


class CheckResult(typing.NamedTuple):

    name: str

    error: float

    @property
    def passed(self) -> bool:
        return self.error <= TOLERANCE


def _away_from_kinks(rng: np.random.Generator, shape: typing.Sequence[int]) -> Tensor:
    values = rng.uniform(KINK_MARGIN, 1.0, size=tuple(shape))
    return Tensor(values * rng.choice([-1.0, 1.0], size=tuple(shape)))


def _weighted(out: Tensor, weights: np.ndarray) -> Tensor:
    return ops.sum(ops.mul(out, Tensor(weights)))


def primitive_checks(rng: np.random.Generator
                     ) -> typing.Dict[str, typing.Tuple[typing.Callable, Tensor]]:
    """Return ``{name: (f, x)}`` of scalar functions over each differentiable primitive."""
    matrix = Tensor(rng.normal(size=(3, 4)))
    other = Tensor(rng.normal(size=(4, 2)))
    row = Tensor(rng.normal(size=(4,)))
    gamma, beta = Tensor(rng.normal(size=(4,))), Tensor(rng.normal(size=(4,)))
    kernels = Tensor(rng.normal(size=(3, 3, 2, 2)))
    table = Tensor(rng.normal(size=(5, 3)))
    image = Tensor(rng.normal(size=(5, 5, 2)))
    labels = np.array([1.0, 0.0, 1.0, 0.0])

    def w(*shape):
        return rng.normal(size=shape)

    w_mm, w_x, w_sm, w_ln, w_cv, w_mp, w_emb, w_cat = (
        w(3, 2), w(3, 4), w(3, 4), w(3, 4), w(5, 5, 2), w(2, 2, 2), w(3, 3), w(3, 6))

    return {
        'matmul': (lambda x: _weighted(ops.matmul(x, other), w_mm), matrix),
        'add': (lambda x: _weighted(ops.add(x, row), w_x), Tensor(rng.normal(size=(3, 4)))),
        'mul': (lambda x: _weighted(ops.mul(x, x), w_x), Tensor(rng.normal(size=(3, 4)))),
        'relu': (lambda x: _weighted(ops.relu(x), w_x), _away_from_kinks(rng, (3, 4))),
        'sigmoid': (lambda x: _weighted(ops.sigmoid(x), w_x), Tensor(rng.normal(size=(3, 4)))),
        'softmax': (lambda x: _weighted(ops.softmax(x, axis=-1), w_sm),
                    Tensor(rng.normal(size=(3, 4)))),
        'layernorm': (lambda x: _weighted(ops.layernorm(x, gamma, beta), w_ln),
                      Tensor(rng.normal(size=(3, 4)))),
        'conv2d': (lambda x: _weighted(conv2d(x, kernels, stride=1, padding=1), w_cv),
                   Tensor(rng.normal(size=(5, 5, 2)))),
        'conv2d.kernels': (lambda k: _weighted(conv2d(image, k, padding=1), w_cv),
                           Tensor(rng.normal(size=(3, 3, 2, 2)))),
        'maxpool2d': (lambda x: _weighted(maxpool2d(x, 2, 2), w_mp),
                      Tensor(rng.permutation(32).reshape(4, 4, 2) / 8.0)),
        'embedding_lookup': (lambda t: _weighted(ops.embedding_lookup(t, [1, 3, 1]), w_emb),
                             table),
        'concat': (lambda x: _weighted(ops.concat([x, ops.scale(x, 2.0)], axis=1), w_cat),
                   Tensor(rng.normal(size=(3, 3)))),
        'bce_loss': (lambda x: ops.bce_loss(ops.sigmoid(x), labels),
                     Tensor(rng.normal(size=(4,)))),
    }


def tiny_config(variant: ModelVariant, *, seed: int = 0) -> HncfConfig:
    """Return the smallest config exercising every layer of ``variant``."""
    return HncfConfig(variant=variant,
                      user_cfg=IdEmbeddingConfig(3, 4),
                      item_cfg=IdEmbeddingConfig(3, 4),
                      text_cfg=TextEncoderConfig(vocab=Vocabulary(TINY_VOCAB), layers=1,
                                                 hidden=8, heads=2, max_len=4),
                      image_cfg=ImageEncoderConfig(input_shape=(8, 8, 3),
                                                   blocks=((2, 1),), frozen_conv=False,
                                                   head_dim=4),
                      fusion_widths=(8,),
                      dropout_rate=0.0,
                      seed=seed)


def model_checks(variant: ModelVariant, rng: np.random.Generator
                 ) -> typing.List[CheckResult]:
    """Return the gradient check of ``bce(forward(...))`` for every parameter of a tiny model."""
    cfg = tiny_config(variant, seed=int(rng.integers(2 ** 31)))
    model = build_model(cfg)
    texts = ['action space', 'drama']
    rows = [EncodedRow(user=u, item=i, tokens=tokenize(texts[n], cfg.text_cfg),
                       image=rng.uniform(KINK_MARGIN, 1.0, size=(8, 8, 3)))
            for n, (u, i) in enumerate([(0, 1), (2, 0)])]
    labels = np.array([1.0, 0.0])

    def loss(_):
        return ops.bce_loss(forward_batch(model, rows, mode='eval'), labels)

    results = []
    for name, tensor in model.params.items():
        results.append(CheckResult(f'{variant.value}:{name}', grad_check(loss, tensor)))
        model.zero_grad()
    return results


def run_suite(seed: int = 0, *, variants: typing.Iterable[ModelVariant] = tuple(ModelVariant)
              ) -> typing.List[CheckResult]:
    """Return the results of all primitive and model gradient checks for ``seed``."""
    rng = _tools.make_rng(seed)
    results = [CheckResult(name, grad_check(f, x))
               for name, (f, x) in primitive_checks(rng).items()]
    for variant in variants:
        results.extend(model_checks(variant, rng))
    failed = [r for r in results if not r.passed]
    log.info('gradient checks: %d of %d passed', len(results) - len(failed), len(results))
    for r in failed:
        log.warning('gradient check failed: %s (relative error %.3g)', r.name, r.error)
    return results
