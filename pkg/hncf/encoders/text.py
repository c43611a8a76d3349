"""Transformer-style text encoder with CLS pooling."""

import dataclasses
import math
import typing

import numpy as np

from .. import exceptions
from ..autodiff import (Tensor, add, matmul, scale, transpose, slice_axis, reshape,
                        relu, softmax, layernorm, concat, embedding_lookup)
from . import init
from .vocabulary import CLS, PAD, Vocabulary

__all__ = ['MASKED_LOGIT', 'FFN_MULTIPLIER',
           'TextEncoderConfig', 'TokenSequence',
           'tokenize', 'init_text_params', 'text_param_shapes', 'encode_text']

MASKED_LOGIT = -1e9

FFN_MULTIPLIER = 4

Params = typing.Mapping[str, Tensor]


@dataclasses.dataclass(frozen=True)
class TextEncoderConfig:
    """Transformer depth ``layers``, width ``hidden``, attention ``heads``,
        and the maximum sequence length ``max_len`` (CLS token included)."""

    vocab: Vocabulary = dataclasses.field(default_factory=Vocabulary)

    layers: int = 2

    hidden: int = 64

    heads: int = 2

    max_len: int = 64

    use_positional: bool = True

    trainable: bool = True

    def __post_init__(self) -> None:
        if self.layers < 0:
            raise exceptions.InvalidConfig(f'invalid layers: {self.layers!r} (must be >= 0)')
        if self.hidden < 1 or self.heads < 1 or self.hidden % self.heads:
            raise exceptions.InvalidConfig(f'hidden {self.hidden!r} must be a positive'
                                           f' multiple of heads {self.heads!r}')
        if self.max_len < 2:
            raise exceptions.InvalidConfig(f'invalid max_len: {self.max_len!r}'
                                           ' (must be >= 2)')

    @property
    def head_dim(self) -> int:
        return self.hidden // self.heads


@dataclasses.dataclass(frozen=True)
class TokenSequence:
    """Fixed-length token ids starting with CLS and the mask of real tokens."""

    ids: typing.Tuple[int, ...]

    attention_mask: typing.Tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.ids) != len(self.attention_mask) or not self.ids:
            raise exceptions.ShapeMismatch('ids and attention_mask must have'
                                           ' the same non-zero length')
        if self.ids[0] != CLS or self.attention_mask[0] != 1:
            raise exceptions.InvalidParam('position 0 must be the unmasked CLS token')
        n_real = sum(self.attention_mask)
        if (any(m != 1 for m in self.attention_mask[:n_real])
                or any(m != 0 for m in self.attention_mask[n_real:])):
            raise exceptions.InvalidParam('padding must be a contiguous masked suffix')

    def __len__(self) -> int:
        return len(self.ids)


def tokenize(text: str, cfg: TextEncoderConfig) -> TokenSequence:
    """Return CLS plus the whitespace tokens of ``text`` mapped through the vocabulary,
        truncated and padded to ``cfg.max_len``.

    >>> from hncf.encoders.vocabulary import Vocabulary
    >>> cfg = TextEncoderConfig(vocab=Vocabulary(['matrix', 'scifi']), max_len=5)
    >>> tokenize('matrix scifi', cfg)
    TokenSequence(ids=(2, 3, 4, 0, 0), attention_mask=(1, 1, 1, 0, 0))
    """
    ids = [CLS] + [cfg.vocab.id(token) for token in text.split()]
    ids = ids[:cfg.max_len]
    n_pad = cfg.max_len - len(ids)
    return TokenSequence(ids=tuple(ids) + (PAD,) * n_pad,
                         attention_mask=(1,) * len(ids) + (0,) * n_pad)


def text_param_shapes(cfg: TextEncoderConfig) -> typing.Dict[str, typing.Tuple[int, ...]]:
    """Return the parameter names (without prefix) and shapes in initialization order."""
    h, inner = cfg.hidden, FFN_MULTIPLIER * cfg.hidden
    shapes = {'token_embedding': (len(cfg.vocab), h)}
    if cfg.use_positional:
        shapes['position_embedding'] = (cfg.max_len, h)
    for b in range(cfg.layers):
        block = f'block{b}'
        for proj in ('query', 'key', 'value', 'output'):
            shapes[f'{block}.attention.{proj}'] = (h, h)
            shapes[f'{block}.attention.{proj}_bias'] = (h,)
        shapes[f'{block}.attention_norm.gamma'] = (h,)
        shapes[f'{block}.attention_norm.beta'] = (h,)
        shapes[f'{block}.ffn.inner'] = (h, inner)
        shapes[f'{block}.ffn.inner_bias'] = (inner,)
        shapes[f'{block}.ffn.outer'] = (inner, h)
        shapes[f'{block}.ffn.outer_bias'] = (h,)
        shapes[f'{block}.ffn_norm.gamma'] = (h,)
        shapes[f'{block}.ffn_norm.beta'] = (h,)
    return shapes


def init_text_params(cfg: TextEncoderConfig, rng: np.random.Generator, *,
                     prefix: str = 'text.') -> typing.Dict[str, Tensor]:
    params = {}
    for name, shape in text_param_shapes(cfg).items():
        if name.endswith('embedding'):
            tensor = init.uniform_embedding(rng, shape, requires_grad=cfg.trainable)
        elif name.endswith('.gamma'):
            tensor = init.ones(shape, requires_grad=cfg.trainable)
        elif name.endswith(('_bias', '.beta')):
            tensor = init.zeros(shape, requires_grad=cfg.trainable)
        else:
            tensor = init.glorot_uniform(rng, shape, requires_grad=cfg.trainable)
        tensor.name = prefix + name
        params[tensor.name] = tensor
    return params


def _dense(x: Tensor, weight: Tensor, bias: Tensor) -> Tensor:
    return add(matmul(x, weight), bias)


def _attention(x: Tensor, params: Params, block: str, mask_bias: Tensor,
               cfg: TextEncoderConfig) -> Tensor:
    q, k, v = (_dense(x, params[f'{block}.attention.{proj}'],
                      params[f'{block}.attention.{proj}_bias'])
               for proj in ('query', 'key', 'value'))
    d = cfg.head_dim
    heads = []
    for h in range(cfg.heads):
        qh, kh, vh = (slice_axis(t, h * d, (h + 1) * d, axis=1) for t in (q, k, v))
        scores = scale(matmul(qh, transpose(kh)), 1.0 / math.sqrt(d))
        weights = softmax(add(scores, mask_bias), axis=-1)
        heads.append(matmul(weights, vh))
    merged = concat(heads, axis=1)
    return _dense(merged, params[f'{block}.attention.output'],
                  params[f'{block}.attention.output_bias'])


def encode_text(seq: TokenSequence, params: Params, cfg: TextEncoderConfig, *,
                prefix: str = 'text.') -> Tensor:
    """Return the final hidden vector (length H) of the CLS position.

    Each block: masked multi-head self-attention, residual, layernorm,
    then relu feed-forward of width 4H, residual, layernorm.
    """
    if len(seq) != cfg.max_len:
        raise exceptions.ShapeMismatch(f'sequence length {len(seq)}'
                                       f' differs from max_len {cfg.max_len}')
    scoped = {name[len(prefix):]: t for name, t in params.items() if name.startswith(prefix)}
    expected = text_param_shapes(cfg)
    for name, shape in expected.items():
        if name not in scoped or scoped[name].shape != shape:
            got = scoped[name].shape if name in scoped else None
            raise exceptions.ShapeMismatch(f'text parameter {prefix}{name}:'
                                           f' expected {shape!r}, got {got!r}')

    x = embedding_lookup(scoped['token_embedding'], seq.ids)
    if cfg.use_positional:
        x = add(x, scoped['position_embedding'])

    mask = np.asarray(seq.attention_mask)
    mask_bias = Tensor(np.where(mask == 1, 0.0, MASKED_LOGIT))

    for b in range(cfg.layers):
        block = f'block{b}'
        attended = _attention(x, scoped, block, mask_bias, cfg)
        x = layernorm(add(x, attended), scoped[f'{block}.attention_norm.gamma'],
                      scoped[f'{block}.attention_norm.beta'])
        hidden = relu(_dense(x, scoped[f'{block}.ffn.inner'], scoped[f'{block}.ffn.inner_bias']))
        ffn = _dense(hidden, scoped[f'{block}.ffn.outer'], scoped[f'{block}.ffn.outer_bias'])
        x = layernorm(add(x, ffn), scoped[f'{block}.ffn_norm.gamma'],
                      scoped[f'{block}.ffn_norm.beta'])

    return reshape(slice_axis(x, 0, 1, axis=0), (cfg.hidden,))
