"""Hybrid neural collaborative filtering network and its three variants."""

import dataclasses
import enum
import logging
import typing

import numpy as np

from . import _defaults
from . import _tools
from . import exceptions
from .autodiff import (Tensor, add, matmul, concat, reshape, relu, sigmoid, dropout,
                       verify_mode)
from .encoders import (IdEmbeddingConfig, TextEncoderConfig, ImageEncoderConfig,
                       Vocabulary, TokenSequence,
                       encode_id, encode_text, encode_image,
                       init_id_table, init_text_params, init_image_params)
from .encoders import init
from .encoders.image import image_param_shapes
from .encoders.text import text_param_shapes
from .inputs import EncodedRow

__all__ = ['ModelVariant', 'HncfConfig', 'HncfModel',
           'verify_variant', 'verify_fusion_widths', 'verify_dropout_rate',
           'param_shapes', 'build_model',
           'forward', 'forward_batch', 'predict_batch', 'recommend_top_k']

FUSION_WIDTHS = (256, 128, 64)

DROPOUT_RATE = 0.2

USER_PREFIX = 'user.'

ITEM_PREFIX = 'item.'

TEXT_PREFIX = 'text.'

IMAGE_PREFIX = 'image.'

FUSION_PREFIX = 'fusion.'

OUTPUT_PREFIX = 'output.'


log = logging.getLogger(__name__)


class ModelVariant(str, enum.Enum):
    """Which inputs the network reads."""

    NCF = 'NCF'

    TEXT_NCF = 'TEXT_NCF'

    HYBRID = 'HYBRID'

    @property
    def uses_text(self) -> bool:
        return self is not ModelVariant.NCF

    @property
    def uses_image(self) -> bool:
        return self is ModelVariant.HYBRID


def verify_variant(variant: typing.Union[ModelVariant, str]) -> ModelVariant:
    """Return ``variant`` as :class:`ModelVariant`.

    >>> verify_variant('HYBRID')
    <ModelVariant.HYBRID: 'HYBRID'>

    >>> verify_variant('gmf')  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
        ...
    hncf.exceptions.InvalidConfig: unknown variant: 'gmf'
    """
    try:
        return ModelVariant(variant)
    except ValueError:
        raise exceptions.InvalidConfig(f'unknown variant: {variant!r}'
                                       f' (must be one of {[v.value for v in ModelVariant]!r})')


def verify_fusion_widths(fusion_widths: typing.Sequence[int]) -> None:
    if not fusion_widths:
        raise exceptions.InvalidConfig('fusion_widths must not be empty')
    if any(w < 1 for w in fusion_widths):
        raise exceptions.InvalidConfig(f'invalid fusion_widths: {tuple(fusion_widths)!r}'
                                       ' (must be positive)')


def verify_dropout_rate(rate: float) -> None:
    if not 0 <= rate < 1:
        raise exceptions.InvalidConfig(f'invalid dropout_rate: {rate!r} (must be in [0, 1))')


@dataclasses.dataclass(frozen=True)
class HncfConfig:
    """Variant selector plus every layer dimension of the fused network."""

    variant: ModelVariant

    user_cfg: IdEmbeddingConfig

    item_cfg: IdEmbeddingConfig

    text_cfg: TextEncoderConfig = dataclasses.field(default_factory=TextEncoderConfig)

    image_cfg: ImageEncoderConfig = dataclasses.field(default_factory=ImageEncoderConfig)

    fusion_widths: typing.Tuple[int, ...] = FUSION_WIDTHS

    dropout_rate: float = DROPOUT_RATE

    seed: int = dataclasses.field(default_factory=_defaults.get_default_seed)

    def __post_init__(self) -> None:
        object.__setattr__(self, 'variant', verify_variant(self.variant))
        object.__setattr__(self, 'fusion_widths', tuple(self.fusion_widths))
        verify_fusion_widths(self.fusion_widths)
        verify_dropout_rate(self.dropout_rate)

    @property
    def fusion_input_size(self) -> int:
        """Length of the concatenated encoder outputs."""
        size = self.user_cfg.dim + self.item_cfg.dim
        if self.variant.uses_text:
            size += self.text_cfg.hidden
        if self.variant.uses_image:
            size += self.image_cfg.head_dim
        return size

    def to_dict(self) -> typing.Dict[str, typing.Any]:
        """Return the JSON-serializable form (the vocabulary is stored separately)."""
        text = dataclasses.asdict(self.text_cfg)
        del text['vocab']
        image = dataclasses.asdict(self.image_cfg)
        image['input_shape'] = list(image['input_shape'])
        image['blocks'] = [list(b) for b in image['blocks']]
        return {'variant': self.variant.value,
                'user': dataclasses.asdict(self.user_cfg),
                'item': dataclasses.asdict(self.item_cfg),
                'text': text,
                'image': image,
                'fusion_widths': list(self.fusion_widths),
                'dropout_rate': self.dropout_rate,
                'seed': self.seed}

    @classmethod
    def from_dict(cls, doc: typing.Mapping[str, typing.Any], *,
                  vocab: typing.Optional[Vocabulary] = None) -> 'HncfConfig':
        """Return the config of a :meth:`to_dict` document.

        Raises:
            InvalidConfig: For missing or unknown keys.
        """
        try:
            return cls(variant=doc['variant'],
                       user_cfg=IdEmbeddingConfig(**doc['user']),
                       item_cfg=IdEmbeddingConfig(**doc['item']),
                       text_cfg=TextEncoderConfig(vocab=vocab or Vocabulary(), **doc['text']),
                       image_cfg=ImageEncoderConfig(**doc['image']),
                       fusion_widths=doc['fusion_widths'],
                       dropout_rate=doc['dropout_rate'],
                       seed=doc['seed'])
        except (KeyError, TypeError) as e:
            raise exceptions.InvalidConfig(f'invalid model config: {e}') from e


def param_shapes(cfg: HncfConfig) -> typing.Dict[str, typing.Tuple[int, ...]]:
    """Return the name and shape of every parameter implied by ``cfg``
        in initialization order."""
    shapes = {f'{USER_PREFIX}embedding': (cfg.user_cfg.vocab_size, cfg.user_cfg.dim),
              f'{ITEM_PREFIX}embedding': (cfg.item_cfg.vocab_size, cfg.item_cfg.dim)}
    if cfg.variant.uses_text:
        shapes.update((TEXT_PREFIX + name, shape)
                      for name, shape in text_param_shapes(cfg.text_cfg).items())
    if cfg.variant.uses_image:
        shapes.update((IMAGE_PREFIX + name, shape)
                      for name, shape in image_param_shapes(cfg.image_cfg).items())
    width = cfg.fusion_input_size
    for i, out in enumerate(cfg.fusion_widths):
        shapes[f'{FUSION_PREFIX}dense{i}.weight'] = (width, out)
        shapes[f'{FUSION_PREFIX}dense{i}.bias'] = (out,)
        width = out
    shapes[f'{OUTPUT_PREFIX}weight'] = (width, 1)
    shapes[f'{OUTPUT_PREFIX}bias'] = (1,)
    return shapes


class HncfModel:
    """Config plus the named parameter tensors of the fused network.

    Args:
        config: The network layout.
        params: Parameter tensors by name (see :func:`param_shapes`).
    """

    def __init__(self, config: HncfConfig, params: typing.Mapping[str, Tensor]) -> None:
        expected = param_shapes(config)
        if set(params) != set(expected):
            missing = sorted(set(expected).difference(params))
            unknown = sorted(set(params).difference(expected))
            raise exceptions.InvalidConfig(f'parameters do not match the config:'
                                           f' missing {missing!r}, unknown {unknown!r}')
        for name, shape in expected.items():
            if params[name].shape != shape:
                raise exceptions.ShapeMismatch(f'parameter {name!r}: expected {shape!r},'
                                               f' got {params[name].shape!r}')
        self.config = config
        self.params: typing.Dict[str, Tensor] = {name: params[name] for name in expected}
        self.dropout_rng = _tools.make_rng(config.seed)

    def __repr__(self) -> str:
        return (f'{self.__class__.__name__}({self.config.variant.value},'
                f' <{len(self.params)} tensors, {self.n_values} values>)')

    @property
    def n_values(self) -> int:
        return int(sum(t.size for t in self.params.values()))

    def trainable(self) -> typing.Dict[str, Tensor]:
        """Return the parameters receiving gradient updates."""
        return {name: t for name, t in self.params.items() if t.requires_grad}

    def zero_grad(self) -> None:
        for t in self.params.values():
            t.zero_grad()

    def state(self) -> typing.Dict[str, np.ndarray]:
        """Return copies of all parameter values."""
        return {name: t.numpy() for name, t in self.params.items()}


def build_model(cfg: HncfConfig, rng: typing.Optional[np.random.Generator] = None
                ) -> HncfModel:
    """Return a freshly initialized model (deterministic for ``cfg.seed``).

    Variants that do not read text or images get no parameters for them.
    """
    rng = _tools.make_rng(cfg.seed if rng is None else rng)

    params: typing.Dict[str, Tensor] = {}
    for prefix, id_cfg in [(USER_PREFIX, cfg.user_cfg), (ITEM_PREFIX, cfg.item_cfg)]:
        table = init_id_table(id_cfg, rng)
        table.name = f'{prefix}embedding'
        params[table.name] = table
    if cfg.variant.uses_text:
        params.update(init_text_params(cfg.text_cfg, rng, prefix=TEXT_PREFIX))
    if cfg.variant.uses_image:
        params.update(init_image_params(cfg.image_cfg, rng, prefix=IMAGE_PREFIX))

    width = cfg.fusion_input_size
    layers = [(f'{FUSION_PREFIX}dense{i}.', out) for i, out in enumerate(cfg.fusion_widths)]
    layers.append((OUTPUT_PREFIX, 1))
    for prefix, out in layers:
        weight = init.glorot_uniform(rng, (width, out))
        bias = init.zeros((out,))
        weight.name, bias.name = f'{prefix}weight', f'{prefix}bias'
        params[weight.name] = weight
        params[bias.name] = bias
        width = out

    model = HncfModel(cfg, params)
    log.debug('built %r', model)
    return model


def _features(model: HncfModel, user_id: int, item_id: int,
              text: typing.Optional[TokenSequence],
              image: typing.Union[Tensor, np.ndarray, None]) -> Tensor:
    cfg, params = model.config, model.params
    parts = [encode_id(user_id, params[f'{USER_PREFIX}embedding'], cfg.user_cfg),
             encode_id(item_id, params[f'{ITEM_PREFIX}embedding'], cfg.item_cfg)]
    if cfg.variant.uses_text:
        if text is None:
            raise exceptions.MissingInput(f'{cfg.variant.value} needs text input')
        parts.append(encode_text(text, params, cfg.text_cfg, prefix=TEXT_PREFIX))
    if cfg.variant.uses_image:
        if image is None:
            raise exceptions.MissingInput(f'{cfg.variant.value} needs image input')
        parts.append(encode_image(image, params, cfg.image_cfg, prefix=IMAGE_PREFIX))
    return concat(parts, axis=0)


def _fuse(model: HncfModel, features: Tensor, mode: str,
          rng: np.random.Generator) -> Tensor:
    """Run the dense/dropout stack over ``(batch, fusion_input_size)`` features."""
    params = model.params
    x = features
    for i in range(len(model.config.fusion_widths)):
        prefix = f'{FUSION_PREFIX}dense{i}.'
        x = relu(add(matmul(x, params[f'{prefix}weight']), params[f'{prefix}bias']))
        x = dropout(x, model.config.dropout_rate, mode, rng)
    logits = add(matmul(x, params[f'{OUTPUT_PREFIX}weight']), params[f'{OUTPUT_PREFIX}bias'])
    return reshape(sigmoid(logits), (features.shape[0],))


def forward(model: HncfModel, user_id: int, item_id: int,
            text: typing.Optional[TokenSequence] = None,
            image: typing.Union[Tensor, np.ndarray, None] = None,
            mode: str = 'eval', rng: typing.Optional[np.random.Generator] = None) -> Tensor:
    """Return the interaction probability of dense ``user_id`` and ``item_id``
        as one-element tensor.

    Raises:
        MissingInput: If the variant needs text or image and it is ``None``.
        IndexOutOfRange: For ids outside the embedding tables.
    """
    verify_mode(mode)
    features = _features(model, user_id, item_id, text, image)
    out = _fuse(model, reshape(features, (1, features.size)), mode,
                model.dropout_rng if rng is None else rng)
    return reshape(out, ())


def forward_batch(model: HncfModel, rows: typing.Sequence[EncodedRow], mode: str = 'eval',
                  rng: typing.Optional[np.random.Generator] = None) -> Tensor:
    """Return the probabilities of ``rows`` as ``(len(rows),)`` tensor.

    Encoders run per row, the fusion stack once over the stacked features.
    Errors carry the offending row index in ``row``.
    """
    verify_mode(mode)
    features = []
    for i, row in enumerate(rows):
        try:
            f = _features(model, row.user, row.item, row.tokens, row.image)
        except exceptions.HncfError as e:
            e.row = i
            e.args = (f'row {i}: {e}',)
            raise
        features.append(reshape(f, (1, f.size)))
    return _fuse(model, concat(features, axis=0), mode,
                 model.dropout_rng if rng is None else rng)


def predict_batch(model: HncfModel, rows: typing.Sequence[EncodedRow]) -> typing.List[float]:
    """Return the eval-mode probabilities of ``rows`` in order."""
    if not rows:
        return []
    return forward_batch(model, rows, mode='eval').values.tolist()


def recommend_top_k(model: HncfModel, user_id: int,
                    candidates: typing.Sequence[EncodedRow],
                    k: int = _defaults.K) -> typing.List[typing.Tuple[int, float]]:
    """Return up to ``k`` ``(item, score)`` pairs of dense ``user_id``,
        by descending score, ties by ascending item.

    Raises:
        EmptyCandidates: If ``candidates`` is empty.
        InvalidParam: For ``k < 1`` or a candidate of another user.
    """
    if k < 1:
        raise exceptions.InvalidParam(f'invalid k: {k!r} (must be >= 1)')
    if not candidates:
        raise exceptions.EmptyCandidates(f'no candidate items for user {user_id!r}')
    if any(row.user != user_id for row in candidates):
        raise exceptions.InvalidParam(f'all candidates must belong to user {user_id!r}')
    scores = predict_batch(model, candidates)
    ranked = sorted(zip((row.item for row in candidates), scores),
                    key=lambda pair: (-pair[1], pair[0]))
    return ranked[:k]
