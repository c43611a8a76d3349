"""Run configuration JSON documents (strict schema, defaults for missing keys)."""

import dataclasses
import json
import logging
import os
import typing

from . import _defaults
from . import exceptions
from .encoders import IdEmbeddingConfig, ImageEncoderConfig, TextEncoderConfig, Vocabulary
from .encoders.identity import DEFAULT_DIM
from .encoders.vocabulary import DEFAULT_MAX_VOCAB, RESERVED, build_vocab
from .evaluation import EvalProtocol
from .model import DROPOUT_RATE, FUSION_WIDTHS, HncfConfig, ModelVariant, verify_variant
from .training import TrainConfig

__all__ = ['SCHEMA', 'TextSettings', 'ImageSettings', 'ModelSettings', 'RunConfig',
           'verify_document', 'load_run_config']


log = logging.getLogger(__name__)


class _Kind(typing.NamedTuple):

    name: str

    check: typing.Callable[[typing.Any], bool]


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


INT = _Kind('integer', _is_int)

FLOAT = _Kind('number', lambda v: _is_int(v) or isinstance(v, float))

BOOL = _Kind('boolean', lambda v: isinstance(v, bool))

STRING = _Kind('string', lambda v: isinstance(v, str))

OPTIONAL_STRING = _Kind('string or null', lambda v: v is None or isinstance(v, str))

INT_LIST = _Kind('list of integers',
                 lambda v: isinstance(v, list) and all(_is_int(i) for i in v))

PAIR_LIST = _Kind('list of [channels, convs] pairs',
                  lambda v: isinstance(v, list) and all(isinstance(p, list) and len(p) == 2
                                                        and all(_is_int(i) for i in p)
                                                        for p in v))

SCHEMA = {'seed': INT,
          'data': {'directory': OPTIONAL_STRING,
                   'image_shape': INT_LIST},
          'model': {'variant': STRING,
                    'user_dim': INT,
                    'item_dim': INT,
                    'text': {'layers': INT,
                             'hidden': INT,
                             'heads': INT,
                             'max_len': INT,
                             'max_vocab': INT,
                             'use_positional': BOOL,
                             'trainable': BOOL},
                    'image': {'blocks': PAIR_LIST,
                              'frozen_conv': BOOL,
                              'head_dim': INT},
                    'fusion_widths': INT_LIST,
                    'dropout_rate': FLOAT},
          'train': {'learning_rate': FLOAT,
                    'batch_size': INT,
                    'epochs': INT,
                    'validation_split': FLOAT,
                    'beta1': FLOAT,
                    'beta2': FLOAT,
                    'eps': FLOAT,
                    'shuffle': BOOL,
                    'prefetch': INT},
          'eval': {'k': INT,
                   'n_negatives': INT,
                   'threshold': FLOAT}}


def verify_document(doc: typing.Any, schema: typing.Mapping = SCHEMA, *,
                    path: str = '') -> None:
    """Raise :exc:`InvalidConfig` naming the dotted key path of the first
        unknown key or mistyped value in ``doc``.

    >>> verify_document({'train': {'epochs': 3}})
    >>> verify_document({'train': {'epoch': 3}})  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
        ...
    hncf.exceptions.InvalidConfig: unknown key 'train.epoch'
    """
    if not isinstance(doc, dict):
        raise exceptions.InvalidConfig(f'{path or "document"!s} must be an object')
    for key, value in doc.items():
        dotted = f'{path}.{key}' if path else key
        if key not in schema:
            raise exceptions.InvalidConfig(f'unknown key {dotted!r}'
                                           f' (must be one of {sorted(schema)!r})')
        expected = schema[key]
        if isinstance(expected, dict):
            verify_document(value, expected, path=dotted)
        elif not expected.check(value):
            raise exceptions.InvalidConfig(f'invalid {dotted!r}: {value!r}'
                                           f' (must be {expected.name})')


@dataclasses.dataclass(frozen=True)
class TextSettings:

    layers: int = 2

    hidden: int = 64

    heads: int = 2

    max_len: int = 64

    max_vocab: int = DEFAULT_MAX_VOCAB

    use_positional: bool = True

    trainable: bool = True

    def __post_init__(self) -> None:
        if self.max_vocab < len(RESERVED):
            raise exceptions.InvalidConfig(f'invalid model.text.max_vocab: {self.max_vocab!r}'
                                           f' (must be >= {len(RESERVED)})')


@dataclasses.dataclass(frozen=True)
class ImageSettings:

    blocks: typing.Tuple[typing.Tuple[int, int], ...] = ((8, 2), (16, 2))

    frozen_conv: bool = True

    head_dim: int = 32


@dataclasses.dataclass(frozen=True)
class ModelSettings:
    """Model layout apart from the data-dependent vocabulary and id space sizes."""

    variant: ModelVariant = ModelVariant.HYBRID

    user_dim: int = DEFAULT_DIM

    item_dim: int = DEFAULT_DIM

    text: TextSettings = dataclasses.field(default_factory=TextSettings)

    image: ImageSettings = dataclasses.field(default_factory=ImageSettings)

    fusion_widths: typing.Tuple[int, ...] = FUSION_WIDTHS

    dropout_rate: float = DROPOUT_RATE


@dataclasses.dataclass(frozen=True)
class RunConfig:
    """Everything a ``train``/``evaluate``/``compare`` run needs besides data.

    >>> cfg = RunConfig.from_dict({'seed': 7, 'train': {'epochs': 3}})
    >>> cfg.train.epochs, cfg.train.batch_size, cfg.train.seed, cfg.eval.k
    (3, 8, 7, 10)
    """

    seed: int = dataclasses.field(default_factory=_defaults.get_default_seed)

    data_directory: typing.Optional[str] = None

    image_shape: typing.Tuple[int, int, int] = _defaults.IMAGE_SHAPE

    model: ModelSettings = dataclasses.field(default_factory=ModelSettings)

    train: TrainConfig = dataclasses.field(default_factory=TrainConfig)

    eval: EvalProtocol = dataclasses.field(default_factory=EvalProtocol)

    @classmethod
    def from_dict(cls, doc: typing.Mapping[str, typing.Any]) -> 'RunConfig':
        """Return the config of a JSON document (missing keys take defaults).

        Raises:
            InvalidConfig: For unknown keys, mistyped or out-of-range values.
        """
        verify_document(doc)
        seed = doc.get('seed', _defaults.get_default_seed())
        data = doc.get('data', {})
        model = dict(doc.get('model', {}))

        text = TextSettings(**model.pop('text', {}))
        image = dict(model.pop('image', {}))
        if 'blocks' in image:
            image['blocks'] = tuple(tuple(b) for b in image['blocks'])
        if 'fusion_widths' in model:
            model['fusion_widths'] = tuple(model['fusion_widths'])
        if 'variant' in model:
            model['variant'] = verify_variant(model['variant'])

        image_shape = tuple(data.get('image_shape', _defaults.IMAGE_SHAPE))
        if len(image_shape) != 3:
            raise exceptions.InvalidConfig(f'invalid data.image_shape: {list(image_shape)!r}'
                                           ' (must be [h, w, 3])')

        evaluation = EvalProtocol(seed=seed, **doc.get('eval', {}))
        run = cls(seed=seed,
                  data_directory=data.get('directory'),
                  image_shape=image_shape,
                  model=ModelSettings(text=text, image=ImageSettings(**image), **model),
                  train=TrainConfig(seed=seed, threshold=evaluation.threshold,
                                    **doc.get('train', {})),
                  eval=evaluation)
        run.model_config(Vocabulary(), n_users=1, n_items=1)  # verify layout
        return run

    def to_dict(self) -> typing.Dict[str, typing.Any]:
        """Return the full JSON document of this config."""
        model = dataclasses.asdict(self.model)
        model['variant'] = self.model.variant.value
        model['fusion_widths'] = list(self.model.fusion_widths)
        model['image']['blocks'] = [list(b) for b in self.model.image.blocks]
        train = dataclasses.asdict(self.train)
        del train['seed'], train['threshold']
        evaluation = dataclasses.asdict(self.eval)
        del evaluation['seed']
        return {'seed': self.seed,
                'data': {'directory': self.data_directory,
                         'image_shape': list(self.image_shape)},
                'model': model,
                'train': train,
                'eval': evaluation}

    def build_vocab(self, corpus: typing.Iterable[str]) -> Vocabulary:
        """Return the vocabulary of ``corpus`` capped at ``model.text.max_vocab`` ids.

        >>> run = RunConfig.from_dict({'model': {'text': {'max_vocab': 5}}})
        >>> run.build_vocab(['galaxy story', 'galaxy night', 'romance']).tokens
        ('galaxy', 'night')
        """
        return build_vocab(corpus, self.model.text.max_vocab)

    def cap_vocab(self, vocab: Vocabulary) -> Vocabulary:
        """Return ``vocab`` without the tokens beyond ``model.text.max_vocab`` ids."""
        keep = self.model.text.max_vocab - len(RESERVED)
        if len(vocab.tokens) <= keep:
            return vocab
        log.info('vocabulary capped at %d of %d ids', self.model.text.max_vocab, len(vocab))
        return Vocabulary(vocab.tokens[:keep])

    def model_config(self, vocab: Vocabulary, *, n_users: int, n_items: int) -> HncfConfig:
        """Return the :class:`HncfConfig` for the given vocabulary and id space sizes."""
        m = self.model
        text = dataclasses.asdict(m.text)
        del text['max_vocab']
        return HncfConfig(variant=m.variant,
                          user_cfg=IdEmbeddingConfig(n_users, m.user_dim),
                          item_cfg=IdEmbeddingConfig(n_items, m.item_dim),
                          text_cfg=TextEncoderConfig(vocab=vocab, **text),
                          image_cfg=ImageEncoderConfig(input_shape=self.image_shape,
                                                       blocks=m.image.blocks,
                                                       frozen_conv=m.image.frozen_conv,
                                                       head_dim=m.image.head_dim),
                          fusion_widths=m.fusion_widths,
                          dropout_rate=m.dropout_rate,
                          seed=self.seed)


def load_run_config(path: typing.Union[os.PathLike, str, None]) -> RunConfig:
    """Return the run config of the JSON file at ``path`` (defaults for ``None``)."""
    if path is None:
        return RunConfig.from_dict({})
    log.debug('read run config %r', path)
    with open(path, encoding=_defaults.DEFAULT_ENCODING) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise exceptions.InvalidConfig(f'invalid JSON in {os.fspath(path)!r}: {e}') from e
    return RunConfig.from_dict(doc)
