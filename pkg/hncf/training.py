"""Adam optimization of the binary cross-entropy with a validation split."""

import concurrent.futures
import dataclasses
import logging
import time
import typing

import numpy as np

from . import _defaults
from . import _tools
from . import exceptions
from .autodiff import Tape, Tensor, bce_loss
from .data import Dataset, InteractionRecord
from .data.sampling import split_tail
from .evaluation import confusion, recall_metric
from .inputs import EncodedRow, RowEncoder
from .model import HncfModel, forward_batch, predict_batch

__all__ = ['TrainConfig', 'AdamState', 'EpochMetrics', 'BatchGenerator',
           'adam_step', 'split_train_validation', 'fit']

Batch = typing.Tuple[typing.List[EncodedRow], np.ndarray]


log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class TrainConfig:
    """Optimizer and loop settings.

    >>> TrainConfig(batch_size=0)  # doctest: +IGNORE_EXCEPTION_DETAIL
    Traceback (most recent call last):
        ...
    hncf.exceptions.InvalidConfig: invalid batch_size: 0
    """

    learning_rate: float = _defaults.LEARNING_RATE

    batch_size: int = _defaults.BATCH_SIZE

    epochs: int = _defaults.EPOCHS

    validation_split: float = _defaults.VALIDATION_SPLIT

    beta1: float = _defaults.BETA1

    beta2: float = _defaults.BETA2

    eps: float = _defaults.ADAM_EPS

    seed: int = dataclasses.field(default_factory=_defaults.get_default_seed)

    shuffle: bool = True

    threshold: float = _defaults.THRESHOLD

    prefetch: int = 0

    def __post_init__(self) -> None:
        if not self.learning_rate > 0:
            raise exceptions.InvalidConfig(f'invalid learning_rate: {self.learning_rate!r}'
                                           ' (must be > 0)')
        if self.batch_size < 1:
            raise exceptions.InvalidConfig(f'invalid batch_size: {self.batch_size!r}'
                                           ' (must be >= 1)')
        if self.epochs < 0:
            raise exceptions.InvalidConfig(f'invalid epochs: {self.epochs!r} (must be >= 0)')
        if not 0 <= self.validation_split < 1:
            raise exceptions.InvalidConfig(f'invalid validation_split:'
                                           f' {self.validation_split!r} (must be in [0, 1))')
        for name in ('beta1', 'beta2'):
            if not 0 <= getattr(self, name) < 1:
                raise exceptions.InvalidConfig(f'invalid {name}: {getattr(self, name)!r}'
                                               ' (must be in [0, 1))')
        if not self.eps > 0:
            raise exceptions.InvalidConfig(f'invalid eps: {self.eps!r} (must be > 0)')
        if self.prefetch < 0:
            raise exceptions.InvalidConfig(f'invalid prefetch: {self.prefetch!r}'
                                           ' (must be >= 0)')


@dataclasses.dataclass
class AdamState:
    """First and second moment buffers per parameter name and the step counter."""

    m: typing.Dict[str, np.ndarray] = dataclasses.field(default_factory=dict)

    v: typing.Dict[str, np.ndarray] = dataclasses.field(default_factory=dict)

    t: int = 0

    @classmethod
    def for_params(cls, params: typing.Mapping[str, Tensor]) -> 'AdamState':
        return cls(m={name: np.zeros(p.shape) for name, p in params.items()},
                   v={name: np.zeros(p.shape) for name, p in params.items()})


@dataclasses.dataclass(frozen=True)
class EpochMetrics:

    epoch: int

    train_loss: float

    val_loss: typing.Optional[float]

    val_recall: typing.Optional[float]

    seconds: float

    def to_json(self) -> typing.Dict[str, typing.Union[int, float, None]]:
        return dataclasses.asdict(self)


def adam_step(params: typing.Mapping[str, Tensor],
              grads: typing.Mapping[str, typing.Optional[np.ndarray]],
              state: AdamState, cfg: TrainConfig) -> None:
    """Apply one bias-corrected Adam update to ``params`` in place.

    A missing or ``None`` gradient counts as zero.

    Raises:
        NonFiniteGradient: Before any update if a gradient holds NaN or Inf.
    """
    for name, grad in grads.items():
        if grad is not None and not np.isfinite(grad).all():
            raise exceptions.NonFiniteGradient(name)

    state.t += 1
    correction1 = 1 - cfg.beta1 ** state.t
    correction2 = 1 - cfg.beta2 ** state.t
    for name, p in params.items():
        grad = grads.get(name)
        if grad is None:
            grad = np.zeros(p.shape)
        if name not in state.m:
            state.m[name] = np.zeros(p.shape)
            state.v[name] = np.zeros(p.shape)
        m = state.m[name] = cfg.beta1 * state.m[name] + (1 - cfg.beta1) * grad
        v = state.v[name] = cfg.beta2 * state.v[name] + (1 - cfg.beta2) * grad * grad
        p.values -= cfg.learning_rate * (m / correction1) / (np.sqrt(v / correction2)
                                                             + cfg.eps)


def split_train_validation(dataset: Dataset,
                           fraction: float = _defaults.VALIDATION_SPLIT,
                           seed: typing.Union[int, np.random.Generator, None] = None
                           ) -> typing.Tuple[Dataset, Dataset]:
    """Return ``(train, validation)`` with the last ``ceil(fraction * n)``
        of the seeded shuffle as validation (index space shared).

    >>> from hncf.data import InteractionRecord
    >>> data = Dataset([InteractionRecord(u, 1, 1) for u in range(10)])
    >>> [len(part) for part in split_train_validation(data, 0.2, seed=1)]
    [8, 2]
    """
    if seed is None:
        seed = _defaults.get_default_seed()
    train, validation = split_tail(dataset.records, fraction, seed)
    return dataset.derive(train), dataset.derive(validation)


class BatchGenerator:
    """Iterate over encoded ``(rows, labels)`` batches of ``records`` in order.

    With ``prefetch > 0`` up to that many batches are encoded ahead
    on a worker thread (batch order is kept).
    """

    def __init__(self, encoder: RowEncoder, records: typing.Sequence[InteractionRecord],
                 batch_size: int, *, prefetch: int = 0) -> None:
        self.encoder = encoder
        self.records = records
        self.batch_size = batch_size
        self.prefetch = prefetch

    def __len__(self) -> int:
        return -(-len(self.records) // self.batch_size)

    def _chunks(self) -> typing.Iterator[typing.Sequence[InteractionRecord]]:
        for start in range(0, len(self.records), self.batch_size):
            yield self.records[start:start + self.batch_size]

    def __iter__(self) -> typing.Iterator[Batch]:
        if not self.prefetch:
            for chunk in self._chunks():
                yield self.encoder.encode_many(chunk)
            return

        with concurrent.futures.ThreadPoolExecutor(max_workers=1) as executor:
            pending = []
            for chunk in self._chunks():
                pending.append(executor.submit(self.encoder.encode_many, chunk))
                if len(pending) > self.prefetch:
                    yield pending.pop(0).result()
            for future in pending:
                yield future.result()


def _validate(model: HncfModel, encoder: RowEncoder, validation: Dataset,
              threshold: float) -> typing.Tuple[typing.Optional[float], typing.Optional[float]]:
    if not len(validation):
        return None, None
    rows, labels = encoder.encode_many(validation)
    predictions = predict_batch(model, rows)
    loss = bce_loss(Tensor(predictions), labels).item()
    recall = recall_metric(confusion(predictions, labels.astype(int), threshold))
    return loss, recall


def fit(model: HncfModel, dataset: Dataset, cfg: TrainConfig, *,
        encoder: typing.Optional[RowEncoder] = None,
        on_epoch: typing.Optional[typing.Callable[[EpochMetrics], None]] = None
        ) -> typing.List[EpochMetrics]:
    """Train ``model`` in place and return the metrics of every epoch.

    Args:
        model: Network to train (parameters updated in place).
        dataset: Labelled rows; the validation split is taken from these.
        cfg: Optimizer and loop settings.
        encoder: Row encoder (built for ``model`` over ``dataset`` if omitted).
        on_epoch: Called with each :class:`EpochMetrics` as it completes.

    Raises:
        EmptyDataset: If ``dataset`` (or its training part) has no records.
        NonFiniteGradient: With epoch and batch context.
    """
    if not len(dataset):
        raise exceptions.EmptyDataset('cannot fit on an empty dataset')
    if not cfg.epochs:
        return []
    if encoder is None:
        encoder = RowEncoder.for_model(model.config, dataset)

    rng = _tools.make_rng(cfg.seed)
    train, validation = split_train_validation(dataset, cfg.validation_split, rng)
    if not len(train):
        raise exceptions.EmptyDataset(f'no training rows left after validation split'
                                      f' {cfg.validation_split!r} of {len(dataset)} rows')
    log.info('fit %s: %d train, %d validation rows, %d epochs',
             model.config.variant.value, len(train), len(validation), cfg.epochs)

    params = model.trainable()
    state = AdamState.for_params(params)
    history = []
    for epoch in range(cfg.epochs):
        start = time.perf_counter()
        order = (_tools.seeded_permutation(len(train), rng) if cfg.shuffle
                 else range(len(train)))
        records = [train[i] for i in order]

        total = 0.0
        batches = BatchGenerator(encoder, records, cfg.batch_size, prefetch=cfg.prefetch)
        for b, (rows, labels) in enumerate(batches):
            with Tape() as tape:
                loss = bce_loss(forward_batch(model, rows, mode='train', rng=rng), labels)
            tape.backward(loss)
            grads = {name: p.grad for name, p in params.items()}
            try:
                adam_step(params, grads, state, cfg)
            except exceptions.NonFiniteGradient as e:
                raise exceptions.NonFiniteGradient(e.name, context=f'epoch {epoch},'
                                                                   f' batch {b}') from e
            finally:
                model.zero_grad()
            total += loss.item() * len(rows)
            log.debug('epoch %d batch %d: loss %.6f', epoch, b, loss.item())

        val_loss, val_recall = _validate(model, encoder, validation, cfg.threshold)
        metrics = EpochMetrics(epoch=epoch, train_loss=total / len(train),
                               val_loss=val_loss, val_recall=val_recall,
                               seconds=time.perf_counter() - start)
        log.info('epoch %d: train loss %.4f, validation loss %s', epoch,
                 metrics.train_loss, 'n/a' if val_loss is None else f'{val_loss:.4f}')
        history.append(metrics)
        if on_epoch is not None:
            on_epoch(metrics)
    return history
