"""Recall, Hit Ratio @ K, and the leave-one-out protocol."""

import dataclasses
import logging
import typing
import warnings

import numpy as np

from . import _defaults
from . import _tools
from . import exceptions
from .data import Dataset, ImageStore
from .inputs import ItemCatalog, RowEncoder
from .model import HncfConfig, HncfModel, ModelVariant, build_model, predict_batch

if typing.TYPE_CHECKING:  # pragma: no cover
    from .training import TrainConfig

__all__ = ['ConfusionCounts', 'EvalProtocol', 'MetricReport', 'LeaveOneOutCase',
           'Scorer', 'ModelScorer',
           'confusion', 'recall_metric', 'build_leave_one_out', 'hit_ratio_at_k',
           'evaluate_model', 'compare_variants']


log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class ConfusionCounts:
    """Thresholded prediction counts."""

    true_positive: int = 0

    false_negative: int = 0

    true_negative: int = 0

    false_positive: int = 0

    @property
    def total(self) -> int:
        return (self.true_positive + self.false_negative
                + self.true_negative + self.false_positive)


@dataclasses.dataclass(frozen=True)
class EvalProtocol:
    """Rank cutoff ``k``, sampled negatives per user, and the recall threshold."""

    k: int = _defaults.K

    n_negatives: int = _defaults.N_NEGATIVES

    threshold: float = _defaults.THRESHOLD

    seed: int = dataclasses.field(default_factory=_defaults.get_default_seed)

    def __post_init__(self) -> None:
        if self.k < 1:
            raise exceptions.InvalidConfig(f'invalid k: {self.k!r} (must be >= 1)')
        if self.n_negatives < 1:
            raise exceptions.InvalidConfig(f'invalid n_negatives: {self.n_negatives!r}'
                                           ' (must be >= 1)')
        if not 0 < self.threshold < 1:
            raise exceptions.InvalidConfig(f'invalid threshold: {self.threshold!r}'
                                           ' (must be in (0, 1))')


@dataclasses.dataclass(frozen=True)
class MetricReport:

    recall: float

    hit_ratio_at_k: float

    k: int

    hits: int

    users_evaluated: int

    confusion: ConfusionCounts

    def to_json(self) -> typing.Dict[str, typing.Union[int, float]]:
        """Return the flat JSON object of the report."""
        return {'recall': self.recall,
                'hit_ratio_at_k': self.hit_ratio_at_k,
                'k': self.k,
                'hits': self.hits,
                'users_evaluated': self.users_evaluated,
                'tp': self.confusion.true_positive,
                'fn': self.confusion.false_negative,
                'tn': self.confusion.true_negative,
                'fp': self.confusion.false_positive}


class LeaveOneOutCase(typing.NamedTuple):
    """Dense user, its held-out positive item, and sampled negative items."""

    user: int

    positive: int

    negatives: typing.Tuple[int, ...]


class Scorer(typing.Protocol):

    def score(self, user: int, items: typing.Sequence[int]) -> typing.Sequence[float]:
        """Return one score per dense item index for dense ``user``."""


class ModelScorer:
    """Score catalog items for a user through :func:`predict_batch`."""

    def __init__(self, model: HncfModel, encoder: RowEncoder, catalog: ItemCatalog) -> None:
        self.model = model
        self.encoder = encoder
        self.catalog = catalog

    def score(self, user: int, items: typing.Sequence[int]) -> typing.List[float]:
        rows = [self.encoder.encode_candidate(user, item, self.catalog) for item in items]
        return predict_batch(self.model, rows)


def confusion(predictions: typing.Sequence[float], labels: typing.Sequence[int],
              threshold: float = _defaults.THRESHOLD) -> ConfusionCounts:
    """Return the counts of ``predictions >= threshold`` against binary ``labels``.

    >>> confusion([0.9, 0.2], [1, 0], 0.5)
    ConfusionCounts(true_positive=1, false_negative=0, true_negative=1, false_positive=0)
    """
    predicted = np.asarray(predictions, dtype=np.float64).reshape(-1)
    actual = np.asarray(labels).reshape(-1)
    if predicted.shape != actual.shape:
        raise exceptions.ShapeMismatch(f'{predicted.size} predictions'
                                       f' for {actual.size} labels')
    if not np.isin(actual, (0, 1)).all():
        raise exceptions.InvalidParam('labels must be 0 or 1')
    positive = predicted >= threshold
    actual = actual == 1
    return ConfusionCounts(true_positive=int(np.sum(positive & actual)),
                           false_negative=int(np.sum(~positive & actual)),
                           true_negative=int(np.sum(~positive & ~actual)),
                           false_positive=int(np.sum(positive & ~actual)))


def recall_metric(c: ConfusionCounts) -> float:
    """Return ``TP / (TP + FN)`` (0 with a warning if there are no positives).

    >>> recall_metric(ConfusionCounts(true_positive=18, false_negative=7))
    0.72
    """
    denominator = c.true_positive + c.false_negative
    if not denominator:
        warnings.warn('recall over zero positives (TP + FN == 0), reporting 0',
                      category=exceptions.DegenerateDenominatorWarning)
        return 0.0
    return c.true_positive / denominator


def _held_out(items: typing.Iterable[typing.Tuple[typing.Optional[int], int]]) -> int:
    """Return the item of the greatest ``(timestamp, item)``
        (missing timestamps sort first)."""
    return max(items, key=lambda pair: (pair[0] is not None,
                                        pair[0] if pair[0] is not None else 0,
                                        pair[1]))[1]


def build_leave_one_out(dataset: Dataset, protocol: EvalProtocol,
                        seed: typing.Union[int, np.random.Generator, None] = None, *,
                        history: typing.Iterable[Dataset] = (),
                        items: typing.Optional[typing.Iterable[int]] = None
                        ) -> typing.List[LeaveOneOutCase]:
    """Return one case per user with positives in ``dataset`` (dense ids).

    The held-out item is the user's latest positive (greatest item on ties
    or without timestamps). Negatives are drawn without replacement from
    ``items`` (default: the whole item index) minus every positive of the
    user in ``dataset`` and ``history``. Users with fewer candidates than
    ``protocol.n_negatives`` are skipped.

    Raises:
        EmptyDataset: If ``dataset`` has no records.
    """
    if not len(dataset):
        raise exceptions.EmptyDataset('cannot build leave-one-out cases from no records')
    rng = _tools.make_rng(protocol.seed if seed is None else seed)

    pool = sorted(set(dataset.item_index.values()) if items is None else set(items))

    seen: typing.Dict[int, typing.Set[int]] = {}
    for source in (dataset, *history):
        for raw_user, raw_items in source.positives_by_user().items():
            seen.setdefault(source.user_index[raw_user], set()).update(
                source.item_index[i] for i in raw_items)

    latest: typing.Dict[int, typing.List[typing.Tuple[typing.Optional[int], int]]] = {}
    for r in dataset:
        if r.interaction:
            latest.setdefault(dataset.user_index[r.user_id], []).append(
                (r.timestamp, dataset.item_index[r.item_id]))

    cases, skipped = [], 0
    for user in sorted(latest):
        candidates = [item for item in pool if item not in seen[user]]
        if len(candidates) < protocol.n_negatives:
            skipped += 1
            continue
        chosen = rng.choice(len(candidates), size=protocol.n_negatives, replace=False)
        cases.append(LeaveOneOutCase(user=user, positive=_held_out(latest[user]),
                                     negatives=tuple(candidates[i] for i in chosen)))
    if skipped:
        log.warning('leave-one-out: skipped %d of %d users with fewer than %d'
                    ' candidate negatives', skipped, len(latest), protocol.n_negatives)
    log.info('leave-one-out: %d cases', len(cases))
    return cases


def _rank(positive: int, items: typing.Sequence[int], scores: typing.Sequence[float]) -> int:
    """Return the 1-based rank of ``positive`` (descending score, ties by ascending item)."""
    target = scores[list(items).index(positive)]
    return 1 + sum(1 for item, s in zip(items, scores)
                   if s > target or (s == target and item < positive))


def hit_ratio_at_k(scorer: Scorer, cases: typing.Sequence[LeaveOneOutCase],
                   k: int = _defaults.K) -> typing.Tuple[int, int, float]:
    """Return ``(hits, users, hits / users)`` of the held-out items ranked within ``k``.

    Raises:
        EmptyCases: If ``cases`` is empty.
    """
    if k < 1:
        raise exceptions.InvalidParam(f'invalid k: {k!r} (must be >= 1)')
    if not cases:
        raise exceptions.EmptyCases('no leave-one-out cases to evaluate')
    hits = 0
    for case in cases:
        items = (case.positive,) + tuple(case.negatives)
        scores = list(scorer.score(case.user, items))
        if len(scores) != len(items):
            raise exceptions.ShapeMismatch(f'{len(scores)} scores for {len(items)} items')
        hits += _rank(case.positive, items, scores) <= k
    log.debug('hit ratio @ %d: %d of %d', k, hits, len(cases))
    return hits, len(cases), hits / len(cases)


def _row_predictions(scorer: Scorer, dataset: Dataset) -> typing.List[float]:
    by_user: typing.Dict[int, typing.List[int]] = {}
    for position, r in enumerate(dataset):
        by_user.setdefault(dataset.user_index[r.user_id], []).append(position)
    predictions = [0.0] * len(dataset)
    for user, positions in by_user.items():
        items = [dataset.item_index[dataset[p].item_id] for p in positions]
        for p, score in zip(positions, scorer.score(user, items)):
            predictions[p] = float(score)
    return predictions


def evaluate_model(model_or_scorer: typing.Union[HncfModel, Scorer], test_dataset: Dataset,
                   protocol: typing.Optional[EvalProtocol] = None, *,
                   history: typing.Iterable[Dataset] = (),
                   encoder: typing.Optional[RowEncoder] = None,
                   catalog: typing.Optional[ItemCatalog] = None) -> MetricReport:
    """Return recall over all test rows and Hit Ratio @ K over leave-one-out cases.

    Args:
        model_or_scorer: Model (scored through ``encoder`` and ``catalog``) or scorer.
        test_dataset: Rows for recall, users and held-out items for the cases.
        protocol: Cutoff, negatives, threshold, and seed.
        history: Further datasets (same index space) whose positives are
            excluded from the sampled negatives.
        encoder: Row encoder of the model (built from ``test_dataset`` if omitted).
        catalog: Item features (built from ``test_dataset`` and ``history`` if omitted).

    Raises:
        EmptyDataset: If ``test_dataset`` has no records.
        EmptyCases: If no user has enough candidate negatives.
    """
    if not len(test_dataset):
        raise exceptions.EmptyDataset('cannot evaluate on an empty test dataset')
    protocol = protocol if protocol is not None else EvalProtocol()
    history = list(history)

    if catalog is None:
        catalog = ItemCatalog.from_datasets(test_dataset, *history)
    if isinstance(model_or_scorer, HncfModel):
        if encoder is None:
            encoder = RowEncoder.for_model(model_or_scorer.config, test_dataset)
        scorer = ModelScorer(model_or_scorer, encoder, catalog)
    else:
        scorer = model_or_scorer

    labels = [r.interaction for r in test_dataset]
    counts = confusion(_row_predictions(scorer, test_dataset), labels, protocol.threshold)
    recall = recall_metric(counts)

    cases = build_leave_one_out(test_dataset, protocol, history=history,
                                items=catalog.items())
    hits, users, ratio = hit_ratio_at_k(scorer, cases, protocol.k)

    report = MetricReport(recall=recall, hit_ratio_at_k=ratio, k=protocol.k,
                          hits=hits, users_evaluated=users, confusion=counts)
    log.info('recall %.4f, hit ratio @ %d %.4f over %d users',
             recall, protocol.k, ratio, users)
    return report


def compare_variants(base: HncfConfig, train: Dataset, test: Dataset,
                     train_cfg: 'TrainConfig',
                     protocol: typing.Optional[EvalProtocol] = None, *,
                     variants: typing.Iterable[ModelVariant] = tuple(ModelVariant),
                     on_epoch: typing.Optional[typing.Callable] = None
                     ) -> typing.Dict[ModelVariant, MetricReport]:
    """Train and evaluate each variant of ``base`` on the same split and seeds.

    ``train`` and ``test`` must share one index space.
    """
    from .training import fit

    catalog = ItemCatalog.from_datasets(train, test)
    image_store = ImageStore(train.root, target_shape=base.image_cfg.input_shape)

    reports = {}
    for variant in variants:
        cfg = dataclasses.replace(base, variant=variant)
        model = build_model(cfg)
        encoder = RowEncoder.for_model(cfg, train, image_store=image_store)
        log.info('compare: training %s', variant.value)
        fit(model, train, train_cfg, encoder=encoder, on_epoch=on_epoch)
        reports[variant] = evaluate_model(model, test, protocol, history=[train],
                                          encoder=encoder, catalog=catalog)
    return reports
