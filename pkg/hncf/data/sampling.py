"""Seeded sampling, train/test splitting, and negative generation."""

import logging
import typing

import numpy as np

from .. import _defaults
from .. import _tools
from .. import exceptions
from .records import Dataset, InteractionRecord

__all__ = ['split_tail', 'split_train_test', 'sample_fraction', 'generate_negatives']

Seed = typing.Union[int, np.random.Generator, None]

T = typing.TypeVar('T')


log = logging.getLogger(__name__)


def split_tail(rows: typing.Sequence[T], fraction: float, seed: Seed
               ) -> typing.Tuple[typing.List[T], typing.List[T]]:
    """Shuffle ``rows`` (seeded) and return ``(head, tail)``
        with ``ceil(fraction * n)`` rows in the tail.

    >>> head, tail = split_tail(list(range(10)), 0.2, seed=0)
    >>> len(head), len(tail), sorted(head + tail) == list(range(10))
    (8, 2, True)
    """
    if not 0 <= fraction < 1:
        raise exceptions.InvalidParam(f'invalid fraction: {fraction!r} (must be in [0, 1))')
    order = _tools.seeded_permutation(len(rows), seed)
    n_tail = _tools.ceil_count(fraction, len(rows))
    cut = len(rows) - n_tail
    return [rows[i] for i in order[:cut]], [rows[i] for i in order[cut:]]


def split_train_test(dataset: Dataset, fraction: float = _defaults.TEST_FRACTION,
                     seed: Seed = None) -> typing.Tuple[Dataset, Dataset]:
    """Return ``(train, test)`` sharing the index space of ``dataset``."""
    if seed is None:
        seed = _defaults.get_default_seed()
    train, test = split_tail(dataset.records, fraction, seed)
    log.info('train/test split: %d/%d records', len(train), len(test))
    return dataset.derive(train), dataset.derive(test)


def sample_fraction(dataset: Dataset, fraction: float, seed: Seed = None) -> Dataset:
    """Return a uniform sample without replacement of ``ceil(fraction * n)`` records
        (original order kept, index rebuilt).

    Raises:
        InvalidParam: Unless ``0 < fraction <= 1``.
    """
    if not 0 < fraction <= 1:
        raise exceptions.InvalidParam(f'invalid fraction: {fraction!r} (must be in (0, 1])')
    if seed is None:
        seed = _defaults.get_default_seed()
    n = len(dataset)
    n_take = _tools.ceil_count(fraction, n)
    chosen = np.sort(_tools.make_rng(seed).choice(n, size=n_take, replace=False))
    log.info('sampled %d of %d records (fraction %g)', n_take, n, fraction)
    return dataset.derive((dataset.records[i] for i in chosen), keep_index=False)


def generate_negatives(dataset: Dataset, ratio: int = _defaults.NEG_RATIO,
                       seed: Seed = None) -> Dataset:
    """Return ``dataset`` plus ``ratio`` interaction-0 records per positive.

    Negative items are drawn uniformly without replacement, per user, from the
    items the user has no row with; they inherit that item's text and image.
    A user with fewer candidates than needed gets all remaining candidates.

    Raises:
        InvalidParam: For negative ``ratio``.
        ExhaustedCandidates: If a user with positives has a row for every item.
    """
    if ratio < 0:
        raise exceptions.InvalidParam(f'invalid ratio: {ratio!r} (must be >= 0)')
    if ratio == 0:
        return dataset
    if seed is None:
        seed = _defaults.get_default_seed()
    rng = _tools.make_rng(seed)

    item_records = dataset.item_records()
    all_items = sorted(item_records)
    seen = dataset.items_by_user()

    needed: typing.Dict[int, int] = {}
    for r in dataset:
        if r.interaction:
            needed[r.user_id] = needed.get(r.user_id, 0) + ratio

    negatives: typing.List[InteractionRecord] = []
    short = 0
    for user, count in needed.items():
        pool = [item for item in all_items if item not in seen[user]]
        if not pool:
            raise exceptions.ExhaustedCandidates(user)
        if count > len(pool):
            short += count - len(pool)
            count = len(pool)
        for i in rng.choice(len(pool), size=count, replace=False):
            source = item_records[pool[i]]
            negatives.append(InteractionRecord(user_id=user, item_id=source.item_id,
                                               interaction=0,
                                               features_text=source.features_text,
                                               image_path=source.image_path))
    if short:
        log.warning('%d negatives short: users ran out of candidate items', short)
    log.info('generated %d negatives for %d positives', len(negatives),
             dataset.stats.positives)
    return dataset.derive(dataset.records + tuple(negatives))
