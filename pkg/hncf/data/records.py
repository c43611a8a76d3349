"""Interaction records and the dataset holding them."""

import dataclasses
import os
import pathlib
import typing

from .. import exceptions

__all__ = ['InteractionRecord', 'DatasetStats', 'Dataset', 'build_index']

Index = typing.Mapping[int, int]


@dataclasses.dataclass(frozen=True)
class InteractionRecord:
    """One ``(user, item, interaction)`` row with the item's text and poster path."""

    user_id: int

    item_id: int

    interaction: int

    features_text: str = ''

    image_path: str = ''

    timestamp: typing.Optional[int] = None

    def __post_init__(self) -> None:
        if self.interaction not in (0, 1):
            raise exceptions.InvalidParam(f'invalid interaction: {self.interaction!r}'
                                          ' (must be 0 or 1)')
        if self.user_id < 0 or self.item_id < 0:
            raise exceptions.InvalidParam(f'ids must be non-negative:'
                                          f' ({self.user_id!r}, {self.item_id!r})')
        if self.timestamp is not None and self.timestamp < 0:
            raise exceptions.InvalidParam(f'invalid timestamp: {self.timestamp!r}')


@dataclasses.dataclass(frozen=True)
class DatasetStats:
    """Counts summarizing a list of records."""

    rows: int

    unique_users: int

    unique_items: int

    positives: int

    negatives: int

    @classmethod
    def from_records(cls, records: typing.Sequence[InteractionRecord]) -> 'DatasetStats':
        positives = sum(r.interaction for r in records)
        return cls(rows=len(records),
                   unique_users=len({r.user_id for r in records}),
                   unique_items=len({r.item_id for r in records}),
                   positives=positives,
                   negatives=len(records) - positives)


def build_index(ids: typing.Iterable[int]) -> typing.Dict[int, int]:
    """Return the dense index of the distinct ``ids`` in ascending order.

    >>> build_index([30, 10, 30, 20])
    {10: 0, 20: 1, 30: 2}
    """
    return {raw: dense for dense, raw in enumerate(sorted(set(ids)))}


class Dataset:
    """Immutable sequence of records with raw-id to dense-index maps.

    Args:
        records: The interaction rows.
        user_index: Raw user id to dense index (built from ``records`` if omitted).
        item_index: Raw item id to dense index (built from ``records`` if omitted).
        root: Directory relative ``image_path`` values are resolved against.
    """

    def __init__(self, records: typing.Iterable[InteractionRecord], *,
                 user_index: typing.Optional[Index] = None,
                 item_index: typing.Optional[Index] = None,
                 root: typing.Union[os.PathLike, str, None] = None) -> None:
        self.records: typing.Tuple[InteractionRecord, ...] = tuple(records)

        if user_index is None:
            user_index = build_index(r.user_id for r in self.records)
        if item_index is None:
            item_index = build_index(r.item_id for r in self.records)
        self.user_index: typing.Dict[int, int] = dict(user_index)
        self.item_index: typing.Dict[int, int] = dict(item_index)
        self._check_index()

        self.root = pathlib.Path(root) if root is not None else None

        self.stats = DatasetStats.from_records(self.records)

    def _check_index(self) -> None:
        for name, index, ids in [('user', self.user_index, {r.user_id for r in self.records}),
                                 ('item', self.item_index, {r.item_id for r in self.records})]:
            missing = ids.difference(index)
            if missing:
                raise exceptions.InvalidParam(f'{name} ids missing from index:'
                                              f' {sorted(missing)[:5]!r}')
            if sorted(index.values()) != list(range(len(index))):
                raise exceptions.InvalidParam(f'{name} index must be dense 0..n-1')

    def __repr__(self) -> str:
        return (f'{self.__class__.__name__}(<{self.stats.rows} records,'
                f' {len(self.user_index)} users, {len(self.item_index)} items>)')

    def __len__(self) -> int:
        return len(self.records)

    def __iter__(self) -> typing.Iterator[InteractionRecord]:
        return iter(self.records)

    def __getitem__(self, index: int) -> InteractionRecord:
        return self.records[index]

    def derive(self, records: typing.Iterable[InteractionRecord], *,
               keep_index: bool = True) -> 'Dataset':
        """Return a dataset of ``records`` with the same root,
            sharing this dataset's index space if ``keep_index``."""
        if keep_index:
            return Dataset(records, user_index=self.user_index,
                           item_index=self.item_index, root=self.root)
        return Dataset(records, root=self.root)

    @property
    def n_users(self) -> int:
        """Size of the user index space."""
        return len(self.user_index)

    @property
    def n_items(self) -> int:
        """Size of the item index space."""
        return len(self.item_index)

    def recompute_stats(self) -> DatasetStats:
        return DatasetStats.from_records(self.records)

    def positives_by_user(self) -> typing.Dict[int, typing.Set[int]]:
        """Return the raw item ids with interaction 1 per raw user id."""
        result: typing.Dict[int, typing.Set[int]] = {}
        for r in self.records:
            if r.interaction:
                result.setdefault(r.user_id, set()).add(r.item_id)
        return result

    def items_by_user(self) -> typing.Dict[int, typing.Set[int]]:
        """Return the raw item ids with any row per raw user id."""
        result: typing.Dict[int, typing.Set[int]] = {}
        for r in self.records:
            result.setdefault(r.user_id, set()).add(r.item_id)
        return result

    def item_records(self) -> typing.Dict[int, InteractionRecord]:
        """Return the first record of every raw item id."""
        result: typing.Dict[int, InteractionRecord] = {}
        for r in self.records:
            result.setdefault(r.item_id, r)
        return result

    def resolve_image(self, image_path: str) -> pathlib.Path:
        """Return ``image_path`` resolved against :attr:`root`."""
        path = pathlib.Path(image_path)
        if self.root is not None and not path.is_absolute():
            path = self.root / path
        return path

    def summary(self) -> typing.Dict[str, int]:
        """Return the statistical summary rows of the dataset."""
        return {'rows': self.stats.rows,
                'unique_users': self.stats.unique_users,
                'unique_items': self.stats.unique_items,
                'class_1': self.stats.positives,
                'class_0': self.stats.negatives}
