"""Turn interaction records into encoded model inputs."""

import dataclasses
import logging
import typing

import numpy as np

from . import exceptions
from .data import Dataset, ImageStore, InteractionRecord
from .encoders import TextEncoderConfig, TokenSequence, tokenize

if typing.TYPE_CHECKING:  # pragma: no cover
    from .model import HncfConfig, ModelVariant

__all__ = ['EncodedRow', 'CatalogEntry', 'ItemCatalog', 'RowEncoder']


log = logging.getLogger(__name__)


@dataclasses.dataclass(frozen=True)
class EncodedRow:
    """Dense user and item index with the token sequence and normalized image
        (``None`` where the model variant does not read them)."""

    user: int

    item: int

    tokens: typing.Optional[TokenSequence] = None

    image: typing.Optional[np.ndarray] = dataclasses.field(default=None, compare=False)


class CatalogEntry(typing.NamedTuple):

    raw_id: int

    features_text: str

    image_path: str


class ItemCatalog:
    """Text and image path of every dense item index (first occurrence wins).

    >>> from hncf.data import InteractionRecord
    >>> data = Dataset([InteractionRecord(7, 30, 1, 'drama'),
    ...                 InteractionRecord(8, 10, 0, 'comedy'),
    ...                 InteractionRecord(9, 30, 0, 'ignored')])
    >>> catalog = ItemCatalog.from_datasets(data)
    >>> catalog.items()
    [0, 1]
    >>> catalog[1]
    CatalogEntry(raw_id=30, features_text='drama', image_path='')
    """

    @classmethod
    def from_datasets(cls, *datasets: Dataset) -> 'ItemCatalog':
        """Return the catalog over ``datasets`` sharing one item index."""
        entries: typing.Dict[int, CatalogEntry] = {}
        for dataset in datasets:
            for r in dataset:
                dense = dataset.item_index[r.item_id]
                if dense not in entries:
                    entries[dense] = CatalogEntry(r.item_id, r.features_text, r.image_path)
        return cls(entries)

    def __init__(self, entries: typing.Mapping[int, CatalogEntry]) -> None:
        self._entries = dict(sorted(entries.items()))

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(<{len(self)} items>)'

    def __len__(self) -> int:
        return len(self._entries)

    def __contains__(self, item: int) -> bool:
        return item in self._entries

    def __getitem__(self, item: int) -> CatalogEntry:
        try:
            return self._entries[item]
        except KeyError:
            raise exceptions.IndexOutOfRange(item, len(self._entries))

    def items(self) -> typing.List[int]:
        """Return the dense item indices in ascending order."""
        return list(self._entries)


class RowEncoder:
    """Encode records (raw ids) into :class:`EncodedRow` instances (dense ids).

    Args:
        user_index: Raw user id to dense index.
        item_index: Raw item id to dense index.
        variant: Decides which modalities are encoded.
        text_cfg: Tokenizer settings (needed if the variant reads text).
        image_store: Decoded image cache (needed if the variant reads images).
    """

    def __init__(self, user_index: typing.Mapping[int, int],
                 item_index: typing.Mapping[int, int], *,
                 variant: 'ModelVariant',
                 text_cfg: typing.Optional[TextEncoderConfig] = None,
                 image_store: typing.Optional[ImageStore] = None) -> None:
        if variant.uses_text and text_cfg is None:
            raise exceptions.InvalidConfig(f'{variant.value} needs a text_cfg')
        if variant.uses_image and image_store is None:
            raise exceptions.InvalidConfig(f'{variant.value} needs an image_store')
        self.user_index = dict(user_index)
        self.item_index = dict(item_index)
        self._raw_items = {dense: raw for raw, dense in self.item_index.items()}
        self.variant = variant
        self.text_cfg = text_cfg
        self.image_store = image_store
        self._tokens: typing.Dict[str, TokenSequence] = {}

    @classmethod
    def for_model(cls, config: 'HncfConfig', dataset: Dataset, *,
                  image_store: typing.Optional[ImageStore] = None) -> 'RowEncoder':
        """Return the encoder matching ``config`` over the index space of ``dataset``."""
        if config.variant.uses_image and image_store is None:
            image_store = ImageStore(dataset.root, target_shape=config.image_cfg.input_shape)
        return cls(dataset.user_index, dataset.item_index, variant=config.variant,
                   text_cfg=config.text_cfg, image_store=image_store)

    def user(self, raw_id: int) -> int:
        try:
            return self.user_index[raw_id]
        except KeyError:
            raise exceptions.IndexOutOfRange(raw_id, len(self.user_index))

    def item(self, raw_id: int) -> int:
        try:
            return self.item_index[raw_id]
        except KeyError:
            raise exceptions.IndexOutOfRange(raw_id, len(self.item_index))

    def raw_item(self, dense: int) -> int:
        """Return the raw id of the dense item index ``dense``."""
        try:
            return self._raw_items[dense]
        except KeyError:
            raise exceptions.IndexOutOfRange(dense, len(self.item_index))

    def tokens(self, text: str) -> typing.Optional[TokenSequence]:
        if not self.variant.uses_text:
            return None
        seq = self._tokens.get(text)
        if seq is None:
            seq = self._tokens.setdefault(text, tokenize(text, self.text_cfg))
        return seq

    def image(self, image_path: str) -> typing.Optional[np.ndarray]:
        if not self.variant.uses_image or not image_path:
            return None
        return self.image_store.load(image_path).values

    def encode_features(self, user: int, item: int, features_text: str,
                        image_path: str) -> EncodedRow:
        """Return the row of dense ``user`` and ``item`` with the given item features."""
        return EncodedRow(user=user, item=item, tokens=self.tokens(features_text),
                          image=self.image(image_path))

    def encode(self, record: InteractionRecord) -> EncodedRow:
        return self.encode_features(self.user(record.user_id), self.item(record.item_id),
                                    record.features_text, record.image_path)

    def encode_candidate(self, user: int, item: int, catalog: ItemCatalog) -> EncodedRow:
        """Return the row pairing dense ``user`` with catalog item ``item``."""
        entry = catalog[item]
        return self.encode_features(user, item, entry.features_text, entry.image_path)

    def encode_many(self, records: typing.Iterable[InteractionRecord]
                    ) -> typing.Tuple[typing.List[EncodedRow], np.ndarray]:
        """Return the encoded rows and the float labels of ``records``."""
        records = list(records)
        rows = [self.encode(r) for r in records]
        labels = np.array([r.interaction for r in records], dtype=np.float64)
        return rows, labels
