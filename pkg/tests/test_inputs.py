import numpy as np
import pytest

from hncf import exceptions
from hncf.checks import tiny_config
from hncf.data import Dataset, ImageStore, InteractionRecord
from hncf.inputs import CatalogEntry, EncodedRow, ItemCatalog, RowEncoder
from hncf.model import ModelVariant

import _common


def test_encoded_row_equality_ignores_image():
    assert EncodedRow(1, 2, image=np.zeros(3)) == EncodedRow(1, 2, image=np.ones(3))
    assert EncodedRow(1, 2) != EncodedRow(1, 3)


def test_item_catalog_first_occurrence_wins():
    train = Dataset([InteractionRecord(1, 5, 1, features_text='first', image_path='5.ppm'),
                     InteractionRecord(2, 5, 0, features_text='second')])
    test = train.derive([InteractionRecord(1, 5, 1, features_text='third')])

    catalog = ItemCatalog.from_datasets(test, train)

    assert len(catalog) == 1
    assert 0 in catalog
    assert catalog[0] == CatalogEntry(5, 'third', '')
    assert repr(catalog) == 'ItemCatalog(<1 items>)'


def test_item_catalog_unknown_item():
    catalog = ItemCatalog.from_datasets(Dataset(_common.records_of((1, 1, 1))))
    with pytest.raises(exceptions.IndexOutOfRange):
        catalog[1]


@pytest.mark.parametrize('variant, kwargs', [
    (ModelVariant.TEXT_NCF, {}),
    (ModelVariant.HYBRID, {'text_cfg': tiny_config(ModelVariant.HYBRID).text_cfg}),
])
def test_row_encoder_needs_modalities(variant, kwargs):
    with pytest.raises(exceptions.InvalidConfig, match=r'needs'):
        RowEncoder({}, {}, variant=variant, **kwargs)


def test_row_encoder_ncf_encodes_ids_only():
    dataset = Dataset(_common.records_of((10, 7, 1), (20, 3, 0), text='space'))
    encoder = RowEncoder.for_model(tiny_config(ModelVariant.NCF), dataset)

    rows, labels = encoder.encode_many(dataset)

    assert rows == [EncodedRow(0, 1), EncodedRow(1, 0)]
    assert labels.dtype == np.float64
    assert labels.tolist() == [1.0, 0.0]
    assert encoder.raw_item(1) == 7


def test_row_encoder_unknown_ids():
    encoder = RowEncoder({10: 0}, {7: 0}, variant=ModelVariant.NCF)

    with pytest.raises(exceptions.IndexOutOfRange):
        encoder.user(11)
    with pytest.raises(exceptions.IndexOutOfRange):
        encoder.item(8)
    with pytest.raises(exceptions.IndexOutOfRange):
        encoder.raw_item(1)


def test_row_encoder_caches_tokens():
    cfg = tiny_config(ModelVariant.TEXT_NCF)
    encoder = RowEncoder({}, {}, variant=cfg.variant, text_cfg=cfg.text_cfg)

    first = encoder.tokens('action drama')

    assert first is encoder.tokens('action drama')
    assert first.ids[:3] == (2, cfg.text_cfg.vocab.id('action'), cfg.text_cfg.vocab.id('drama'))


def test_row_encoder_hybrid_loads_images(synthetic):
    cfg = tiny_config(ModelVariant.HYBRID)
    encoder = RowEncoder.for_model(cfg, synthetic)

    row = encoder.encode(synthetic[0])

    assert isinstance(encoder.image_store, ImageStore)
    assert row.image.shape == (8, 8, 3)
    assert 0.0 <= row.image.min() and row.image.max() <= 1.0
    assert row.tokens is not None
    assert encoder.image('') is None


def test_encode_candidate_uses_catalog_features(synthetic):
    cfg = tiny_config(ModelVariant.TEXT_NCF)
    encoder = RowEncoder.for_model(cfg, synthetic)
    catalog = ItemCatalog.from_datasets(synthetic)
    item = catalog.items()[-1]

    row = encoder.encode_candidate(0, item, catalog)

    assert (row.user, row.item) == (0, item)
    assert row.tokens == encoder.tokens(catalog[item].features_text)
    assert row.image is None
