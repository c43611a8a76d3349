import logging
import pathlib

import pytest

from hncf import exceptions
from hncf.data import (Dataset, InteractionRecord, load_interactions, load_prepared,
                       write_interactions, write_prepared)

import _common


def test_load_interactions(tmp_path):
    path = _common.write_csv(tmp_path / 'interactions.csv',
                             '7,42,1,images/42.ppm,"space, aliens"',
                             '7,43,0,,"say ""hi"""',
                             '8,42,1,images/42.ppm,space')

    dataset = load_interactions(path)

    assert len(dataset) == 3
    assert dataset[0] == InteractionRecord(7, 42, 1, features_text='space, aliens',
                                           image_path='images/42.ppm')
    assert dataset[1].features_text == 'say "hi"'
    assert dataset[1].image_path == ''
    assert dataset.root == tmp_path
    assert (dataset.n_users, dataset.n_items) == (2, 2)


def test_load_interactions_timestamps(tmp_path):
    path = _common.write_csv(tmp_path / 'interactions.csv',
                             '1,1,1,,a,5', '1,2,1,,b,',
                             header=_common.HEADER + ',timestamp')

    assert [r.timestamp for r in load_interactions(path)] == [5, None]


def test_load_interactions_missing_column(tmp_path):
    path = _common.write_csv(tmp_path / 'i.csv', '1,1,1,',
                             header='user_id,item_id,interaction,image_path')
    with pytest.raises(exceptions.MissingColumn, match=r'features_text'):
        load_interactions(path)


@pytest.mark.parametrize('lines, line, match', [
    (['1,1,1,,a', 'x,1,1,,b'], 3, r'user_id is not an integer'),
    (['1,1,2,,a'], 2, r'interaction must be 0 or 1'),
    (['1,-4,1,,a'], 2, r'item_id is negative'),
    (['1,1,1,,a', '1,2,1,,b', '1,3,1,,c,extra'], 4, r''),
])
def test_load_interactions_malformed(tmp_path, lines, line, match):
    path = _common.write_csv(tmp_path / 'i.csv', *lines)
    with pytest.raises(exceptions.MalformedRow, match=match) as e:
        load_interactions(path)

    assert e.value.line == line
    assert str(e.value).startswith(f'line {line}: ')


@pytest.mark.parametrize('header', [None, _common.HEADER])
def test_load_interactions_empty(tmp_path, header):
    path = _common.write_csv(tmp_path / 'i.csv', header=header)
    with pytest.raises(exceptions.EmptyFile):
        load_interactions(path)


def test_write_interactions_rebases_image_paths(tmp_path):
    dataset = Dataset([InteractionRecord(1, 2, 1, features_text='a, "b"',
                                         image_path='images/2.ppm')],
                      root=tmp_path / 'src')

    path = write_interactions(dataset, tmp_path / 'out' / 'interactions.csv')

    text = (tmp_path / 'out' / 'interactions.csv').read_text(
        encoding=_common.EXPECTED_DEFAULT_ENCODING)
    assert text == (f'{_common.HEADER}\n'
                    '1,2,1,../src/images/2.ppm,"a, ""b"""\n')
    reloaded = load_interactions(path)
    assert reloaded.resolve_image(reloaded[0].image_path).resolve() == (
        tmp_path / 'src' / 'images' / '2.ppm').resolve()


def test_write_interactions_timestamp_column(tmp_path):
    dataset = Dataset([InteractionRecord(1, 2, 1, timestamp=3), InteractionRecord(1, 3, 0)])

    path = write_interactions(dataset, tmp_path / 'i.csv')

    assert [r.timestamp for r in load_interactions(path)] == [3, None]


def test_prepared_splits_share_index(tmp_path):
    train = Dataset(_common.records_of((1, 10, 1), (2, 20, 0)))
    test = Dataset(_common.records_of((3, 30, 1), (1, 20, 1)))

    paths = write_prepared(train, test, tmp_path)
    loaded_train, loaded_test = load_prepared(tmp_path)

    assert [pathlib.Path(p).name for p in paths] == ['train.csv', 'test.csv']
    assert loaded_train.user_index == loaded_test.user_index == {1: 0, 2: 1, 3: 2}
    assert loaded_train.item_index == {10: 0, 20: 1, 30: 2}
    assert list(loaded_test) == list(test)


def test_load_prepared_without_test(tmp_path, caplog):
    write_interactions(Dataset(_common.records_of((1, 1, 1))), tmp_path / 'train.csv')

    with caplog.at_level(logging.WARNING, logger='hncf.data.ingest'):
        train, test = load_prepared(tmp_path)

    assert len(train) == 1
    assert len(test) == 0
    assert test.user_index == train.user_index
    assert 'no test records' in caplog.text
