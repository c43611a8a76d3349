"""Read and write the interactions CSV format."""

import csv
import logging
import os
import pathlib
import re
import typing

import pandas as pd

from .. import _defaults
from .. import _tools
from .. import exceptions
from .records import Dataset, InteractionRecord, build_index

__all__ = ['COLUMNS', 'OPTIONAL_COLUMNS', 'TRAIN_FILE', 'TEST_FILE', 'VOCAB_FILE',
           'load_interactions', 'write_interactions',
           'load_prepared', 'write_prepared']

COLUMNS = ('user_id', 'item_id', 'interaction', 'image_path', 'features_text')

OPTIONAL_COLUMNS = ('timestamp',)

TRAIN_FILE = 'train.csv'

TEST_FILE = 'test.csv'

VOCAB_FILE = 'vocab.txt'

PARSER_LINE = re.compile(r'line (\d+)')

HEADER_LINES = 1


log = logging.getLogger(__name__)


def _read_frame(path: typing.Union[os.PathLike, str]) -> pd.DataFrame:
    log.debug('read interactions %r', path)
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False,
                            encoding=_defaults.DEFAULT_ENCODING)
    except pd.errors.EmptyDataError:
        raise exceptions.EmptyFile(f'no header or records in {os.fspath(path)!r}')
    except pd.errors.ParserError as e:
        ma = PARSER_LINE.search(str(e))
        raise exceptions.MalformedRow(int(ma.group(1)) if ma else 0, str(e)) from e

    frame = frame.fillna('')  # short rows

    missing = [c for c in COLUMNS if c not in frame.columns]
    if missing:
        raise exceptions.MissingColumn(f'missing column(s) {missing!r}'
                                       f' in {os.fspath(path)!r}')
    if frame.empty:
        raise exceptions.EmptyFile(f'no records in {os.fspath(path)!r}')
    return frame


def _parse_int(value: str, *, line: int, column: str) -> int:
    try:
        result = int(value)
    except ValueError:
        raise exceptions.MalformedRow(line, f'{column} is not an integer: {value!r}')
    if result < 0:
        raise exceptions.MalformedRow(line, f'{column} is negative: {value!r}')
    return result


def _parse_records(frame: pd.DataFrame) -> typing.List[InteractionRecord]:
    has_timestamp = 'timestamp' in frame.columns
    records = []
    for offset, row in enumerate(frame.to_dict('records')):
        line = offset + HEADER_LINES + 1
        interaction = row['interaction'].strip()
        if interaction not in ('0', '1'):
            raise exceptions.MalformedRow(line, f'interaction must be 0 or 1:'
                                                f' {interaction!r}')
        timestamp = row['timestamp'].strip() if has_timestamp else ''
        records.append(InteractionRecord(
            user_id=_parse_int(row['user_id'].strip(), line=line, column='user_id'),
            item_id=_parse_int(row['item_id'].strip(), line=line, column='item_id'),
            interaction=int(interaction),
            features_text=row['features_text'],
            image_path=row['image_path'],
            timestamp=(_parse_int(timestamp, line=line, column='timestamp')
                       if timestamp else None)))
    return records


def load_interactions(path: typing.Union[os.PathLike, str]) -> Dataset:
    """Return the dataset of the interactions CSV at ``path``
        (image paths relative to its directory).

    Raises:
        MissingColumn: If the header lacks a required column.
        MalformedRow: For the first unparseable row (with its line number).
        EmptyFile: If the file holds no records.
    """
    path = pathlib.Path(path)
    records = _parse_records(_read_frame(path))
    dataset = Dataset(records, root=path.parent)
    log.info('loaded %r: %d records, %d users, %d items', os.fspath(path),
             len(dataset), dataset.n_users, dataset.n_items)
    return dataset


def write_interactions(dataset: Dataset, path: typing.Union[os.PathLike, str]) -> str:
    """Write ``dataset`` as interactions CSV (RFC-4180 quoting) and return the path.

    Relative image paths are rewritten relative to the target directory.
    """
    path = pathlib.Path(path)
    _tools.mkdirs(path)

    def image_path(record: InteractionRecord) -> str:
        if not record.image_path:
            return ''
        resolved = dataset.resolve_image(record.image_path)
        if not resolved.is_absolute() and dataset.root is None:
            return record.image_path
        return pathlib.Path(os.path.relpath(resolved, path.parent)).as_posix()

    columns = list(COLUMNS)
    with_timestamp = any(r.timestamp is not None for r in dataset)
    if with_timestamp:
        columns.append('timestamp')

    rows = [{'user_id': r.user_id, 'item_id': r.item_id, 'interaction': r.interaction,
             'image_path': image_path(r), 'features_text': r.features_text,
             'timestamp': '' if r.timestamp is None else r.timestamp}
            for r in dataset]
    frame = pd.DataFrame(rows, columns=columns)

    log.debug('write interactions %r', os.fspath(path))
    frame.to_csv(path, index=False, quoting=csv.QUOTE_MINIMAL,
                 encoding=_defaults.DEFAULT_ENCODING, lineterminator='\n')
    return os.fspath(path)


def load_prepared(directory: typing.Union[os.PathLike, str]
                  ) -> typing.Tuple[Dataset, Dataset]:
    """Return the ``(train, test)`` datasets written by :func:`write_prepared`,
        sharing one dense index space."""
    directory = pathlib.Path(directory)
    train_records = _parse_records(_read_frame(directory / TRAIN_FILE))
    test_records = []
    try:
        test_records = _parse_records(_read_frame(directory / TEST_FILE))
    except (FileNotFoundError, exceptions.EmptyFile):
        log.warning('no test records in %r', os.fspath(directory))

    both = train_records + test_records
    user_index = build_index(r.user_id for r in both)
    item_index = build_index(r.item_id for r in both)
    train, test = (Dataset(records, user_index=user_index, item_index=item_index,
                           root=directory)
                   for records in (train_records, test_records))
    log.info('loaded %r: %d train, %d test records', os.fspath(directory),
             len(train), len(test))
    return train, test


def write_prepared(train: Dataset, test: Dataset,
                   directory: typing.Union[os.PathLike, str]) -> typing.List[str]:
    """Write ``train.csv`` and ``test.csv`` into ``directory``; return their paths."""
    directory = pathlib.Path(directory)
    return [write_interactions(train, directory / TRAIN_FILE),
            write_interactions(test, directory / TEST_FILE)]
