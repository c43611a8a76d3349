"""Commonly used exception and warning classes."""

__all__ = ['HncfError',
           'ShapeMismatch', 'InvalidParam', 'InvalidConfig', 'IndexOutOfRange',
           'NotOnTape', 'NonFiniteGradient', 'MissingInput',
           'EmptyCandidates', 'EmptyCorpus', 'EmptyDataset', 'EmptyCases',
           'DataError', 'MissingColumn', 'MalformedRow', 'EmptyFile',
           'DecodeError', 'ExhaustedCandidates',
           'CheckpointError', 'BadMagic', 'UnsupportedVersion', 'CorruptDirectory',
           'DegenerateDenominatorWarning']


class HncfError(Exception):
    """Base class of all errors raised by this package."""


class ShapeMismatch(HncfError, ValueError):
    """:exc:`ValueError` raised if tensor shapes disagree."""


class InvalidParam(HncfError, ValueError):
    """:exc:`ValueError` raised if a numeric parameter is out of its range."""


class InvalidConfig(HncfError, ValueError):
    """:exc:`ValueError` raised if a configuration object or document is invalid."""


class IndexOutOfRange(HncfError, IndexError):
    """:exc:`IndexError` raised if an id is outside of its index space."""

    def __init__(self, index: int, size: int) -> None:
        super().__init__(f'id {index!r} out of range (must be 0 <= id < {size})')
        self.index = index
        self.size = size


class NotOnTape(HncfError, RuntimeError):
    """:exc:`RuntimeError` raised if backward is called for a tensor
        that was not recorded on the given tape."""


class NonFiniteGradient(HncfError, FloatingPointError):
    """:exc:`FloatingPointError` raised if a gradient contains NaN or Inf."""

    def __init__(self, name: str, *, context: str = '') -> None:
        msg = f'non-finite gradient for parameter {name!r}'
        if context:
            msg = f'{msg} ({context})'
        super().__init__(msg)
        self.name = name


class MissingInput(HncfError, ValueError):
    """:exc:`ValueError` raised if a model variant needs an absent modality."""


class EmptyCandidates(HncfError, ValueError):
    """:exc:`ValueError` raised if there is nothing to rank."""


class EmptyCorpus(HncfError, ValueError):
    """:exc:`ValueError` raised if a vocabulary is built from no text."""


class EmptyDataset(HncfError, ValueError):
    """:exc:`ValueError` raised if an operation needs at least one record."""


class EmptyCases(HncfError, ValueError):
    """:exc:`ValueError` raised if no leave-one-out case is given."""


class DataError(HncfError, ValueError):
    """:exc:`ValueError` raised for unusable input data."""


class MissingColumn(DataError):
    """:exc:`DataError` raised if the interactions header lacks a column."""


class MalformedRow(DataError):
    """:exc:`DataError` raised for an unparseable interactions row."""

    def __init__(self, line: int, reason: str) -> None:
        super().__init__(f'line {line}: {reason}')
        self.line = line


class EmptyFile(DataError):
    """:exc:`DataError` raised if a data file holds no records."""


class DecodeError(DataError):
    """:exc:`DataError` raised if an image file cannot be decoded."""


class ExhaustedCandidates(DataError):
    """:exc:`DataError` raised if a user has interacted with every item."""

    def __init__(self, user: int) -> None:
        super().__init__(f'user {user!r} has no item left to sample negatives from')
        self.user = user


class CheckpointError(HncfError, ValueError):
    """:exc:`ValueError` raised for unreadable checkpoint files."""


class BadMagic(CheckpointError):
    """:exc:`CheckpointError` raised if the file does not start with ``b'HNCF'``."""


class UnsupportedVersion(CheckpointError):
    """:exc:`CheckpointError` raised for an unknown format version."""


class CorruptDirectory(CheckpointError):
    """:exc:`CheckpointError` raised if the header or tensor directory
        is truncated, overlapping, or out of bounds."""


class DegenerateDenominatorWarning(RuntimeWarning):
    """:exc:`RuntimeWarning` raised if a metric is computed over zero positives."""
