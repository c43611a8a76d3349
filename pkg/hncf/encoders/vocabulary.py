"""Corpus vocabulary with reserved padding, unknown and pooling tokens."""

import collections
import logging
import os
import typing

from .. import _defaults
from .. import _tools
from .. import exceptions

__all__ = ['PAD', 'UNK', 'CLS', 'RESERVED', 'DEFAULT_MAX_VOCAB',
           'Vocabulary', 'build_vocab', 'read_vocab', 'write_vocab']

PAD = 0

UNK = 1

CLS = 2

RESERVED = ('[PAD]', '[UNK]', '[CLS]')

DEFAULT_MAX_VOCAB = 5000


log = logging.getLogger(__name__)


class Vocabulary:
    """Immutable token to id mapping; ids ``0..2`` are reserved.

    >>> vocab = Vocabulary(['action', 'drama'])
    >>> len(vocab), vocab.id('drama'), vocab.id('western')
    (5, 4, 1)
    >>> vocab.token(3)
    'action'
    """

    def __init__(self, tokens: typing.Iterable[str] = ()) -> None:
        self._tokens = tuple(tokens)
        self._ids = {t: i for i, t in enumerate(self._tokens, start=len(RESERVED))}
        if len(self._ids) != len(self._tokens):
            raise exceptions.InvalidConfig('vocabulary tokens must be unique')

    def __repr__(self) -> str:
        return f'{self.__class__.__name__}(<{len(self._tokens)} tokens>)'

    def __len__(self) -> int:
        return len(RESERVED) + len(self._tokens)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Vocabulary):
            return NotImplemented
        return self._tokens == other._tokens

    def __hash__(self) -> int:
        return hash(self._tokens)

    def __contains__(self, token: str) -> bool:
        return token in self._ids

    @property
    def tokens(self) -> typing.Tuple[str, ...]:
        """The non-reserved tokens in id order."""
        return self._tokens

    def id(self, token: str) -> int:
        """Return the id of ``token`` (``UNK`` if unknown)."""
        return self._ids.get(token, UNK)

    def token(self, id: int) -> str:
        if id < len(RESERVED):
            return RESERVED[id]
        return self._tokens[id - len(RESERVED)]


def build_vocab(corpus: typing.Iterable[str], max_vocab: int = DEFAULT_MAX_VOCAB
                ) -> Vocabulary:
    """Return the vocabulary of the ``max_vocab - 3`` most frequent whitespace tokens
        (ties broken lexicographically).

    Raises:
        EmptyCorpus: If ``corpus`` holds no strings.

    >>> build_vocab(['action thriller', 'action drama']).tokens
    ('action', 'drama', 'thriller')
    """
    if max_vocab < len(RESERVED):
        raise exceptions.InvalidParam(f'invalid max_vocab: {max_vocab!r}'
                                      f' (must be >= {len(RESERVED)})')
    counts = collections.Counter()
    n_strings = 0
    for text in corpus:
        n_strings += 1
        counts.update(text.split())
    if not n_strings:
        raise exceptions.EmptyCorpus('cannot build a vocabulary from an empty corpus')

    ranked = sorted(counts.items(), key=lambda item: (-item[1], item[0]))
    kept = [token for token, _ in ranked[:max_vocab - len(RESERVED)]]
    log.info('vocabulary: %d of %d distinct tokens kept', len(kept), len(counts))
    return Vocabulary(kept)


def read_vocab(path: typing.Union[os.PathLike, str]) -> Vocabulary:
    """Return the vocabulary stored one token per line in ``path``."""
    log.debug('read vocabulary %r', path)
    with open(path, encoding=_defaults.DEFAULT_ENCODING) as f:
        return Vocabulary(line.rstrip('\n') for line in f if line.rstrip('\n'))


def write_vocab(vocab: Vocabulary, path: typing.Union[os.PathLike, str]) -> str:
    """Write ``vocab`` one token per line (line number = id - 3) and return the path."""
    path = os.fspath(path)
    _tools.mkdirs(path)
    log.debug('write vocabulary %r', path)
    with open(path, 'w', encoding=_defaults.DEFAULT_ENCODING) as f:
        for token in vocab.tokens:
            f.write(f'{token}\n')
    return path
