"""Text cleaning of item features: lowercase, strip special characters, drop stop words."""

import functools
import importlib.resources
import re
import typing

from .. import _defaults

__all__ = ['STOPWORDS_RESOURCE', 'stop_words', 'preprocess_text']

STOPWORDS_RESOURCE = 'stopwords.txt'

SPECIAL_CHARACTERS = re.compile(r'[^a-z0-9\s]')


@functools.lru_cache(maxsize=None)
def stop_words() -> typing.FrozenSet[str]:
    """Return the vendored English stop-word list."""
    text = (importlib.resources.files(__package__)
            .joinpath(STOPWORDS_RESOURCE)
            .read_text(encoding=_defaults.DEFAULT_ENCODING))
    return frozenset(line.strip() for line in text.splitlines() if line.strip())


def preprocess_text(raw: str) -> str:
    """Return ``raw`` lowercased, with special characters replaced by spaces,
        whitespace collapsed, and stop words removed.

    >>> preprocess_text('The Matrix (1999)!')
    'matrix 1999'
    >>> preprocess_text('ACTION')
    'action'
    >>> preprocess_text('')
    ''
    """
    cleaned = SPECIAL_CHARACTERS.sub(' ', raw.lower())
    words = stop_words()
    return ' '.join(token for token in cleaned.split() if token not in words)
