"""User-id and item-id embedding encoder."""

import dataclasses

import numpy as np

from .. import exceptions
from ..autodiff import Tensor, embedding_lookup, reshape
from . import init

__all__ = ['DEFAULT_DIM', 'IdEmbeddingConfig', 'init_id_table', 'encode_id']

DEFAULT_DIM = 32


@dataclasses.dataclass(frozen=True)
class IdEmbeddingConfig:
    """Size of an id space and the width of its embedding."""

    vocab_size: int

    dim: int = DEFAULT_DIM

    def __post_init__(self) -> None:
        if self.vocab_size < 1:
            raise exceptions.InvalidConfig(f'invalid vocab_size: {self.vocab_size!r}'
                                           ' (must be >= 1)')
        if self.dim < 1:
            raise exceptions.InvalidConfig(f'invalid dim: {self.dim!r} (must be >= 1)')


def init_id_table(cfg: IdEmbeddingConfig, rng: np.random.Generator) -> Tensor:
    return init.uniform_embedding(rng, (cfg.vocab_size, cfg.dim))


def encode_id(id: int, table: Tensor, cfg: IdEmbeddingConfig) -> Tensor:
    """Return the embedding row of ``id`` flattened to a ``dim`` vector.

    Raises:
        IndexOutOfRange: If ``id`` is outside ``[0, vocab_size)``.
    """
    if table.shape != (cfg.vocab_size, cfg.dim):
        raise exceptions.ShapeMismatch(f'table {table.shape!r} does not match'
                                       f' {(cfg.vocab_size, cfg.dim)!r}')
    if not 0 <= id < cfg.vocab_size:
        raise exceptions.IndexOutOfRange(id, cfg.vocab_size)
    return reshape(embedding_lookup(table, [id]), (cfg.dim,))
