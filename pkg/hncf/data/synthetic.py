"""Two-topic synthetic interactions with topic-coded text and poster colors."""

import logging
import os
import pathlib
import typing

import numpy as np

from .. import _defaults
from .. import _tools
from .. import exceptions
from .images import MAX_INTENSITY, write_ppm
from .records import Dataset, InteractionRecord

__all__ = ['TOPIC_KEYWORDS', 'TOPIC_COLORS', 'IMAGE_DIR', 'synth_generate']

TOPIC_KEYWORDS = ('galaxy', 'romance')

TOPIC_COLORS = ((40, 60, 200), (200, 50, 40))

FILLER_WORDS = ('story', 'classic', 'feature', 'night', 'city', 'journey',
                'family', 'secret', 'summer', 'legend', 'return', 'dream')

FILLER_PER_ITEM = 3

COLOR_NOISE = 20

IMAGE_DIR = 'images'


log = logging.getLogger(__name__)


def _item_text(topic: int, rng: np.random.Generator) -> str:
    words = list(rng.choice(FILLER_WORDS, size=FILLER_PER_ITEM, replace=False))
    words.insert(int(rng.integers(len(words) + 1)), TOPIC_KEYWORDS[topic])
    return ' '.join(words)


def _item_pixels(topic: int, shape: typing.Sequence[int],
                 rng: np.random.Generator) -> np.ndarray:
    height, width, _ = shape
    noise = rng.integers(-COLOR_NOISE, COLOR_NOISE + 1, size=(height, width, 3))
    pixels = np.asarray(TOPIC_COLORS[topic]) + noise
    return np.clip(pixels, 0, MAX_INTENSITY).astype(np.uint8)


def synth_generate(n_users: int, n_items: int, seed: typing.Optional[int] = None, *,
                   directory: typing.Union[os.PathLike, str],
                   pairs_per_user: int = 10,
                   match_rate: float = 0.9,
                   mismatch_rate: float = 0.1,
                   image_shape: typing.Sequence[int] = _defaults.IMAGE_SHAPE
                   ) -> typing.Tuple[Dataset, typing.List[str]]:
    """Return a synthetic dataset rooted at ``directory`` and the written image files.

    Each item belongs to one of two topics (balanced, shuffled against the ids):
    its text holds exactly one topic keyword and its poster is a noisy image
    in the topic color. Each user prefers one topic and is paired with
    ``min(pairs_per_user, n_items)`` distinct items; a pair is labelled 1 with
    probability ``match_rate`` on topic match, ``mismatch_rate`` otherwise.
    Timestamps are the pair positions within the user's sequence.

    Raises:
        InvalidParam: For fewer than two users or items, or rates outside ``[0, 1]``.
    """
    if n_users < 2 or n_items < 2:
        raise exceptions.InvalidParam(f'need at least 2 users and 2 items:'
                                      f' ({n_users!r}, {n_items!r})')
    if pairs_per_user < 1:
        raise exceptions.InvalidParam(f'invalid pairs_per_user: {pairs_per_user!r}'
                                      ' (must be >= 1)')
    for name, rate in [('match_rate', match_rate), ('mismatch_rate', mismatch_rate)]:
        if not 0 <= rate <= 1:
            raise exceptions.InvalidParam(f'invalid {name}: {rate!r} (must be in [0, 1])')
    if seed is None:
        seed = _defaults.get_default_seed()
    rng = _tools.make_rng(seed)
    directory = pathlib.Path(directory)

    item_topics = rng.permutation(np.arange(n_items) % len(TOPIC_KEYWORDS))
    user_topics = rng.integers(len(TOPIC_KEYWORDS), size=n_users)

    image_files, texts, paths = [], [], []
    for item, topic in enumerate(item_topics):
        texts.append(_item_text(int(topic), rng))
        relative = f'{IMAGE_DIR}/item{item:05d}.ppm'
        image_files.append(write_ppm(directory / relative,
                                     _item_pixels(int(topic), image_shape, rng)))
        paths.append(relative)

    n_pairs = min(pairs_per_user, n_items)
    records = []
    for user, topic in enumerate(user_topics):
        items = rng.choice(n_items, size=n_pairs, replace=False)
        draws = rng.random(n_pairs)
        for position, (item, draw) in enumerate(zip(items, draws)):
            rate = match_rate if item_topics[item] == topic else mismatch_rate
            records.append(InteractionRecord(user_id=user, item_id=int(item),
                                             interaction=int(draw < rate),
                                             features_text=texts[item],
                                             image_path=paths[item],
                                             timestamp=position))

    dataset = Dataset(records, root=directory)
    log.info('synthesized %d records (%d positive) for %d users, %d items',
             len(dataset), dataset.stats.positives, n_users, n_items)
    return dataset, image_files
