"""Set package-wide default parameters."""

__all__ = ['LEARNING_RATE', 'BATCH_SIZE', 'EPOCHS', 'VALIDATION_SPLIT',
           'BETA1', 'BETA2', 'ADAM_EPS',
           'K', 'N_NEGATIVES', 'THRESHOLD',
           'NEG_RATIO', 'TEST_FRACTION', 'IMAGE_SHAPE',
           'DEFAULT_ENCODING',
           'get_default_seed', 'set_default_seed']

# training
LEARNING_RATE = 0.001

BATCH_SIZE = 8

EPOCHS = 25

VALIDATION_SPLIT = 0.20

BETA1 = 0.9

BETA2 = 0.999

ADAM_EPS = 1e-8

# leave-one-out evaluation
K = 10

N_NEGATIVES = 99

THRESHOLD = 0.5

# data preparation
NEG_RATIO = 4

TEST_FRACTION = 0.2

IMAGE_SHAPE = (32, 32, 3)

DEFAULT_ENCODING = 'utf-8'

_seed = 0


def get_default_seed() -> int:
    """Return the seed used by configurations created without an explicit ``seed``."""
    return _seed


def set_default_seed(seed: int) -> int:
    """Change the default ``seed`` and return the old default value.

    Args:
        seed: New non-negative default seed used by all newly created
            configurations without explicitly set ``seed``.

    Returns:
        The old default value used for ``seed``.

    >>> old = set_default_seed(42)
    >>> get_default_seed()
    42
    >>> set_default_seed(old)
    42
    """
    global _seed

    if not isinstance(seed, int) or seed < 0:
        raise ValueError(f'invalid seed: {seed!r} (must be a non-negative int)')

    old_seed = _seed
    _seed = seed
    return old_seed
