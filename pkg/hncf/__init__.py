# hncf - hybrid neural collaborative filtering

"""Recommend items from user/item ids, item text, and item images.

Example:
    >>> import hncf
    >>> from hncf.checks import tiny_config

    >>> model = hncf.build_model(tiny_config(hncf.ModelVariant.NCF))
    >>> model.config.variant.value
    'NCF'

    >>> score = hncf.forward(model, 0, 1)
    >>> score.shape
    ()
    >>> 0.0 < score.item() < 1.0
    True
"""

from ._defaults import set_default_seed

from .autodiff import Tensor, Tape, grad_check
from .checkpoint import load_checkpoint, load_weights, save_checkpoint
from .config import RunConfig, load_run_config
from .data import (Dataset, InteractionRecord,
                   load_interactions, load_prepared, synth_generate)
from .evaluation import (EvalProtocol, MetricReport,
                         compare_variants, evaluate_model, hit_ratio_at_k)
from .exceptions import (HncfError, InvalidConfig, InvalidParam,
                         DataError, CheckpointError, NonFiniteGradient,
                         DegenerateDenominatorWarning)
from .inputs import EncodedRow, ItemCatalog, RowEncoder
from .model import (ModelVariant, HncfConfig, HncfModel,
                    build_model, forward, forward_batch, recommend_top_k)
from .training import TrainConfig, fit

__all__ = ['Tensor', 'Tape', 'grad_check',
           'InteractionRecord', 'Dataset',
           'load_interactions', 'load_prepared', 'synth_generate',
           'EncodedRow', 'ItemCatalog', 'RowEncoder',
           'ModelVariant', 'HncfConfig', 'HncfModel',
           'build_model', 'forward', 'forward_batch', 'recommend_top_k',
           'TrainConfig', 'fit',
           'EvalProtocol', 'MetricReport',
           'evaluate_model', 'hit_ratio_at_k', 'compare_variants',
           'save_checkpoint', 'load_checkpoint', 'load_weights',
           'RunConfig', 'load_run_config',
           'HncfError', 'InvalidConfig', 'InvalidParam',
           'DataError', 'CheckpointError', 'NonFiniteGradient',
           'DegenerateDenominatorWarning',
           'set_default_seed']

__title__ = 'hncf'
__version__ = '0.1.0.dev0'
__license__ = 'MIT, see LICENSE.txt'

ModelVariant = ModelVariant
""":class:`enum.Enum` of the model variants
(``NCF``, ``TEXT_NCF``, ``HYBRID``)."""


HncfError = HncfError


InvalidConfig = InvalidConfig


InvalidParam = InvalidParam


DataError = DataError


CheckpointError = CheckpointError


NonFiniteGradient = NonFiniteGradient


DegenerateDenominatorWarning = DegenerateDenominatorWarning
