"""Reverse-mode differentiation over 64-bit float tensors."""

from .conv import conv2d, maxpool2d
from .gradcheck import grad_check
from .ops import (matmul, add, mul, scale, transpose, reshape, flatten,
                  slice_axis, sum, mean,
                  relu, sigmoid, softmax, layernorm, dropout,
                  embedding_lookup, concat, bce_loss,
                  verify_mode, MODES)
from .tensor import Tensor, Tape, backward, active_tape

__all__ = ['Tensor', 'Tape', 'backward', 'active_tape',
           'matmul', 'add', 'mul', 'scale', 'transpose', 'reshape', 'flatten',
           'slice_axis', 'sum', 'mean',
           'relu', 'sigmoid', 'softmax', 'layernorm', 'dropout',
           'embedding_lookup', 'concat', 'bce_loss',
           'conv2d', 'maxpool2d',
           'grad_check',
           'verify_mode', 'MODES']
