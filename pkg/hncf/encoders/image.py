"""VGG-style convolutional image encoder with a trainable dense head."""

import dataclasses
import typing

import numpy as np

from .. import _defaults
from .. import exceptions
from ..autodiff import Tensor, add, conv2d, flatten, matmul, maxpool2d, relu, reshape
from ..autodiff.conv import conv_output_extent
from . import init

__all__ = ['KERNEL_SIZE', 'POOL_WINDOW',
           'ImageEncoderConfig', 'image_param_shapes', 'init_image_params',
           'is_conv_param', 'encode_image']

KERNEL_SIZE = 3

POOL_WINDOW = 2

MIN_EXTENT = 8

Params = typing.Mapping[str, Tensor]


@dataclasses.dataclass(frozen=True)
class ImageEncoderConfig:
    """Input ``(height, width, 3)``, conv ``blocks`` of ``(channels, convs)``,
        and the width of the dense head."""

    input_shape: typing.Tuple[int, int, int] = _defaults.IMAGE_SHAPE

    blocks: typing.Tuple[typing.Tuple[int, int], ...] = ((8, 2), (16, 2))

    frozen_conv: bool = True

    head_dim: int = 32

    def __post_init__(self) -> None:
        object.__setattr__(self, 'input_shape', tuple(self.input_shape))
        object.__setattr__(self, 'blocks', tuple(tuple(b) for b in self.blocks))
        height, width, channels = self.input_shape
        if height < MIN_EXTENT or width < MIN_EXTENT or channels != 3:
            raise exceptions.InvalidConfig(f'invalid input_shape: {self.input_shape!r}'
                                           f' (must be (h >= {MIN_EXTENT},'
                                           f' w >= {MIN_EXTENT}, 3))')
        if not self.blocks:
            raise exceptions.InvalidConfig('blocks must not be empty')
        if any(c < 1 or n < 1 for c, n in self.blocks):
            raise exceptions.InvalidConfig(f'invalid blocks: {self.blocks!r}')
        if self.head_dim < 1:
            raise exceptions.InvalidConfig(f'invalid head_dim: {self.head_dim!r}')
        h, w = self.feature_extent
        if h < 1 or w < 1:
            raise exceptions.InvalidConfig(f'{len(self.blocks)} pooling blocks'
                                           f' exceed input_shape {self.input_shape!r}')

    @property
    def feature_extent(self) -> typing.Tuple[int, int]:
        """Spatial extent of the final feature maps."""
        h, w = self.input_shape[:2]
        for _ in self.blocks:
            if h < POOL_WINDOW or w < POOL_WINDOW:
                return 0, 0
            h = conv_output_extent(h, POOL_WINDOW, stride=POOL_WINDOW, padding=0)
            w = conv_output_extent(w, POOL_WINDOW, stride=POOL_WINDOW, padding=0)
        return h, w

    @property
    def feature_size(self) -> int:
        """Length of the flattened conv features fed into the head."""
        h, w = self.feature_extent
        return h * w * self.blocks[-1][0]


def image_param_shapes(cfg: ImageEncoderConfig) -> typing.Dict[str, typing.Tuple[int, ...]]:
    shapes = {}
    channels = cfg.input_shape[2]
    for b, (out_channels, convs) in enumerate(cfg.blocks):
        for c in range(convs):
            shapes[f'block{b}.conv{c}.kernel'] = (KERNEL_SIZE, KERNEL_SIZE,
                                                  channels, out_channels)
            shapes[f'block{b}.conv{c}.bias'] = (out_channels,)
            channels = out_channels
    shapes['head.weight'] = (cfg.feature_size, cfg.head_dim)
    shapes['head.bias'] = (cfg.head_dim,)
    return shapes


def is_conv_param(name: str) -> bool:
    """Return whether ``name`` belongs to the conv stack (as opposed to the head)."""
    return '.conv' in name


def init_image_params(cfg: ImageEncoderConfig, rng: np.random.Generator, *,
                      prefix: str = 'image.') -> typing.Dict[str, Tensor]:
    params = {}
    for name, shape in image_param_shapes(cfg).items():
        requires_grad = not (cfg.frozen_conv and is_conv_param(name))
        if name.endswith('bias'):
            tensor = init.zeros(shape, requires_grad=requires_grad)
        else:
            tensor = init.glorot_uniform(rng, shape, requires_grad=requires_grad)
        tensor.name = prefix + name
        params[tensor.name] = tensor
    return params


def encode_image(pixels: typing.Union[Tensor, np.ndarray], params: Params,
                 cfg: ImageEncoderConfig, *, prefix: str = 'image.') -> Tensor:
    """Return the ``head_dim`` feature vector of a normalized ``(h, w, 3)`` image.

    Each block runs ``convs`` 3x3 same-padded convolutions with relu,
    then 2x2 max-pooling; the flattened maps pass a dense relu head.
    """
    x = pixels if isinstance(pixels, Tensor) else Tensor(pixels)
    if x.shape != cfg.input_shape:
        raise exceptions.ShapeMismatch(f'image shape {x.shape!r}'
                                       f' differs from input_shape {cfg.input_shape!r}')

    for b, (_, convs) in enumerate(cfg.blocks):
        for c in range(convs):
            name = f'{prefix}block{b}.conv{c}'
            x = conv2d(x, params[f'{name}.kernel'], stride=1, padding=KERNEL_SIZE // 2)
            x = relu(add(x, params[f'{name}.bias']))
        x = maxpool2d(x, POOL_WINDOW, POOL_WINDOW)

    features = reshape(flatten(x), (1, cfg.feature_size))
    head = relu(add(matmul(features, params[f'{prefix}head.weight']),
                    params[f'{prefix}head.bias']))
    return reshape(head, (cfg.head_dim,))
