"""Id, text and image encoders feeding the fusion network."""

from .identity import IdEmbeddingConfig, encode_id, init_id_table
from .image import ImageEncoderConfig, encode_image, init_image_params
from .text import TextEncoderConfig, TokenSequence, encode_text, init_text_params, tokenize
from .vocabulary import (PAD, UNK, CLS, Vocabulary,
                         build_vocab, read_vocab, write_vocab)

__all__ = ['IdEmbeddingConfig', 'encode_id', 'init_id_table',
           'TextEncoderConfig', 'TokenSequence', 'tokenize',
           'encode_text', 'init_text_params',
           'ImageEncoderConfig', 'encode_image', 'init_image_params',
           'PAD', 'UNK', 'CLS', 'Vocabulary',
           'build_vocab', 'read_vocab', 'write_vocab']
