"""Interaction data: ingestion, preprocessing, sampling, and synthetic fixtures."""

from .images import ImageStore, preprocess_image, read_ppm, write_ppm
from .ingest import (load_interactions, write_interactions,
                     load_prepared, write_prepared)
from .preprocessing import preprocess_text
from .records import Dataset, DatasetStats, InteractionRecord
from .sampling import generate_negatives, sample_fraction, split_train_test
from .synthetic import synth_generate

__all__ = ['InteractionRecord', 'Dataset', 'DatasetStats',
           'load_interactions', 'write_interactions',
           'load_prepared', 'write_prepared',
           'preprocess_text', 'preprocess_image',
           'read_ppm', 'write_ppm', 'ImageStore',
           'sample_fraction', 'split_train_test', 'generate_negatives',
           'synth_generate']
