"""
Graph sampling-and-aggregation autoencoder and its training loop.
"""
from sage.model import (
    SageHyper, SageModel, sample_neighbors, sample_positions, aggregation_operator,
    aggregate_mean, sage_layer, encode, decode,
)
from sage.train import train, write_training_log

__all__ = [
    'SageHyper', 'SageModel', 'sample_neighbors', 'sample_positions', 'aggregation_operator',
    'aggregate_mean', 'sage_layer', 'encode', 'decode', 'train', 'write_training_log',
]
