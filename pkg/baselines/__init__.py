"""
Reference outlier detectors run on the same standardized features as the
graph model.
"""
import numpy as np

from baselines.config import BaselineConfig, METHODS
from baselines.autoencoder import Autoencoder, train_autoencoder, ae_scores
from baselines.knn import knn_scores
from baselines.lof import lof_scores
from baselines.iforest import iforest_scores


def score_baseline(matrix, config: BaselineConfig) -> np.ndarray:
    """Dispatch on ``config.method``."""
    if config.method == 'ae':
        return ae_scores(matrix, config)
    if config.method == 'lof':
        return lof_scores(matrix, config.k)
    if config.method == 'knn':
        return knn_scores(matrix, config.k)
    return iforest_scores(matrix, config.trees, config.subsample, config.seed)


__all__ = [
    'BaselineConfig', 'METHODS', 'Autoencoder', 'train_autoencoder',
    'ae_scores', 'knn_scores', 'lof_scores', 'iforest_scores', 'score_baseline',
]
