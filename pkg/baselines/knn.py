"""
k-nearest-neighbour distance outlier score.
"""
import numpy as np
from scipy.spatial.distance import cdist

from features.extractor import FeatureMatrix
from utils.errors import InputError


def pairwise_distances(matrix) -> np.ndarray:
    """Euclidean distances with the diagonal set to +inf (a point is not its own neighbour)."""
    rows = matrix.rows if isinstance(matrix, FeatureMatrix) else np.asarray(matrix, dtype=np.float64)
    distances = cdist(rows, rows, metric='euclidean')
    np.fill_diagonal(distances, np.inf)
    return distances


def check_k(k: int, m: int) -> None:
    if not 1 <= k < m:
        raise InputError(f"k must satisfy 1 <= k < {m}, got {k}")


def knn_scores(matrix, k: int = 20) -> np.ndarray:
    """Distance from each row to its k-th nearest other row."""
    distances = pairwise_distances(matrix)
    check_k(k, distances.shape[0])
    return np.sort(distances, axis=1)[:, k - 1]
