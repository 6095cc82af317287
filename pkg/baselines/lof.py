"""
Local Outlier Factor with the classic k-distance neighbourhood.

N_k(p) holds every other point no farther than p's k-distance, so ties at the
k-th distance enlarge the neighbourhood. The local reachability density
carries a 1e-10 guard so duplicate-heavy data stays finite.
"""
import logging

import numpy as np

from baselines.knn import pairwise_distances, check_k

logger = logging.getLogger(__name__)

DENSITY_GUARD = 1e-10


def lof_scores(matrix, k: int = 20) -> np.ndarray:
    """LOF per row; about 1 inside a cluster, larger for outliers."""
    distances = pairwise_distances(matrix)
    m = distances.shape[0]
    check_k(k, m)

    k_distance = np.sort(distances, axis=1)[:, k - 1]
    neighborhood = distances <= k_distance[:, None]
    sizes = neighborhood.sum(axis=1)

    reach = np.maximum(distances, k_distance[None, :])
    mean_reach = np.where(neighborhood, reach, 0.0).sum(axis=1) / sizes
    density = 1.0 / (mean_reach + DENSITY_GUARD)

    scores = (neighborhood @ density) / sizes / density
    logger.debug(f"LOF over {m} rows: max neighbourhood {int(sizes.max())} for k={k}")
    return scores
