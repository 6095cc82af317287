"""
Isolation Forest scores from scikit-learn.

``score_samples`` returns the negated anomaly score 2^(-E[h(x)]/c(n)), so the
sign is flipped to get scores in (0, 1) where higher means more isolated.
Tree depth is limited to ceil(log2(subsample)), scikit-learn's default.
"""
import logging

import numpy as np
from sklearn.ensemble import IsolationForest

from features.extractor import FeatureMatrix
from utils.errors import InputError

logger = logging.getLogger(__name__)


def iforest_scores(matrix, trees: int = 256, subsample: int = 256, seed: int = 0) -> np.ndarray:
    rows = matrix.rows if isinstance(matrix, FeatureMatrix) else np.asarray(matrix, dtype=np.float64)
    m = rows.shape[0]
    if not 2 <= subsample <= m:
        raise InputError(f"subsample must be between 2 and {m}, got {subsample}")
    if trees < 1:
        raise InputError("trees must be >= 1")

    forest = IsolationForest(n_estimators=trees, max_samples=subsample,
                             random_state=seed, n_jobs=1)
    forest.fit(rows)
    logger.debug(f"Isolation forest: {trees} trees, subsample {subsample}, seed {seed}")
    return -forest.score_samples(rows)
