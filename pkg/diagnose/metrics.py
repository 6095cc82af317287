"""
Fault degree, contamination thresholding and detection metrics.
"""
import math
from typing import Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

from utils.errors import InputError, ShapeError


def fault_degree(X, Xhat) -> np.ndarray:
    """Per-node 1/2 * sum_j (X[v, j] - Xhat[v, j])^2."""
    X = np.asarray(X, dtype=np.float64)
    Xhat = np.asarray(Xhat, dtype=np.float64)
    if X.shape != Xhat.shape:
        raise ShapeError(f"features {X.shape} and reconstruction {Xhat.shape} differ")
    residual = X - Xhat
    return 0.5 * np.sum(residual * residual, axis=1)


def flag_count(m: int, contamination: float) -> int:
    """ceil(contamination * m), tolerant to representation error in the fraction."""
    return max(1, min(m, math.ceil(contamination * m - 1e-9)))


def threshold_flags(scores, contamination: float) -> Tuple[np.ndarray, float]:
    """Flag the top ceil(c*m) scores; equal scores at the cut go to the lower id."""
    scores = np.asarray(scores, dtype=np.float64)
    if not 0 < contamination < 1:
        raise InputError(f"contamination must be in (0, 1), got {contamination}")
    if scores.size == 0:
        raise InputError("no scores to threshold")
    count = flag_count(scores.size, contamination)
    order = np.lexsort((np.arange(scores.size), -scores))
    flagged = order[:count]
    flags = np.zeros(scores.size, dtype=bool)
    flags[flagged] = True
    return flags, float(scores[flagged].min())


def _as_bool(labels) -> np.ndarray:
    return np.asarray(labels).astype(bool)


def auc(scores, labels) -> float:
    """Probability that a random fault outscores a random normal node, ties count 1/2.

    Uses the rank-sum form; average ranks give ties exactly half credit.
    """
    scores = np.asarray(scores, dtype=np.float64)
    positive = _as_bool(labels)
    if scores.shape != positive.shape:
        raise ShapeError(f"{scores.size} scores for {positive.size} labels")
    n_pos = int(positive.sum())
    n_neg = int(positive.size - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise InputError("AUC needs at least one fault and one normal label")
    ranks = rankdata(scores, method='average')
    rank_sum = float(ranks[positive].sum())
    return (rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg)


def confusion(flags, labels) -> Tuple[int, int, int, int]:
    """(TP, TN, FP, FN) with fault as the positive class."""
    flags = _as_bool(flags)
    positive = _as_bool(labels)
    if flags.shape != positive.shape:
        raise ShapeError(f"{flags.size} flags for {positive.size} labels")
    tp = int(np.sum(flags & positive))
    tn = int(np.sum(~flags & ~positive))
    fp = int(np.sum(flags & ~positive))
    fn = int(np.sum(~flags & positive))
    return tp, tn, fp, fn


def acc(flags, labels) -> float:
    tp, tn, fp, fn = confusion(flags, labels)
    return (tp + tn) / (tp + tn + fp + fn)


def dr(flags, labels) -> float:
    """Detection rate: recall on faults."""
    tp, _, _, fn = confusion(flags, labels)
    if tp + fn == 0:
        raise InputError("detection rate needs at least one fault label")
    return tp / (tp + fn)


def fault_mask(labels: Sequence[str]) -> np.ndarray:
    """True wherever the ground-truth label is a fault family."""
    return np.array([label != 'normal' for label in labels])
