"""
The 23-feature window representation, the feature matrix and its
standardization, plus CSV/JSON persistence.
"""
import os
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from features.emd import EemdParams, eemd_features, EEMD_FEATURES
from features.time_domain import time_features, TIME_FEATURE_NAMES
from features.wavelet import dwt_features, DWT_LEVELS
from ingest.signals import Window
from utils.errors import InputError, DataFormatError, ShapeError

logger = logging.getLogger(__name__)

N_FEATURES = len(TIME_FEATURE_NAMES) + DWT_LEVELS + EEMD_FEATURES
FEATURE_COLUMNS = [f"f{i}" for i in range(1, N_FEATURES + 1)]
STD_GUARD = 1e-12


def extract(window: Window, params: Optional[EemdParams] = None, seed: int = 0) -> np.ndarray:
    """[time(9) | wavelet(8) | EEMD(6)] for one window."""
    params = params or EemdParams()
    return np.concatenate([
        time_features(window),
        dwt_features(window),
        eemd_features(window, params, seed),
    ])


@dataclass
class NormStats:
    mean: np.ndarray
    std: np.ndarray
    zero_columns: List[int] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            'mean': [float(v) for v in self.mean],
            'std': [float(v) for v in self.std],
            'zero_columns': [int(c) for c in self.zero_columns],
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'NormStats':
        try:
            return cls(np.asarray(data['mean'], dtype=np.float64),
                       np.asarray(data['std'], dtype=np.float64),
                       [int(c) for c in data.get('zero_columns', [])])
        except (KeyError, TypeError, ValueError) as e:
            raise DataFormatError(f"malformed normalization stats: {e}")


@dataclass
class FeatureMatrix:
    """m feature rows with optional ground-truth labels and standardization stats."""

    rows: np.ndarray
    labels: Optional[List[str]] = None
    norm_stats: Optional[NormStats] = None

    def __post_init__(self):
        self.rows = np.asarray(self.rows, dtype=np.float64)
        if self.rows.ndim != 2:
            raise ShapeError(f"feature rows must be 2-D, got shape {self.rows.shape}")
        if self.rows.shape[0] < 2:
            raise InputError("a feature matrix needs at least 2 rows")
        if self.labels is not None and len(self.labels) != self.rows.shape[0]:
            raise ShapeError(f"{len(self.labels)} labels for {self.rows.shape[0]} rows")

    @property
    def m(self) -> int:
        return int(self.rows.shape[0])

    @property
    def is_fault(self) -> Optional[np.ndarray]:
        if self.labels is None:
            return None
        return np.array([label != 'normal' for label in self.labels])

    def permuted(self, order: Sequence[int]) -> 'FeatureMatrix':
        order = np.asarray(order)
        labels = [self.labels[i] for i in order] if self.labels is not None else None
        return replace(self, rows=self.rows[order], labels=labels)


def standardize(matrix: FeatureMatrix) -> FeatureMatrix:
    """Column z-scores with the matrix's own mean and n-1 std; flat columns become 0."""
    rows = matrix.rows
    mean = rows.mean(axis=0)
    std = rows.std(axis=0, ddof=1)
    zero = std < STD_GUARD
    safe_std = np.where(zero, 1.0, std)
    scaled = (rows - mean) / safe_std
    scaled[:, zero] = 0.0
    stats = NormStats(mean, std, [int(c) for c in np.flatnonzero(zero)])
    if stats.zero_columns:
        logger.debug(f"Zeroed constant feature columns {stats.zero_columns}")
    return FeatureMatrix(scaled, matrix.labels, stats)


def apply_stats(matrix: FeatureMatrix, stats: NormStats) -> FeatureMatrix:
    """Standardize new rows with previously computed stats."""
    if matrix.rows.shape[1] != stats.mean.size:
        raise ShapeError(f"{matrix.rows.shape[1]} feature columns, stats cover {stats.mean.size}")
    zero = np.zeros(stats.mean.size, dtype=bool)
    zero[stats.zero_columns] = True
    safe_std = np.where(zero | (stats.std < STD_GUARD), 1.0, stats.std)
    scaled = (matrix.rows - stats.mean) / safe_std
    scaled[:, zero] = 0.0
    return FeatureMatrix(scaled, matrix.labels, stats)


def unstandardize(matrix: FeatureMatrix) -> FeatureMatrix:
    """Undo standardization with the matrix's own stats; flat columns return to their mean."""
    stats = matrix.norm_stats
    if stats is None:
        return matrix
    if matrix.rows.shape[1] != stats.mean.size:
        raise ShapeError(f"{matrix.rows.shape[1]} feature columns, stats cover {stats.mean.size}")
    zero = np.zeros(stats.mean.size, dtype=bool)
    zero[stats.zero_columns] = True
    safe_std = np.where(zero | (stats.std < STD_GUARD), 1.0, stats.std)
    rows = np.where(zero, 0.0, matrix.rows) * safe_std + stats.mean
    return FeatureMatrix(rows, matrix.labels, None)


def window_seed(seed: int, index: int) -> int:
    """Per-window EEMD seed derived from the run seed and the window position."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


def _extract_job(job):
    window, params, seed = job
    return extract(window, params, seed)


def extract_matrix(windows: Sequence[Window], params: Optional[EemdParams] = None,
                   seed: int = 0, workers: int = 1) -> FeatureMatrix:
    """Raw (unstandardized) features for every window, in window order."""
    params = params or EemdParams()
    jobs = [(w, params, window_seed(seed, i)) for i, w in enumerate(windows)]
    logger.info(f"Extracting {N_FEATURES} features from {len(jobs)} windows "
                f"(ensemble {params.ensemble_size}, workers {workers})")
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(_extract_job, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        rows = [_extract_job(job) for job in jobs]
    return FeatureMatrix(np.vstack(rows), [w.label for w in windows])


def stats_path_for(csv_path: str) -> str:
    root, _ = os.path.splitext(csv_path)
    return root + '.stats.json'


def write_feature_csv(matrix: FeatureMatrix, path: str) -> None:
    """Write ``f1..fN,label`` rows and, when present, the stats JSON sidecar."""
    columns = [f"f{i}" for i in range(1, matrix.rows.shape[1] + 1)]
    frame = pd.DataFrame(matrix.rows, columns=columns)
    frame['label'] = matrix.labels if matrix.labels is not None else ''
    frame.to_csv(path, index=False, lineterminator='\n')
    if matrix.norm_stats is not None:
        with open(stats_path_for(path), 'w', encoding='utf-8') as handle:
            json.dump(matrix.norm_stats.to_dict(), handle, indent=2, sort_keys=True)
    logger.info(f"Wrote {matrix.m}x{matrix.rows.shape[1]} feature matrix to {path}")


def read_feature_csv(path: str) -> FeatureMatrix:
    """Inverse of write_feature_csv; a missing or empty label column means unlabeled."""
    if not os.path.isfile(path):
        raise InputError(f"feature file not found: {path}")
    try:
        frame = pd.read_csv(path, keep_default_na=False, float_precision='round_trip')
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataFormatError(f"{path}: cannot parse feature CSV ({e})")

    feature_columns = [c for c in frame.columns if c != 'label']
    try:
        rows = frame[feature_columns].to_numpy(dtype=np.float64)
    except ValueError as e:
        raise DataFormatError(f"{path}: non-numeric feature value ({e})")

    labels = None
    if 'label' in frame.columns:
        values = [str(v).strip() for v in frame['label']]
        if any(values):
            labels = values

    stats = None
    sidecar = stats_path_for(path)
    if os.path.isfile(sidecar):
        with open(sidecar, 'r', encoding='utf-8') as handle:
            stats = NormStats.from_dict(json.load(handle))
    return FeatureMatrix(rows, labels, stats)
