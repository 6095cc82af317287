"""
Directed attributed graph over feature rows: cosine k-nearest neighbours with
normalized similarity weights.

The graph is stored as adjacency lists (``neighbors`` and ``weights``, both
m x k). The self-loop of M = A + E_m is carried as a flag: aggregation adds
the node's own vector explicitly instead of listing the node among its
neighbours. The dense M is only materialized for export and for small-m
checks.
"""
import logging
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
import pandas as pd

from features.extractor import FeatureMatrix
from utils.errors import InputError, ShapeError, DataFormatError

logger = logging.getLogger(__name__)

NORM_GUARD = 1e-12
WEIGHT_GUARD = 1e-12
DENSE_EXPORT_LIMIT = 1000

MatrixLike = Union[FeatureMatrix, np.ndarray]


def _rows(matrix: MatrixLike) -> np.ndarray:
    rows = matrix.rows if isinstance(matrix, FeatureMatrix) else np.asarray(matrix, dtype=np.float64)
    if rows.ndim != 2:
        raise ShapeError(f"expected a 2-D feature matrix, got shape {rows.shape}")
    return rows


def cosine_similarity(u, v) -> float:
    """Cosine of the angle between u and v; 0 if either is (near) zero."""
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.size != v.size:
        raise ShapeError(f"cannot compare vectors of length {u.size} and {v.size}")
    nu = float(np.linalg.norm(u))
    nv = float(np.linalg.norm(v))
    if nu < NORM_GUARD or nv < NORM_GUARD:
        return 0.0
    return float(np.clip(np.dot(u, v) / (nu * nv), -1.0, 1.0))


def similarity_matrix(matrix: MatrixLike) -> np.ndarray:
    """All pairwise cosine similarities (m x m)."""
    rows = _rows(matrix)
    norms = np.linalg.norm(rows, axis=1)
    valid = norms >= NORM_GUARD
    unit = np.zeros_like(rows)
    unit[valid] = rows[valid] / norms[valid, None]
    return np.clip(unit @ unit.T, -1.0, 1.0)


def _check_k(k: int, m: int) -> None:
    if not 1 <= k <= m - 1:
        raise InputError(f"k must be between 1 and {m - 1} for {m} nodes, got {k}")


def rank_neighbors(sims: np.ndarray, i: int, k: int) -> np.ndarray:
    """Top-k ids by similarity (descending) from one similarity row, excluding i.

    Ties keep the smaller id first.
    """
    sims = np.asarray(sims, dtype=np.float64)
    _check_k(k, sims.size)
    keys = -sims.copy()
    keys[i] = np.inf
    return np.argsort(keys, kind='stable')[:k]


def knn_neighbors(matrix: MatrixLike, i: int, k: int) -> np.ndarray:
    rows = _rows(matrix)
    m = rows.shape[0]
    if not 0 <= i < m:
        raise InputError(f"node {i} out of range for {m} nodes")
    sims = np.array([cosine_similarity(rows[i], rows[j]) for j in range(m)])
    return rank_neighbors(sims, i, k)


def edge_weights(sims) -> np.ndarray:
    """Normalize neighbour similarities into weights; negatives count as 0."""
    sims = np.asarray(sims, dtype=np.float64)
    clamped = np.maximum(sims, 0.0)
    total = float(clamped.sum())
    if total < WEIGHT_GUARD:
        return np.full(sims.size, 1.0 / sims.size)
    return clamped / total


@dataclass
class AttributedGraph:
    """k-out-regular directed graph with weighted edges and an implicit self-loop."""

    neighbors: np.ndarray
    weights: np.ndarray
    similarities: Optional[np.ndarray] = None
    features: Optional[FeatureMatrix] = None
    self_loop: bool = True

    def __post_init__(self):
        self.neighbors = np.asarray(self.neighbors, dtype=np.int64)
        self.weights = np.asarray(self.weights, dtype=np.float64)
        if self.neighbors.ndim != 2 or self.neighbors.shape != self.weights.shape:
            raise ShapeError(f"neighbor ids {self.neighbors.shape} and weights "
                             f"{self.weights.shape} must be matching m x k arrays")
        m, k = self.neighbors.shape
        if self.features is not None and self.features.m != m:
            raise ShapeError(f"graph has {m} nodes but the feature matrix has {self.features.m} rows")
        if k and (self.neighbors.min() < 0 or self.neighbors.max() >= m):
            raise InputError("neighbor id out of range")
        if np.any(self.neighbors == np.arange(m)[:, None]):
            raise InputError("a node may not list itself as a neighbor")

    @property
    def m(self) -> int:
        return int(self.neighbors.shape[0])

    @property
    def k(self) -> int:
        return int(self.neighbors.shape[1])

    def adjacency_matrix(self) -> np.ndarray:
        """Dense weighted adjacency A (no self-loop)."""
        adjacency = np.zeros((self.m, self.m))
        rows = np.repeat(np.arange(self.m), self.k)
        adjacency[rows, self.neighbors.ravel()] = self.weights.ravel()
        return adjacency

    def dense_matrix(self) -> np.ndarray:
        """M = A + E_m, refused for graphs above the export limit."""
        if self.m > DENSE_EXPORT_LIMIT:
            raise InputError(f"dense export is limited to {DENSE_EXPORT_LIMIT} nodes, graph has {self.m}")
        dense = self.adjacency_matrix()
        if self.self_loop:
            dense += np.eye(self.m)
        return dense

    def edges_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'src': np.repeat(np.arange(self.m), self.k),
            'dst': self.neighbors.ravel(),
            'weight': self.weights.ravel(),
        })

    def write_edges_csv(self, path: str) -> None:
        self.edges_frame().to_csv(path, index=False, lineterminator='\n')
        logger.info(f"Wrote {self.m * self.k} edges to {path}")

    def write_dense_csv(self, path: str) -> None:
        frame = pd.DataFrame(self.dense_matrix())
        frame.to_csv(path, index=False, header=False, lineterminator='\n')
        logger.info(f"Wrote dense {self.m}x{self.m} matrix to {path}")


def build_graph(matrix: FeatureMatrix, k: int) -> AttributedGraph:
    """Cosine k-NN graph of the (standardized) feature rows."""
    rows = _rows(matrix)
    m = rows.shape[0]
    _check_k(k, m)

    sims = similarity_matrix(rows)
    keys = -sims
    np.fill_diagonal(keys, np.inf)
    # stable sort keeps equal similarities in ascending id order
    neighbors = np.argsort(keys, axis=1, kind='stable')[:, :k]
    selected = np.take_along_axis(sims, neighbors, axis=1)
    weights = np.vstack([edge_weights(row) for row in selected])

    features = matrix if isinstance(matrix, FeatureMatrix) else None
    logger.info(f"Built attributed graph: {m} nodes, k={k}, "
                f"{int(np.sum(selected <= 0))} non-positive similarities clamped")
    return AttributedGraph(neighbors, weights, selected, features)


def read_edges_csv(path: str, features: Optional[FeatureMatrix] = None) -> AttributedGraph:
    """Rebuild a graph from a ``src,dst,weight`` export (rows grouped by src, in order)."""
    try:
        frame = pd.read_csv(path, float_precision='round_trip')
    except FileNotFoundError:
        raise InputError(f"edge file not found: {path}")
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise DataFormatError(f"{path}: cannot parse edge CSV ({e})")
    if list(frame.columns) != ['src', 'dst', 'weight']:
        raise DataFormatError(f"{path}: expected header src,dst,weight, got {','.join(map(str, frame.columns))}")

    src = frame['src'].to_numpy()
    counts = np.bincount(src)
    if counts.size == 0 or np.any(counts != counts[0]) or np.any(np.diff(src) < 0):
        raise DataFormatError(f"{path}: every node needs the same number of out-edges, grouped by src")
    m, k = counts.size, int(counts[0])
    neighbors = frame['dst'].to_numpy().reshape(m, k)
    weights = frame['weight'].to_numpy(dtype=np.float64).reshape(m, k)
    return AttributedGraph(neighbors, weights, None, features)
