import os
import sys
import logging

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), '..')))

from features.extractor import FeatureMatrix, standardize  # noqa: E402
from graph.attributed import build_graph  # noqa: E402
from ingest.synth import synth_signals  # noqa: E402
from utils.config import RunConfig  # noqa: E402


def clustered_rows(n_normal=36, n_fault=4, dim=23, shift=4.0, seed=0):
    """A Gaussian blob of normal rows plus a shifted fault cluster."""
    rng = np.random.default_rng(seed)
    normal = rng.normal(0.0, 1.0, (n_normal, dim))
    direction = rng.normal(0.0, 1.0, dim)
    direction /= np.linalg.norm(direction)
    fault = rng.normal(0.0, 0.5, (n_fault, dim)) + shift * np.sqrt(dim) * direction
    labels = ['normal'] * n_normal + ['inner'] * n_fault
    return np.vstack([normal, fault]), labels


@pytest.fixture(autouse=True)
def restore_root_logger():
    root = logging.getLogger()
    handlers, level = list(root.handlers), root.level
    yield
    root.handlers[:] = handlers
    root.setLevel(level)


@pytest.fixture
def clustered_matrix():
    rows, labels = clustered_rows()
    return standardize(FeatureMatrix(rows, labels))


@pytest.fixture
def small_graph(clustered_matrix):
    return build_graph(clustered_matrix, 5)


@pytest.fixture
def synth_pair():
    return synth_signals(20, 10, width=300, seed=0)


@pytest.fixture
def fast_config():
    """Settings small enough for every detector to run in well under a second."""
    return RunConfig(
        ensemble_size=2, k=5, epochs=5, lr=0.01, hidden_dim=8, embed_dim=4,
        contamination=4 / 40, lof_k=5, knn_k=5, iforest_trees=16, iforest_subsample=32,
        ae_hidden_dim=8, ae_embed_dim=4, ae_epochs=5, ae_lr=0.01,
        repetitions=2, timing=False,
    ).validate()
