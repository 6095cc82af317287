"""
End-to-end checks on the full 800 + 60 window protocol. These take minutes;
run them with ``pytest -m slow``.
"""
import os
import time

import numpy as np
import pytest

from features.emd import EemdParams
from features.extractor import FeatureMatrix, extract_matrix, standardize
from graph.attributed import build_graph
from harness import create_detection_harness
from ingest.synth import synth_signals
from ingest.windows import slice_windows, assemble_dataset
from nnmath.gradcheck import grad_check, check_gradients
from sage.model import SageHyper, SageModel
from utils.config import RunConfig

pytestmark = pytest.mark.slow

NEAR_NORMAL_IMPULSE_RATIO = 1.0


def _protocol_matrix(impulse_ratio: float) -> FeatureMatrix:
    normal, fault = synth_signals(800, 60, width=300, seed=0, impulse_ratio=impulse_ratio)
    dataset = assemble_dataset(slice_windows(normal), slice_windows(fault), 800, 60, seed=0)
    raw = extract_matrix(dataset.windows, EemdParams(), seed=0, workers=os.cpu_count() or 1)
    return standardize(raw)


def _bench(matrix: FeatureMatrix):
    config = RunConfig(repetitions=5, timing=False)
    started = time.perf_counter()
    table = create_detection_harness(config).bench({'synthetic': matrix}, methods=['gsabfd', 'ae'])
    elapsed = time.perf_counter() - started
    gsabfd, ae = table.iloc[0], table.iloc[1]
    assert gsabfd['runs'] == 5 and ae['runs'] == 5
    return gsabfd, ae, elapsed


@pytest.fixture(scope='module')
def protocol_matrix():
    return _protocol_matrix(5.0)


@pytest.fixture(scope='module')
def near_normal_matrix():
    return _protocol_matrix(NEAR_NORMAL_IMPULSE_RATIO)


def test_protocol_matrix_shape(protocol_matrix):
    assert protocol_matrix.rows.shape == (860, 23)
    assert protocol_matrix.is_fault.sum() == 60


def test_graph_detector_reaches_target_auc(protocol_matrix):
    gsabfd, ae, elapsed = _bench(protocol_matrix)
    assert elapsed < 300
    assert gsabfd['auc'] >= 0.95
    assert gsabfd['auc'] >= ae['auc']


def test_graph_detector_beats_plain_autoencoder_near_normal(near_normal_matrix):
    gsabfd, ae, _ = _bench(near_normal_matrix)
    assert gsabfd['auc'] >= ae['auc']


def test_default_model_gradients_on_ten_nodes():
    rows = np.random.default_rng(0).normal(size=(10, 23))
    matrix = standardize(FeatureMatrix(rows))
    graph = build_graph(matrix, 3)
    started = time.perf_counter()
    report = check_gradients(SageModel(SageHyper(k=3)), graph, matrix, eps=1e-5)
    assert time.perf_counter() - started < 30
    assert report.worst <= 1e-4
    assert len(report.skipped) <= 5
    assert grad_check(SageModel(SageHyper(k=3)), graph, matrix) == report.worst
