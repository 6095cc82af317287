import numpy as np
import pytest

from diagnose.pipeline import run_gsabfd
from features.extractor import FeatureMatrix
from harness import (
    BENCH_COLUMNS, EXECUTION_ORDER, SWEEP_COLUMNS, DEFAULT_GRIDS, create_detection_harness,
)
from sage.model import SageHyper
from utils.errors import InputError


class TestRunAll:
    def test_every_detector_reports(self, fast_config, clustered_matrix):
        harness = create_detection_harness(fast_config)
        progress = []
        result = harness.run_all_detectors(clustered_matrix, lambda i, total, msg: progress.append(i))

        assert result['execution_order'] == EXECUTION_ORDER
        assert result['summary']['successful_detectors'] == 5
        assert result['summary']['overall_status'] == 'success'
        assert progress == [0, 1, 2, 3, 4, 5]
        for name in EXECUTION_ORDER:
            assert result['detector_results'][name]['report'].flagged == 4

    def test_failure_is_isolated(self, fast_config, clustered_matrix):
        harness = create_detection_harness(fast_config.replace(knn_k=45))
        result = harness.run_all_detectors(clustered_matrix)
        assert harness.get_execution_status()['knn'] == 'error'
        assert result['summary']['failed_detectors'] == 1
        assert result['summary']['overall_status'] == 'partial'
        assert 'knn' not in result['summary']['key_findings']

    def test_unknown_detector(self, fast_config, clustered_matrix):
        result = create_detection_harness(fast_config).run_individual_detector('sogaal', clustered_matrix)
        assert result['status'] == 'error'
        assert 'sogaal' in result['error']

    def test_graph_detector_is_the_pipeline_run(self, fast_config, clustered_matrix):
        harness = create_detection_harness(fast_config)
        scores = harness.detectors['gsabfd'].score(clustered_matrix, 7)
        hyper = SageHyper(**{**fast_config.sage_kwargs(), 'seed': 7})
        run = run_gsabfd(clustered_matrix, hyper, fast_config.contamination, timing=False)
        np.testing.assert_array_equal(scores, run.scores)

    def test_clear_results(self, fast_config, clustered_matrix):
        harness = create_detection_harness(fast_config)
        harness.run_individual_detector('lof', clustered_matrix)
        harness.clear_results()
        assert harness.get_execution_status() == {}


class TestBench:
    def test_schema_and_repetitions(self, fast_config, clustered_matrix):
        harness = create_detection_harness(fast_config)
        frame = harness.bench({'synthetic': clustered_matrix}, methods=['gsabfd', 'lof'])
        assert list(frame.columns) == BENCH_COLUMNS
        assert frame['method'].tolist() == ['gsabfd', 'lof']
        assert frame['runs'].tolist() == [2, 2]
        assert frame['error'].tolist() == ['', '']
        assert frame['runtime_seconds'].tolist() == [0.0, 0.0]
        # lof has no randomness, so repeated seeds agree
        assert frame.loc[1, 'auc_std'] == 0.0

    def test_failed_method_gets_error_row(self, fast_config, clustered_matrix):
        harness = create_detection_harness(fast_config.replace(knn_k=45))
        frame = harness.bench({'synthetic': clustered_matrix}, methods=['knn', 'iforest'])
        failed = frame.iloc[0]
        assert failed['runs'] == 0 and np.isnan(failed['auc'])
        assert 'k must satisfy' in failed['error']
        assert frame.iloc[1]['runs'] == 2
        assert any('knn' in log['message'] for log in harness.failure_logs)

    def test_deterministic(self, fast_config, clustered_matrix):
        first = create_detection_harness(fast_config).bench({'d': clustered_matrix}, methods=['iforest', 'ae'])
        second = create_detection_harness(fast_config).bench({'d': clustered_matrix}, methods=['iforest', 'ae'])
        assert first.equals(second)

    def test_wall_clock_runtime(self, fast_config, clustered_matrix):
        harness = create_detection_harness(fast_config.replace(timing=True))
        frame = harness.bench({'d': clustered_matrix}, methods=['knn'], repetitions=1)
        assert frame.loc[0, 'runtime_seconds'] > 0.0

    def test_requires_labels(self, fast_config, clustered_matrix):
        unlabeled = FeatureMatrix(clustered_matrix.rows)
        with pytest.raises(InputError):
            create_detection_harness(fast_config).bench({'d': unlabeled})


class TestSweep:
    def test_ratio_grid(self, fast_config, clustered_matrix):
        frame = create_detection_harness(fast_config).sweep(
            'sampling_ratio', clustered_matrix, grid=[0.2, 0.6, 1.0], repetitions=1)
        assert list(frame.columns) == SWEEP_COLUMNS
        assert frame['value'].tolist() == [0.2, 0.6, 1.0]
        assert frame['runs'].tolist() == [1, 1, 1]
        assert frame['auc_mean'].between(0.0, 1.0).all()

    def test_out_of_range_point_is_reported(self, fast_config, clustered_matrix):
        frame = create_detection_harness(fast_config).sweep('k', clustered_matrix, grid=[5, 10], repetitions=1)
        assert frame.loc[0, 'runs'] == 0
        assert 'outside the range' in frame.loc[0, 'error']
        assert frame.loc[1, 'runs'] == 1

    def test_deterministic(self, fast_config, clustered_matrix):
        harness = create_detection_harness(fast_config)
        first = harness.sweep('k', clustered_matrix, grid=[10, 20], repetitions=2)
        second = harness.sweep('k', clustered_matrix, grid=[10, 20], repetitions=2)
        assert first.equals(second)

    def test_default_grids_cover_ten_points(self):
        assert len(DEFAULT_GRIDS['k']) == 10 and DEFAULT_GRIDS['k'][-1] == 100
        assert len(DEFAULT_GRIDS['sampling_ratio']) == 10

    def test_unknown_parameter(self, fast_config, clustered_matrix):
        with pytest.raises(InputError):
            create_detection_harness(fast_config).sweep('depth', clustered_matrix)
