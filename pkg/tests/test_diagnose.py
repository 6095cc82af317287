import itertools

import numpy as np
import pytest

from diagnose.metrics import fault_degree, flag_count, threshold_flags, auc, acc, dr, confusion, fault_mask
from diagnose.pipeline import run_gsabfd, score_nodes
from diagnose.report import FaultReport, evaluate, has_metric_labels
from sage.model import SageHyper
from utils.errors import InputError, ShapeError


def brute_force_auc(scores, labels):
    positives = [s for s, l in zip(scores, labels) if l]
    negatives = [s for s, l in zip(scores, labels) if not l]
    credit = 0.0
    for p, n in itertools.product(positives, negatives):
        credit += 1.0 if p > n else 0.5 if p == n else 0.0
    return credit / (len(positives) * len(negatives))


class TestFaultDegree:
    def test_identical_rows(self):
        X = np.random.default_rng(0).normal(size=(5, 3))
        np.testing.assert_array_equal(fault_degree(X, X), np.zeros(5))

    def test_half_squared_error(self):
        np.testing.assert_array_equal(fault_degree([[0.0, 0.0]], [[2.0, 0.0]]), [2.0])

    def test_scales_quadratically(self):
        rng = np.random.default_rng(1)
        X, Xhat = rng.normal(size=(6, 4)), rng.normal(size=(6, 4))
        np.testing.assert_allclose(fault_degree(3.0 * X, 3.0 * Xhat), 9.0 * fault_degree(X, Xhat))

    def test_shape_mismatch(self):
        with pytest.raises(ShapeError):
            fault_degree(np.zeros((2, 3)), np.zeros((3, 2)))


class TestThreshold:
    def test_top_one(self):
        flags, threshold = threshold_flags([5, 1, 3, 2], 0.25)
        assert flags.tolist() == [True, False, False, False]
        assert threshold == 5.0

    def test_protocol_count(self):
        scores = np.random.default_rng(2).random(860)
        flags, _ = threshold_flags(scores, 60 / 860)
        assert flags.sum() == 60

    def test_ties_go_to_lower_ids(self):
        flags, _ = threshold_flags(np.ones(10), 0.3)
        assert flags.tolist() == [True] * 3 + [False] * 7

    def test_count_rounds_up(self):
        assert flag_count(10, 0.25) == 3
        assert flag_count(860, 60 / 860) == 60

    def test_threshold_is_lowest_flagged_score(self):
        scores = np.array([0.1, 0.9, 0.4, 0.8, 0.3])
        flags, threshold = threshold_flags(scores, 0.4)
        assert threshold == 0.8
        assert np.all(scores[flags] >= threshold)

    def test_contamination_bounds(self):
        with pytest.raises(InputError):
            threshold_flags([1.0, 2.0], 0.0)
        with pytest.raises(InputError):
            threshold_flags([1.0, 2.0], 1.0)


class TestAuc:
    def test_perfect_ranking(self):
        assert auc([0.9, 0.1], [1, 0]) == 1.0

    def test_hand_pairs(self):
        assert auc([0.8, 0.7, 0.6, 0.5], [1, 0, 1, 0]) == pytest.approx(0.75)

    def test_all_ties(self):
        assert auc([0.3] * 6, [1, 0, 1, 0, 0, 1]) == pytest.approx(0.5)

    def test_matches_pair_enumeration(self):
        rng = np.random.default_rng(3)
        for trial in range(200):
            m = int(rng.integers(2, 60))
            labels = rng.random(m) < 0.3
            labels[0], labels[1] = True, False
            # coarse rounding forces plenty of ties
            scores = np.round(rng.random(m), 1)
            assert auc(scores, labels) == pytest.approx(brute_force_auc(scores, labels), abs=1e-12)

    def test_invariant_under_increasing_transform(self):
        rng = np.random.default_rng(4)
        scores = rng.random(50)
        labels = rng.random(50) < 0.4
        assert auc(np.exp(3 * scores) + 7, labels) == pytest.approx(auc(scores, labels), abs=1e-12)

    def test_random_scores_average_one_half(self):
        rng = np.random.default_rng(5)
        labels = np.array([True, False] * 20)
        values = [auc(rng.random(40), labels) for _ in range(1000)]
        assert abs(np.mean(values) - 0.5) < 0.05

    def test_needs_both_classes(self):
        with pytest.raises(InputError):
            auc([0.1, 0.2], [1, 1])


class TestRates:
    def test_confusion_counts(self):
        flags = [True] * 5 + [False] * 90 + [True] * 3 + [False] * 2
        labels = [True] * 5 + [False] * 90 + [False] * 3 + [True] * 2
        assert confusion(flags, labels) == (5, 90, 3, 2)
        assert acc(flags, labels) == pytest.approx(0.95)
        assert dr(flags, labels) == pytest.approx(5 / 7)

    def test_perfect_flags(self):
        labels = [True, False, False, True]
        assert acc(labels, labels) == 1.0
        assert dr(labels, labels) == 1.0

    def test_no_flags(self):
        assert dr([False, False, False], [True, False, True]) == 0.0

    def test_fault_mask(self):
        assert fault_mask(['normal', 'inner', 'ball', 'normal']).tolist() == [False, True, True, False]


class TestReport:
    def test_perfect_detector(self):
        labels = ['normal'] * 800 + ['inner'] * 60
        scores = np.concatenate([np.linspace(0.0, 1.0, 800), np.linspace(2.0, 3.0, 60)])
        report = evaluate(scores, labels, 60 / 860, runtime_seconds=1.25)
        assert report.metrics == {'auc': 1.0, 'acc': 1.0, 'dr': 1.0, 'runtime_seconds': 1.25}
        assert report.flagged == 60
        assert report.summary_line() == 'AUC=1.0000, ACC=1.0000, DR=1.0000, time=1.25s'

    def test_json_round_trip(self, tmp_path):
        rng = np.random.default_rng(6)
        report = evaluate(rng.random(20), ['normal'] * 15 + ['outer'] * 5, 0.25)
        path = str(tmp_path / 'out' / 'report.json')
        report.write_json(path)
        assert FaultReport.read_json(path) == report

    def test_unlabeled_run_omits_metrics(self):
        report = evaluate([0.5, 0.1, 0.9], None, 0.34)
        assert report.metrics is None
        assert report.flags == [True, False, True]
        assert 'metrics omitted' in report.summary_line()

    def test_unknown_labels_count_as_unlabeled(self):
        assert not has_metric_labels(['normal', ''])
        assert not has_metric_labels(None)
        assert has_metric_labels(['normal', 'ball'])

    def test_plot_csv(self, tmp_path):
        report = evaluate([0.2, 0.7], ['normal', 'inner'], 0.5)
        path = tmp_path / 'plot.csv'
        report.write_csv(str(path))
        assert path.read_text().splitlines() == ['node,score,flag,label', '0,0.2,0,normal', '1,0.7,1,inner']

    def test_missing_report(self, tmp_path):
        with pytest.raises(InputError):
            FaultReport.read_json(str(tmp_path / 'none.json'))


class TestPipeline:
    HYPER = SageHyper(hidden_dim=8, embed_dim=4, k=5, epochs=10, lr=0.01)

    def test_run_produces_full_report(self, clustered_matrix):
        run = run_gsabfd(clustered_matrix, self.HYPER, contamination=4 / 40, timing=False)
        assert len(run.report.scores) == 40
        assert run.report.flagged == 4
        assert run.report.metrics['runtime_seconds'] == 0.0
        assert np.all(run.scores >= 0)
        assert len(run.loss_curve) == 10
        assert run.graph.k == 5

    def test_scores_are_reproducible(self, clustered_matrix):
        first = run_gsabfd(clustered_matrix, self.HYPER, 4 / 40, timing=False)
        second = run_gsabfd(clustered_matrix, self.HYPER, 4 / 40, timing=False)
        assert first.report == second.report

    def test_score_nodes_matches_report(self, clustered_matrix):
        run = run_gsabfd(clustered_matrix, self.HYPER, 4 / 40, timing=False)
        np.testing.assert_array_equal(score_nodes(run.model, run.graph, clustered_matrix), run.scores)

    def test_timing_recorded(self, clustered_matrix):
        run = run_gsabfd(clustered_matrix, self.HYPER, 4 / 40)
        assert run.report.metrics['runtime_seconds'] > 0.0
