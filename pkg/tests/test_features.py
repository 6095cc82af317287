import math

import numpy as np
import pytest

from features.emd import EemdParams, emd, eemd, eemd_features, is_imf, count_extrema
from features.extractor import (
    N_FEATURES, FeatureMatrix, extract, extract_matrix, standardize, apply_stats,
    unstandardize, write_feature_csv, read_feature_csv, stats_path_for, window_seed,
)
from features.time_domain import time_features
from features.wavelet import daubechies_filters, dwt_subbands, dwt_reconstruct, dwt_features
from ingest.signals import Window
from ingest.windows import slice_windows
from utils.errors import InputError, ShapeError

FAST_EEMD = EemdParams(ensemble_size=4)


class TestTimeFeatures:
    def test_constant_window(self):
        np.testing.assert_allclose(time_features([2, 2, 2, 2]), [2, 0, 4, 2, 1, 1, 1, 0, 0])

    def test_alternating_window(self):
        expected = [1, math.sqrt(4 / 3), 1, 1, 1, 1, 1, 1, 0]
        np.testing.assert_allclose(time_features([1, -1, 1, -1]), expected, atol=1e-12)

    def test_ramp_window(self):
        rms = math.sqrt(7.5)
        expected = [4, math.sqrt(5 / 3), 7.5, rms, 4 / rms, 1.6, rms / 2.5, 1.64, 0]
        np.testing.assert_allclose(time_features([1, 2, 3, 4]), expected, atol=1e-12)

    def test_accepts_window_objects(self):
        window = Window(np.array([1.0, 2.0, 3.0, 4.0]), 'normal', 0)
        np.testing.assert_array_equal(time_features(window), time_features([1, 2, 3, 4]))

    def test_zero_window_is_all_zero(self):
        np.testing.assert_array_equal(time_features(np.zeros(300)), np.zeros(9))


def _oracle_step(x):
    """Loop-based periodized filter bank step used as a reference."""
    low, high = daubechies_filters()
    if len(x) % 2:
        x = np.append(x, 0.0)
    n = len(x)
    approx = np.zeros(n // 2)
    detail = np.zeros(n // 2)
    for k in range(n // 2):
        for j in range(len(low)):
            approx[k] += low[j] * x[(2 * k + j) % n]
            detail[k] += high[j] * x[(2 * k + j) % n]
    return approx, detail


class TestWavelet:
    def test_filter_is_length_20_orthonormal(self):
        low, high = daubechies_filters()
        assert low.size == 20
        assert np.dot(low, low) == pytest.approx(1.0, abs=1e-12)
        assert np.dot(low, high) == pytest.approx(0.0, abs=1e-12)
        for shift in range(2, 20, 2):
            assert np.dot(low[:-shift], low[shift:]) == pytest.approx(0.0, abs=1e-12)

    def test_detail_lengths_for_300_samples(self):
        decomposition = dwt_subbands(np.random.default_rng(0).normal(size=300))
        assert [d.size for d in decomposition.details] == [150, 75, 38, 19, 10, 5, 3, 2]
        assert decomposition.approximation.size == 1

    def test_energy_and_reconstruction(self):
        rng = np.random.default_rng(1)
        for _ in range(100):
            x = rng.normal(size=300)
            decomposition = dwt_subbands(x)
            energy = sum(np.dot(d, d) for d in decomposition.details)
            energy += np.dot(decomposition.approximation, decomposition.approximation)
            assert energy == pytest.approx(np.dot(x, x), rel=1e-10)
            np.testing.assert_allclose(dwt_reconstruct(decomposition), x, atol=1e-10)

    def test_matches_loop_oracle(self):
        x = np.random.default_rng(2).normal(size=75)
        decomposition = dwt_subbands(x, levels=3)
        approx = x
        for level in range(3):
            approx, detail = _oracle_step(approx)
            np.testing.assert_allclose(decomposition.details[level], detail, atol=1e-12)
        np.testing.assert_allclose(decomposition.approximation, approx, atol=1e-12)

    def test_zero_window(self):
        np.testing.assert_array_equal(dwt_features(np.zeros(300)), np.zeros(8))

    def test_low_frequency_energy_sits_in_deep_levels(self):
        x = np.sin(2 * np.pi * 10 * np.arange(300) / 300)
        features = dwt_features(x)
        assert features[0] < 1e-3
        assert int(np.argmax(features)) in (3, 4)
        assert features.sum() <= 1.0 + 1e-12

    def test_rejects_tiny_signal(self):
        with pytest.raises(InputError):
            dwt_subbands([1.0])


class TestEmd:
    def test_identity_holds(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            x = rng.normal(size=120)
            result = emd(x)
            assert np.max(np.abs(result.reconstruct() - x)) < 1e-10

    def test_monotone_input_has_no_imfs(self):
        x = np.arange(1.0, 301.0)
        imfs, residue = emd(x)
        assert imfs == []
        np.testing.assert_array_equal(residue, x)

    def test_first_imf_tracks_fast_component(self):
        t = np.arange(300) / 1000.0
        fast = np.sin(2 * np.pi * 40 * t)
        result = emd(np.sin(2 * np.pi * 3 * t) + fast)
        assert abs(np.corrcoef(result.imfs[0], fast)[0, 1]) > 0.9

    def test_each_imf_is_valid_or_capped(self):
        rng = np.random.default_rng(4)
        for _ in range(20):
            result = emd(rng.normal(size=200))
            assert len(result.imfs) <= 6
            for imf, capped, count in zip(result.imfs, result.capped, result.sift_counts):
                assert is_imf(imf) or capped
                assert count <= 10
            assert count_extrema(result.residue) < 3 or len(result.imfs) == 6

    def test_rejects_short_signal(self):
        with pytest.raises(InputError):
            emd(np.ones(4))

    def test_params_validation(self):
        with pytest.raises(InputError):
            EemdParams(ensemble_size=0)


class TestEemd:
    def test_zero_window(self):
        np.testing.assert_array_equal(eemd_features(np.zeros(300), FAST_EEMD), np.zeros(6))

    def test_deterministic(self):
        x = np.random.default_rng(5).normal(size=300)
        np.testing.assert_array_equal(eemd_features(x, FAST_EEMD, seed=11),
                                      eemd_features(x, FAST_EEMD, seed=11))

    def test_seed_changes_noise(self):
        x = np.random.default_rng(5).normal(size=300)
        assert not np.array_equal(eemd(x, FAST_EEMD, seed=1)[0], eemd(x, FAST_EEMD, seed=2)[0])

    def test_features_bounded(self):
        x = np.random.default_rng(6).normal(size=300)
        features = eemd_features(x, FAST_EEMD)
        assert np.all(features >= 0) and np.all(features <= 1)

    def test_impulsive_window_has_more_first_mode_energy(self, synth_pair):
        normal, fault = synth_pair
        params = EemdParams(ensemble_size=10)
        normal_first = [eemd_features(w, params, seed=i)[0] for i, w in enumerate(slice_windows(normal)[:3])]
        fault_first = [eemd_features(w, params, seed=i)[0] for i, w in enumerate(slice_windows(fault)[:3])]
        assert np.mean(fault_first) > np.mean(normal_first)


class TestExtract:
    def test_vector_layout(self):
        window = Window(np.random.default_rng(7).normal(size=300), 'normal', 0)
        vector = extract(window, FAST_EEMD, seed=0)
        assert vector.shape == (N_FEATURES,) == (23,)
        np.testing.assert_array_equal(vector[:9], time_features(window))
        np.testing.assert_array_equal(vector[9:17], dwt_features(window))

    def test_zero_window(self):
        window = Window(np.zeros(300), 'normal', 0)
        np.testing.assert_array_equal(extract(window, FAST_EEMD), np.zeros(23))

    def test_matrix_is_deterministic_across_workers(self, synth_pair):
        windows = slice_windows(synth_pair[0])[:4] + slice_windows(synth_pair[1])[:2]
        params = EemdParams(ensemble_size=2)
        serial = extract_matrix(windows, params, seed=3, workers=1)
        pooled = extract_matrix(windows, params, seed=3, workers=2)
        np.testing.assert_array_equal(serial.rows, pooled.rows)
        assert serial.labels == ['normal'] * 4 + ['inner'] * 2

    def test_window_seed_depends_on_position(self):
        assert window_seed(0, 1) != window_seed(0, 2)
        assert window_seed(4, 9) == window_seed(4, 9)


class TestStandardize:
    def test_column_zscores(self):
        matrix = FeatureMatrix(np.array([[1.0, 5.0], [2.0, 5.0], [3.0, 5.0]]))
        result = standardize(matrix)
        np.testing.assert_allclose(result.rows[:, 0], [-1.0, 0.0, 1.0])
        np.testing.assert_array_equal(result.rows[:, 1], 0.0)
        np.testing.assert_allclose(result.norm_stats.mean, [2.0, 5.0])
        assert result.norm_stats.std[0] == pytest.approx(1.0)
        assert result.norm_stats.zero_columns == [1]

    def test_apply_stats_reuses_training_scale(self):
        train = standardize(FeatureMatrix(np.array([[0.0, 1.0], [2.0, 1.0], [4.0, 1.0]])))
        fresh = apply_stats(FeatureMatrix(np.array([[2.0, 9.0], [6.0, 3.0]])), train.norm_stats)
        np.testing.assert_allclose(fresh.rows, [[0.0, 0.0], [2.0, 0.0]])

    def test_apply_stats_rejects_width_mismatch(self):
        train = standardize(FeatureMatrix(np.eye(3)))
        with pytest.raises(ShapeError):
            apply_stats(FeatureMatrix(np.ones((2, 2))), train.norm_stats)

    def test_unstandardize_recovers_raw_rows(self):
        raw = FeatureMatrix(np.array([[1.0, 5.0], [2.0, 5.0], [4.0, 5.0]]), ['normal'] * 3)
        restored = unstandardize(standardize(raw))
        np.testing.assert_allclose(restored.rows, raw.rows, atol=1e-12)
        assert restored.labels == raw.labels and restored.norm_stats is None

    def test_matrix_needs_two_rows(self):
        with pytest.raises(InputError):
            FeatureMatrix(np.ones((1, 23)))


class TestFeatureCsv:
    def test_round_trip_with_stats(self, tmp_path, clustered_matrix):
        path = str(tmp_path / 'features.csv')
        write_feature_csv(clustered_matrix, path)
        loaded = read_feature_csv(path)
        np.testing.assert_array_equal(loaded.rows, clustered_matrix.rows)
        assert loaded.labels == clustered_matrix.labels
        np.testing.assert_array_equal(loaded.norm_stats.std, clustered_matrix.norm_stats.std)

    def test_header(self, tmp_path):
        path = str(tmp_path / 'features.csv')
        write_feature_csv(FeatureMatrix(np.zeros((2, 23)), ['normal', 'ball']), path)
        header = open(path).readline().strip()
        assert header == ','.join([f"f{i}" for i in range(1, 24)] + ['label'])

    def test_unlabeled_file(self, tmp_path):
        path = str(tmp_path / 'plain.csv')
        write_feature_csv(FeatureMatrix(np.ones((3, 23))), path)
        loaded = read_feature_csv(path)
        assert loaded.labels is None
        assert loaded.norm_stats is None

    def test_sidecar_name(self):
        assert stats_path_for('out/features.csv') == 'out/features.stats.json'

    def test_missing_file(self, tmp_path):
        with pytest.raises(InputError):
            read_feature_csv(str(tmp_path / 'absent.csv'))
