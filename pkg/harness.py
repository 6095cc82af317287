"""
Orchestration of the graph detector and the reference detectors: single runs,
repeated benchmarks and parameter sweeps.
"""
import time
import logging
from typing import Dict, Any, List, Optional, Sequence

import numpy as np
import pandas as pd

from baselines import BaselineConfig, score_baseline
from diagnose.pipeline import run_gsabfd
from diagnose.report import evaluate
from features.extractor import FeatureMatrix
from sage.model import SageHyper
from utils.config import RunConfig
from utils.errors import GsabfdError, InputError
from utils.logging_config import RunLogCollector

logger = logging.getLogger(__name__)

EXECUTION_ORDER = ['gsabfd', 'ae', 'lof', 'knn', 'iforest']
METRICS = ['auc', 'acc', 'dr', 'runtime_seconds']
BENCH_COLUMNS = (['method', 'dataset'] + METRICS + [f"{m}_std" for m in METRICS]
                 + ['runs', 'error'])
SWEEP_COLUMNS = ['value', 'auc_mean', 'auc_std', 'runs', 'error']
SWEEP_RANGES = {'k': (10, 100), 'sampling_ratio': (0.1, 1.0)}
DEFAULT_GRIDS = {
    'k': [10, 20, 30, 40, 50, 60, 70, 80, 90, 100],
    'sampling_ratio': [0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0],
}


class GsabfdDetector:
    """Graph construction, autoencoder training and reconstruction scoring."""

    name = 'gsabfd'

    def __init__(self, config: RunConfig):
        self.config = config

    def score(self, matrix: FeatureMatrix, seed: int) -> np.ndarray:
        hyper = SageHyper(**{**self.config.sage_kwargs(), 'seed': seed})
        return run_gsabfd(matrix, hyper, self.config.contamination, timing=False).scores


class BaselineDetector:
    """One of the reference detectors, configured from the run config."""

    def __init__(self, method: str, config: RunConfig):
        self.name = method
        self.config = config

    def baseline_config(self, matrix: FeatureMatrix, seed: int) -> BaselineConfig:
        c = self.config
        return BaselineConfig(
            method=self.name,
            k=c.lof_k if self.name == 'lof' else c.knn_k,
            trees=c.iforest_trees,
            # small datasets cannot supply the full subsample
            subsample=min(c.iforest_subsample, matrix.m),
            **{**c.ae_kwargs(), 'seed': seed},
        )

    def score(self, matrix: FeatureMatrix, seed: int) -> np.ndarray:
        return score_baseline(matrix, self.baseline_config(matrix, seed))


class DetectionHarness:
    """Runs detectors over labeled feature matrices and collects their metrics."""

    def __init__(self, config: RunConfig):
        """Initialize the harness with a validated run configuration."""
        self.config = config
        self.detectors = self._initialize_detectors()
        self.results: Dict[str, Dict[str, Any]] = {}
        self.failure_logs: List[Dict[str, Any]] = []

    def _initialize_detectors(self) -> Dict[str, Any]:
        detectors = {'gsabfd': GsabfdDetector(self.config)}
        for method in EXECUTION_ORDER[1:]:
            detectors[method] = BaselineDetector(method, self.config)
        logger.info(f"Initialized {len(detectors)} detectors")
        return detectors

    def run_individual_detector(self, name: str, matrix: FeatureMatrix,
                                seed: Optional[int] = None) -> Dict[str, Any]:
        """Score, threshold and evaluate one detector; failures come back as an error dict."""
        seed = self.config.seed if seed is None else seed
        try:
            if name not in self.detectors:
                raise InputError(f"Unknown detector: {name}")
            logger.info(f"Running {name} (seed {seed})...")

            started = time.perf_counter()
            scores = self.detectors[name].score(matrix, seed)
            elapsed = time.perf_counter() - started if self.config.timing else 0.0
            report = evaluate(scores, matrix.labels, self.config.contamination, elapsed)

            result = {
                'status': 'success',
                'method': name,
                'seed': seed,
                'report': report,
                'metrics': report.metrics,
            }
            self.results[name] = result
            logger.info(f"{name} completed: {report.summary_line()}")
            return result

        except Exception as e:
            logger.error(f"Detector {name} failed: {e}")
            error_result = {
                'status': 'error',
                'error': str(e),
                'method': name,
            }
            self.results[name] = error_result
            return error_result

    def run_all_detectors(self, matrix: FeatureMatrix,
                          progress_callback: Optional[callable] = None) -> Dict[str, Any]:
        """Run every detector in a fixed order, continuing past failures."""
        total = len(EXECUTION_ORDER)
        for i, name in enumerate(EXECUTION_ORDER):
            if progress_callback:
                progress_callback(i, total, f"Running {name}...")
            result = self.run_individual_detector(name, matrix)
            if result.get('status') == 'error':
                logger.warning(f"Detector {name} failed, continuing with others...")
        if progress_callback:
            progress_callback(total, total, "Detection complete")

        return {
            'status': 'success',
            'summary': self._generate_summary(),
            'detector_results': self.results,
            'execution_order': EXECUTION_ORDER,
        }

    def _repeated_metrics(self, name: str, matrix: FeatureMatrix, repetitions: int) -> List[Dict[str, float]]:
        runs = []
        for r in range(repetitions):
            result = self.run_individual_detector(name, matrix, self.config.seed + r)
            if result['status'] == 'error':
                raise RuntimeError(result['error'])
            runs.append(result['metrics'])
        return runs

    def bench(self, datasets: Dict[str, FeatureMatrix], methods: Optional[Sequence[str]] = None,
              repetitions: Optional[int] = None,
              progress_callback: Optional[callable] = None) -> pd.DataFrame:
        """Mean and std of every metric per (method, dataset) over repeated seeds.

        Repetition r uses seed ``config.seed + r``. A failing method gets a row
        with empty metrics and its error message; the bench continues.
        """
        methods = list(methods or EXECUTION_ORDER)
        repetitions = repetitions or self.config.repetitions
        for name, matrix in datasets.items():
            if matrix.labels is None:
                raise InputError(f"dataset {name} has no labels; bench needs ground truth")

        collector = RunLogCollector()
        collector.setLevel(logging.WARNING)
        logging.getLogger().addHandler(collector)
        rows = []
        try:
            total = len(methods) * len(datasets)
            step = 0
            for dataset, matrix in datasets.items():
                for method in methods:
                    if progress_callback:
                        progress_callback(step, total, f"{method} on {dataset}")
                    step += 1
                    row: Dict[str, Any] = {'method': method, 'dataset': dataset, 'error': ''}
                    try:
                        runs = self._repeated_metrics(method, matrix, repetitions)
                        for metric in METRICS:
                            values = np.array([run[metric] for run in runs])
                            row[metric] = float(values.mean())
                            row[f"{metric}_std"] = float(values.std())
                        row['runs'] = len(runs)
                    except Exception as e:
                        logger.warning(f"Bench {method} on {dataset} failed: {e}")
                        for metric in METRICS:
                            row[metric] = np.nan
                            row[f"{metric}_std"] = np.nan
                        row['runs'] = 0
                        row['error'] = str(e)
                    rows.append(row)
            if progress_callback:
                progress_callback(total, total, "Bench complete")
        finally:
            logging.getLogger().removeHandler(collector)
        self.failure_logs = collector.get_logs()
        return pd.DataFrame(rows, columns=BENCH_COLUMNS)

    def sweep(self, param: str, matrix: FeatureMatrix, grid: Optional[Sequence[float]] = None,
              repetitions: Optional[int] = None) -> pd.DataFrame:
        """Mean/std AUC of the graph detector over a grid of ``k`` or ``sampling_ratio``."""
        if param not in SWEEP_RANGES:
            raise InputError(f"sweep parameter must be one of {', '.join(SWEEP_RANGES)}, got {param!r}")
        if matrix.labels is None:
            raise InputError("sweep needs a labeled feature matrix")
        grid = list(grid if grid is not None else DEFAULT_GRIDS[param])
        repetitions = repetitions or self.config.repetitions
        low, high = SWEEP_RANGES[param]

        rows = []
        for value in grid:
            row: Dict[str, Any] = {'value': value, 'error': ''}
            try:
                if not low <= value <= high:
                    raise InputError(f"{param}={value} outside the range [{low}, {high}]")
                point = self.config.replace(**{param: int(value) if param == 'k' else float(value)})
                harness = DetectionHarness(point)
                aucs = [run['auc'] for run in harness._repeated_metrics('gsabfd', matrix, repetitions)]
                row.update(auc_mean=float(np.mean(aucs)), auc_std=float(np.std(aucs)), runs=len(aucs))
            except (GsabfdError, RuntimeError) as e:
                logger.warning(f"Sweep point {param}={value} failed: {e}")
                row.update(auc_mean=np.nan, auc_std=np.nan, runs=0, error=str(e))
            rows.append(row)
            logger.info(f"Sweep {param}={value}: AUC {row['auc_mean']:.4f} +/- {row['auc_std']:.4f}")
        return pd.DataFrame(rows, columns=SWEEP_COLUMNS)

    def _generate_summary(self) -> Dict[str, Any]:
        """High-level counts plus the headline metrics of each successful detector."""
        summary = {
            'detectors_executed': len(self.results),
            'successful_detectors': sum(1 for r in self.results.values() if r.get('status') == 'success'),
            'failed_detectors': sum(1 for r in self.results.values() if r.get('status') == 'error'),
            'key_findings': {},
            'overall_status': 'success' if all(r.get('status') == 'success' for r in self.results.values()) else 'partial',
        }
        for name, result in self.results.items():
            if result.get('status') == 'success' and result.get('metrics'):
                summary['key_findings'][name] = {
                    metric: result['metrics'][metric] for metric in ('auc', 'acc', 'dr')
                }
        return summary

    def get_execution_status(self) -> Dict[str, str]:
        return {name: result.get('status', 'not_run') for name, result in self.results.items()}

    def clear_results(self) -> None:
        self.results.clear()
        logger.info("Detector results cleared")


def create_detection_harness(config: RunConfig) -> DetectionHarness:
    """Factory function to create a DetectionHarness instance."""
    return DetectionHarness(config)
