"""
FaultReport: scores, flags, threshold and metrics for one detection run,
with JSON and plot-data CSV serialization.
"""
import os
import json
import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from diagnose.metrics import threshold_flags, auc, acc, dr, fault_mask
from utils.errors import InputError, DataFormatError, ShapeError

logger = logging.getLogger(__name__)

METRIC_KEYS = ('auc', 'acc', 'dr', 'runtime_seconds')


@dataclass
class FaultReport:
    scores: List[float]
    flags: List[bool]
    threshold: float
    contamination: float
    labels: Optional[List[str]] = None
    metrics: Optional[Dict[str, float]] = None

    def __post_init__(self):
        if len(self.scores) != len(self.flags):
            raise ShapeError(f"{len(self.scores)} scores for {len(self.flags)} flags")
        if self.labels is not None and len(self.labels) != len(self.scores):
            raise ShapeError(f"{len(self.labels)} labels for {len(self.scores)} scores")

    @property
    def flagged(self) -> int:
        return int(sum(self.flags))

    def summary_line(self) -> str:
        if not self.metrics:
            return f"flagged {self.flagged}/{len(self.scores)} nodes (no labels, metrics omitted)"
        m = self.metrics
        return (f"AUC={m['auc']:.4f}, ACC={m['acc']:.4f}, DR={m['dr']:.4f}, "
                f"time={m['runtime_seconds']:.2f}s")

    def to_dict(self) -> dict:
        data = {
            'scores': [float(s) for s in self.scores],
            'flags': [bool(f) for f in self.flags],
            'threshold': float(self.threshold),
            'contamination': float(self.contamination),
            'metrics': dict(self.metrics) if self.metrics is not None else None,
        }
        if self.labels is not None:
            data['labels'] = list(self.labels)
        return data

    @classmethod
    def from_dict(cls, data: dict) -> 'FaultReport':
        try:
            return cls(
                scores=[float(s) for s in data['scores']],
                flags=[bool(f) for f in data['flags']],
                threshold=float(data['threshold']),
                contamination=float(data['contamination']),
                labels=data.get('labels'),
                metrics=data.get('metrics'),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DataFormatError(f"malformed fault report: {e}")

    def write_json(self, path: str) -> None:
        directory = os.path.dirname(path)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(path, 'w', encoding='utf-8') as handle:
            json.dump(self.to_dict(), handle, indent=2, sort_keys=True)

    @classmethod
    def read_json(cls, path: str) -> 'FaultReport':
        if not os.path.isfile(path):
            raise InputError(f"report not found: {path}")
        with open(path, 'r', encoding='utf-8') as handle:
            return cls.from_dict(json.load(handle))

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'node': np.arange(len(self.scores)),
            'score': self.scores,
            'flag': [int(f) for f in self.flags],
            'label': self.labels if self.labels is not None else '',
        })

    def write_csv(self, path: str) -> None:
        """Plot data: one ``node,score,flag,label`` row per node."""
        self.to_frame().to_csv(path, index=False, lineterminator='\n')


def has_metric_labels(labels: Optional[Sequence[str]]) -> bool:
    return labels is not None and all(label not in ('', 'unknown') for label in labels)


def evaluate(scores, labels: Optional[Sequence[str]], contamination: float,
             runtime_seconds: float = 0.0) -> FaultReport:
    """Threshold the scores and, when ground truth exists, compute all metrics."""
    scores = np.asarray(scores, dtype=np.float64)
    flags, threshold = threshold_flags(scores, contamination)
    metrics = None
    if has_metric_labels(labels):
        if len(labels) != scores.size:
            raise ShapeError(f"{len(labels)} labels for {scores.size} scores")
        positive = fault_mask(labels)
        metrics = {
            'auc': auc(scores, positive),
            'acc': acc(flags, positive),
            'dr': dr(flags, positive),
            'runtime_seconds': float(runtime_seconds),
        }
    else:
        logger.info("No ground-truth labels; metrics omitted")
    return FaultReport(
        scores=scores.tolist(),
        flags=flags.tolist(),
        threshold=threshold,
        contamination=contamination,
        labels=list(labels) if labels is not None else None,
        metrics=metrics,
    )
