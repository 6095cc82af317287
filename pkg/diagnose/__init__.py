"""
Fault scoring, thresholding and evaluation.
"""
from diagnose.metrics import fault_degree, threshold_flags, auc, acc, dr, confusion, fault_mask
from diagnose.report import FaultReport, evaluate
from diagnose.pipeline import DetectionRun, run_gsabfd, score_nodes

__all__ = [
    'fault_degree', 'threshold_flags', 'auc', 'acc', 'dr', 'confusion', 'fault_mask',
    'FaultReport', 'evaluate', 'DetectionRun', 'run_gsabfd', 'score_nodes',
]
