"""
Central finite-difference check of analytic gradients.

Any model exposing ``parameters()`` (live named arrays) and
``loss_and_gradients(graph, X)`` (deterministic, full neighbourhoods) can be
checked. Models that also expose ``loss_and_pattern(graph, X)`` get kink
handling: a difference quotient is only accepted when the on/off pattern of
every ReLU at both perturbed points matches the unperturbed one. Otherwise the
step shrinks, and an entry that still straddles a kink is skipped and recorded.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

ABSOLUTE_FLOOR = 1e-8
STEP_DIVISORS = (1.0, 10.0, 100.0)


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(ABSOLUTE_FLOOR, abs(analytic) + abs(numeric))


@dataclass
class GradCheckReport:
    """Worst relative error plus the entries that needed a smaller step or were skipped."""

    worst: float = 0.0
    worst_entry: Optional[str] = None
    checked: int = 0
    reduced: Dict[str, float] = field(default_factory=dict)
    skipped: List[str] = field(default_factory=list)


def _evaluate(model, graph, X) -> Tuple[float, Optional[np.ndarray]]:
    if hasattr(model, 'loss_and_pattern'):
        return model.loss_and_pattern(graph, X)
    loss, _ = model.loss_and_gradients(graph, X)
    return loss, None


def _central_difference(model, graph, X, flat: np.ndarray, idx: int, eps: float,
                        base_pattern: Optional[np.ndarray]) -> Tuple[Optional[float], Optional[float]]:
    """(numeric gradient, step used), or (None, None) when every step crosses a kink."""
    original = flat[idx]
    try:
        for divisor in STEP_DIVISORS:
            step = eps / divisor
            flat[idx] = original + step
            plus, plus_pattern = _evaluate(model, graph, X)
            flat[idx] = original - step
            minus, minus_pattern = _evaluate(model, graph, X)
            if base_pattern is None or (np.array_equal(plus_pattern, base_pattern)
                                        and np.array_equal(minus_pattern, base_pattern)):
                return (plus - minus) / (2.0 * step), step
        return None, None
    finally:
        flat[idx] = original


def check_gradients(model, graph, X, eps: float = 1e-5) -> GradCheckReport:
    """Compare analytic gradients with central differences entry by entry."""
    _, analytic = model.loss_and_gradients(graph, X)
    _, base_pattern = _evaluate(model, graph, X)

    report = GradCheckReport()
    for name, param in model.parameters().items():
        flat = param.reshape(-1)
        grad = analytic[name].reshape(-1)
        for idx in range(flat.size):
            entry = f"{name}[{idx}]"
            numeric, step = _central_difference(model, graph, X, flat, idx, eps, base_pattern)
            if numeric is None:
                report.skipped.append(entry)
                continue
            if step != eps:
                report.reduced[entry] = step
            report.checked += 1
            error = relative_error(float(grad[idx]), numeric)
            if error > report.worst:
                report.worst, report.worst_entry = error, entry

    logger.debug(f"Gradient check: max relative error {report.worst:.3e} at {report.worst_entry}, "
                 f"{len(report.reduced)} entries at a reduced step")
    if report.skipped:
        logger.warning(f"Gradient check skipped {len(report.skipped)} entries on a ReLU kink: "
                       f"{', '.join(report.skipped[:5])}")
    return report


def grad_check(model, graph, X, eps: float = 1e-5) -> float:
    """Max relative error between analytic and numerical gradients over all parameters."""
    return check_gradients(model, graph, X, eps).worst
