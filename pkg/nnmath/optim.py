"""
Adam with bias correction over named parameter blocks.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict

import numpy as np

from utils.errors import TrainingError, ConfigError

logger = logging.getLogger(__name__)


@dataclass
class AdamState:
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    step: int = 0
    m: Dict[str, np.ndarray] = field(default_factory=dict)
    v: Dict[str, np.ndarray] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'beta1': self.beta1, 'beta2': self.beta2, 'eps': self.eps, 'step': self.step,
            'm': {name: value.tolist() for name, value in self.m.items()},
            'v': {name: value.tolist() for name, value in self.v.items()},
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'AdamState':
        return cls(
            beta1=float(data['beta1']), beta2=float(data['beta2']),
            eps=float(data['eps']), step=int(data['step']),
            m={name: np.asarray(value, dtype=np.float64) for name, value in data['m'].items()},
            v={name: np.asarray(value, dtype=np.float64) for name, value in data['v'].items()},
        )


def adam_step(params: Dict[str, np.ndarray], grads: Dict[str, np.ndarray],
              state: AdamState, lr: float) -> AdamState:
    """Update ``params`` in place and advance ``state``.

    Every gradient block is checked before anything is modified, so a
    non-finite block leaves parameters and moments untouched.
    """
    if not lr > 0:
        raise ConfigError(f"learning rate must be > 0, got {lr}")
    for name, param in params.items():
        grad = grads[name]
        if grad.shape != param.shape:
            raise TrainingError(f"gradient for {name} has shape {grad.shape}, parameter {param.shape}")
        if not np.all(np.isfinite(grad)):
            raise TrainingError(f"non-finite gradient in parameter block {name}")

    state.step += 1
    correction1 = 1.0 - state.beta1 ** state.step
    correction2 = 1.0 - state.beta2 ** state.step
    for name, param in params.items():
        grad = grads[name]
        m = state.m.setdefault(name, np.zeros_like(param))
        v = state.v.setdefault(name, np.zeros_like(param))
        m *= state.beta1
        m += (1.0 - state.beta1) * grad
        v *= state.beta2
        v += (1.0 - state.beta2) * grad * grad
        param -= lr * (m / correction1) / (np.sqrt(v / correction2) + state.eps)
    return state
