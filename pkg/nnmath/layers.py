"""
Dense layers, activations and the reconstruction loss, with hand-chained
reverse-mode gradients.

A layer caches its last input on ``forward``; ``backward`` accumulates into
``dW``/``db`` and returns the gradient with respect to that input.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional, Tuple

import numpy as np

from utils.errors import ShapeError, TrainingError, ConfigError

logger = logging.getLogger(__name__)

ACTIVATIONS = ('relu', 'linear', 'identity')


def xavier_uniform(n_in: int, n_out: int, rng: np.random.Generator) -> np.ndarray:
    limit = np.sqrt(6.0 / (n_in + n_out))
    return rng.uniform(-limit, limit, size=(n_out, n_in))


@dataclass
class DenseLayer:
    """y = x W^T + b for a batch of row vectors."""

    W: np.ndarray
    b: np.ndarray
    dW: np.ndarray = field(init=False, repr=False)
    db: np.ndarray = field(init=False, repr=False)
    _input: Optional[np.ndarray] = field(default=None, init=False, repr=False)

    def __post_init__(self):
        self.W = np.asarray(self.W, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64).ravel()
        if self.W.ndim != 2 or self.b.size != self.W.shape[0]:
            raise ShapeError(f"weight {self.W.shape} and bias ({self.b.size},) do not match")
        self.dW = np.zeros_like(self.W)
        self.db = np.zeros_like(self.b)

    @classmethod
    def create(cls, n_in: int, n_out: int, rng: np.random.Generator) -> 'DenseLayer':
        """Xavier-uniform weights, zero bias."""
        return cls(xavier_uniform(n_in, n_out, rng), np.zeros(n_out))

    @property
    def n_in(self) -> int:
        return int(self.W.shape[1])

    @property
    def n_out(self) -> int:
        return int(self.W.shape[0])

    def forward(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != self.n_in:
            raise ShapeError(f"layer expects {self.n_in} inputs, got shape {x.shape}")
        self._input = x
        return x @ self.W.T + self.b

    def backward(self, grad_out: np.ndarray) -> np.ndarray:
        if self._input is None:
            raise TrainingError("backward called before forward")
        self.dW += grad_out.T @ self._input
        self.db += grad_out.sum(axis=0)
        return grad_out @ self.W

    def zero_grad(self) -> None:
        self.dW.fill(0.0)
        self.db.fill(0.0)


def dense_forward(x, layer: DenseLayer) -> np.ndarray:
    """Apply a layer to a single vector or a batch without touching its cache."""
    x = np.asarray(x, dtype=np.float64)
    single = x.ndim == 1
    batch = x[None, :] if single else x
    if batch.ndim != 2 or batch.shape[1] != layer.n_in:
        raise ShapeError(f"layer expects {layer.n_in} inputs, got shape {x.shape}")
    y = batch @ layer.W.T + layer.b
    return y[0] if single else y


def relu(x) -> np.ndarray:
    return np.maximum(np.asarray(x, dtype=np.float64), 0.0)


def relu_grad(x) -> np.ndarray:
    """Subgradient mask; 0 at x == 0."""
    return (np.asarray(x) > 0).astype(np.float64)


def check_activation(name: str) -> str:
    if name not in ACTIVATIONS:
        raise ConfigError(f"unknown activation {name!r}")
    return name


def activate(x: np.ndarray, name: str) -> np.ndarray:
    return relu(x) if name == 'relu' else x


def activation_backward(grad: np.ndarray, pre: np.ndarray, name: str) -> np.ndarray:
    return grad * relu_grad(pre) if name == 'relu' else grad


def mse_loss(xhat, x) -> Tuple[float, np.ndarray]:
    """Mean of 1/2 (x - xhat)^2 over all entries, and its gradient w.r.t. xhat."""
    xhat = np.asarray(xhat, dtype=np.float64)
    x = np.asarray(x, dtype=np.float64)
    if xhat.shape != x.shape:
        raise ShapeError(f"reconstruction {xhat.shape} does not match target {x.shape}")
    residual = xhat - x
    count = residual.size
    loss = 0.5 * float(np.sum(residual * residual)) / count
    return loss, residual / count


def l2_normalize(y: np.ndarray, guard: float = 1e-12) -> Tuple[np.ndarray, np.ndarray]:
    """Row-wise unit vectors; rows with norm below ``guard`` stay zero. Returns (z, norms)."""
    norms = np.linalg.norm(y, axis=1)
    z = np.zeros_like(y)
    valid = norms >= guard
    z[valid] = y[valid] / norms[valid, None]
    return z, norms


def l2_normalize_backward(grad_z: np.ndarray, z: np.ndarray, norms: np.ndarray,
                          guard: float = 1e-12) -> np.ndarray:
    grad_y = np.zeros_like(grad_z)
    valid = norms >= guard
    zv = z[valid]
    gz = grad_z[valid]
    grad_y[valid] = (gz - zv * np.sum(zv * gz, axis=1, keepdims=True)) / norms[valid, None]
    return grad_y
