"""
Plain fully connected autoencoder baseline: the same training and scoring
rules as the graph model, without any neighbour aggregation.

Layout: in -> hidden (ReLU) -> embed (linear) -> hidden (ReLU) -> in (identity).
"""
import logging
from typing import Dict, List, Tuple

import numpy as np

from baselines.config import BaselineConfig
from diagnose.metrics import fault_degree
from features.extractor import FeatureMatrix
from nnmath.layers import DenseLayer, relu, relu_grad, mse_loss
from nnmath.optim import AdamState, adam_step
from utils.errors import TrainingError

logger = logging.getLogger(__name__)


class Autoencoder:
    """Four dense layers with hand-chained gradients."""

    def __init__(self, in_dim: int, hidden_dim: int = 32, embed_dim: int = 16, seed: int = 0):
        rng = np.random.default_rng(np.random.SeedSequence(seed))
        self.layers: List[DenseLayer] = [
            DenseLayer.create(in_dim, hidden_dim, rng),
            DenseLayer.create(hidden_dim, embed_dim, rng),
            DenseLayer.create(embed_dim, hidden_dim, rng),
            DenseLayer.create(hidden_dim, in_dim, rng),
        ]
        self._pre = None

    def parameters(self) -> Dict[str, np.ndarray]:
        params = {}
        for j, layer in enumerate(self.layers):
            params[f"ae{j}.W"] = layer.W
            params[f"ae{j}.b"] = layer.b
        return params

    def gradients(self) -> Dict[str, np.ndarray]:
        grads = {}
        for j, layer in enumerate(self.layers):
            grads[f"ae{j}.W"] = layer.dW
            grads[f"ae{j}.b"] = layer.db
        return grads

    def zero_grad(self) -> None:
        for layer in self.layers:
            layer.zero_grad()

    def forward(self, X: np.ndarray) -> np.ndarray:
        pre0 = self.layers[0].forward(X)
        embed = self.layers[1].forward(relu(pre0))
        pre2 = self.layers[2].forward(embed)
        self._pre = (pre0, pre2)
        return self.layers[3].forward(relu(pre2))

    def backward(self, grad_xhat: np.ndarray) -> None:
        if self._pre is None:
            raise TrainingError("backward called before forward")
        pre0, pre2 = self._pre
        grad = self.layers[3].backward(grad_xhat) * relu_grad(pre2)
        grad = self.layers[2].backward(grad)
        grad = self.layers[1].backward(grad) * relu_grad(pre0)
        self.layers[0].backward(grad)
        self._pre = None

    def loss_and_gradients(self, graph, X) -> Tuple[float, Dict[str, np.ndarray]]:
        """Loss and gradient copies; ``graph`` is accepted for interface parity and ignored."""
        rows = X.rows if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=np.float64)
        self.zero_grad()
        loss, grad = mse_loss(self.forward(rows), rows)
        self.backward(grad)
        return loss, {name: value.copy() for name, value in self.gradients().items()}


def train_autoencoder(X, config: BaselineConfig) -> Tuple[Autoencoder, List[float]]:
    rows = X.rows if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=np.float64)
    model = Autoencoder(rows.shape[1], config.hidden_dim, config.embed_dim, config.seed)
    state = AdamState()
    loss_curve: List[float] = []
    for epoch in range(1, config.epochs + 1):
        model.zero_grad()
        loss, grad = mse_loss(model.forward(rows), rows)
        if not np.isfinite(loss):
            raise TrainingError(f"autoencoder loss became non-finite at epoch {epoch}")
        model.backward(grad)
        adam_step(model.parameters(), model.gradients(), state, config.lr)
        loss_curve.append(loss)
    logger.debug(f"Autoencoder trained: loss {loss_curve[0]:.6f} -> {loss_curve[-1]:.6f}")
    return model, loss_curve


def ae_scores(matrix, config: BaselineConfig) -> np.ndarray:
    """Reconstruction fault degree per row after training on all rows."""
    rows = matrix.rows if isinstance(matrix, FeatureMatrix) else np.asarray(matrix, dtype=np.float64)
    model, _ = train_autoencoder(rows, config)
    return fault_degree(rows, model.forward(rows))
