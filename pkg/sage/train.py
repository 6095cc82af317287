"""
Full-batch reconstruction training of the graph autoencoder.
"""
import logging
from typing import Callable, List, Optional, Tuple

import numpy as np
import pandas as pd

from features.extractor import FeatureMatrix, NormStats
from graph.attributed import AttributedGraph
from nnmath.layers import mse_loss
from nnmath.optim import AdamState, adam_step
from sage.model import SageHyper, SageModel, as_rows
from utils.errors import ShapeError, TrainingError

logger = logging.getLogger(__name__)


def train(graph: AttributedGraph, X, hyper: SageHyper,
          norm_stats: Optional[NormStats] = None,
          progress_callback: Optional[Callable[[int, int, float], None]] = None
          ) -> Tuple[SageModel, List[float]]:
    """Train for ``hyper.epochs`` epochs; returns the model and the per-epoch loss.

    Each epoch draws fresh neighbour samples for every hop, runs
    encode/decode over all nodes, and takes one Adam step. A non-finite loss
    aborts with the epoch number.
    """
    rows = as_rows(X)
    if norm_stats is None and isinstance(X, FeatureMatrix):
        norm_stats = X.norm_stats
    if rows.ndim != 2 or rows.shape[0] != graph.m:
        raise ShapeError(f"feature matrix {rows.shape} does not match a {graph.m}-node graph")

    model = SageModel(hyper, rows.shape[1], norm_stats)
    rng = model.sampling_rng()
    state = AdamState()
    loss_curve: List[float] = []

    logger.info(f"Training on {graph.m} nodes: depth {hyper.depth}, "
                f"dims {hyper.hidden_dim}/{hyper.embed_dim}, ratio {hyper.sampling_ratio}, "
                f"{hyper.epochs} epochs at lr {hyper.lr}")
    for epoch in range(1, hyper.epochs + 1):
        model.zero_grad()
        Z = model.encode(graph, rows, 'train', rng)
        loss, grad = mse_loss(model.decode(Z), rows)
        if not np.isfinite(loss):
            raise TrainingError(f"non-finite loss at epoch {epoch} (lr={hyper.lr} may be too high)")
        model.backward(grad)
        adam_step(model.parameters(), model.gradients(), state, hyper.lr)
        loss_curve.append(loss)
        logger.debug(f"epoch {epoch}: loss {loss:.6f}")
        if progress_callback:
            progress_callback(epoch, hyper.epochs, loss)

    model.adam = state
    logger.info(f"Training finished: loss {loss_curve[0]:.6f} -> {loss_curve[-1]:.6f}")
    return model, loss_curve


def write_training_log(loss_curve: List[float], path: str) -> None:
    frame = pd.DataFrame({'epoch': np.arange(1, len(loss_curve) + 1), 'loss': loss_curve})
    frame.to_csv(path, index=False, lineterminator='\n')
