"""
GraphSAGE-style encoder with a fully connected decoder.

Each hop aggregates the mean of a node's own vector and its (sampled)
neighbours, concatenates the node's vector with that mean, and applies a
dense layer and the activation. After the last hop the rows are L2
normalized; the decoder maps embeddings back to the feature space through
one hidden layer and an identity output.

Aggregation for all nodes is one sparse row-stochastic operator P, so a hop
is ``act([H | P H] W^T + b)`` and its backward pass adds ``P^T dA`` to the
gradient of H.
"""
import math
import logging
from dataclasses import dataclass, asdict
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse

from features.extractor import FeatureMatrix, NormStats, N_FEATURES
from graph.attributed import AttributedGraph
from nnmath.checkpoint import Checkpoint
from nnmath.layers import (
    DenseLayer, dense_forward, activate, activation_backward, check_activation,
    l2_normalize, l2_normalize_backward, mse_loss,
)
from nnmath.optim import AdamState
from utils.errors import ConfigError, InputError, ShapeError, TrainingError, DataFormatError

logger = logging.getLogger(__name__)

WEIGHT_GUARD = 1e-12
MODES = ('train', 'inference')


@dataclass(frozen=True)
class SageHyper:
    depth: int = 2
    hidden_dim: int = 32
    embed_dim: int = 16
    k: int = 20
    sampling_ratio: float = 0.5
    epochs: int = 100
    lr: float = 0.003
    seed: int = 0
    weighted_mean: bool = False
    activation: str = 'relu'

    def __post_init__(self):
        if not 0 < self.sampling_ratio <= 1:
            raise ConfigError(f"sampling_ratio must be in (0, 1], got {self.sampling_ratio}")
        if self.depth < 1:
            raise ConfigError("depth must be >= 1")
        if self.hidden_dim < 1 or self.embed_dim < 1:
            raise ConfigError("hidden_dim and embed_dim must be >= 1")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if not self.lr > 0:
            raise ConfigError("lr must be > 0")
        check_activation(self.activation)


def as_rows(X) -> np.ndarray:
    return X.rows if isinstance(X, FeatureMatrix) else np.asarray(X, dtype=np.float64)


def sample_size(k: int, ratio: float) -> int:
    """ceil(ratio * k), at least one neighbour."""
    return max(1, min(k, math.ceil(ratio * k - 1e-9)))


def sample_neighbors(graph: AttributedGraph, v: int, ratio: float,
                     rng: np.random.Generator) -> np.ndarray:
    """Uniform sample without replacement from the neighbours of v."""
    if not 0 < ratio <= 1:
        raise InputError(f"sampling ratio must be in (0, 1], got {ratio}")
    stored = graph.neighbors[v]
    if ratio == 1:
        return stored.copy()
    picks = rng.choice(graph.k, size=sample_size(graph.k, ratio), replace=False)
    return stored[picks]


def sample_positions(m: int, k: int, ratio: float,
                     rng: Optional[np.random.Generator]) -> np.ndarray:
    """Per node, the positions in its neighbour list used this hop (m x s)."""
    if ratio >= 1 or rng is None:
        return np.tile(np.arange(k), (m, 1))
    return np.argsort(rng.random((m, k)), axis=1)[:, :sample_size(k, ratio)]


def aggregation_operator(graph: AttributedGraph, positions: np.ndarray,
                         weighted: bool = False) -> sparse.csr_matrix:
    """Row-stochastic m x m operator averaging each node with its sampled neighbours.

    Unweighted: self and every sampled neighbour get 1/(1+s). Weighted: the row
    of M = A + E_m restricted to the sample, neighbour weights renormalized to
    sum 1, divided by the row sum 2.
    """
    m = graph.m
    s = positions.shape[1]
    cols = np.take_along_axis(graph.neighbors, positions, axis=1)
    if weighted:
        w = np.take_along_axis(graph.weights, positions, axis=1)
        totals = w.sum(axis=1, keepdims=True)
        w = np.where(totals >= WEIGHT_GUARD, w / np.where(totals >= WEIGHT_GUARD, totals, 1.0), 1.0 / s)
        self_values = np.full(m, 0.5)
        neighbor_values = 0.5 * w
    else:
        self_values = np.full(m, 1.0 / (1 + s))
        neighbor_values = np.full((m, s), 1.0 / (1 + s))

    rows = np.concatenate([np.arange(m), np.repeat(np.arange(m), s)])
    columns = np.concatenate([np.arange(m), cols.ravel()])
    values = np.concatenate([self_values, neighbor_values.ravel()])
    return sparse.csr_matrix((values, (rows, columns)), shape=(m, m))


def aggregate_mean(h_v, h_neighbors: Sequence) -> np.ndarray:
    """Unweighted mean of the self vector and the neighbour vectors."""
    h_v = np.asarray(h_v, dtype=np.float64)
    stack = [h_v] + [np.asarray(h, dtype=np.float64) for h in h_neighbors]
    for h in stack[1:]:
        if h.shape != h_v.shape:
            raise ShapeError(f"neighbour vector {h.shape} does not match self vector {h_v.shape}")
    return np.mean(np.vstack(stack), axis=0)


def sage_layer(graph: AttributedGraph, H: np.ndarray, layer: DenseLayer,
               ratio: float = 1.0, rng: Optional[np.random.Generator] = None,
               full_mode: bool = True, activation: str = 'relu',
               weighted: bool = False) -> np.ndarray:
    """One hop: act(W concat(h_v, mean(h_v, sampled h_u)) + b) for every node."""
    H = np.asarray(H, dtype=np.float64)
    if H.shape[0] != graph.m:
        raise ShapeError(f"{H.shape[0]} rows for a {graph.m}-node graph")
    positions = sample_positions(graph.m, graph.k, 1.0 if full_mode else ratio, rng)
    P = aggregation_operator(graph, positions, weighted)
    return activate(dense_forward(np.hstack([H, P @ H]), layer), activation)


class SageModel:
    """Encoder hops plus decoder, with hand-chained gradients."""

    def __init__(self, hyper: SageHyper, in_dim: int = N_FEATURES,
                 norm_stats: Optional[NormStats] = None):
        """Initialize layers with Xavier-uniform weights drawn from the hyper seed."""
        self.hyper = hyper
        self.in_dim = in_dim
        self.norm_stats = norm_stats
        self.adam: Optional[AdamState] = None

        init_seq, _ = np.random.SeedSequence(hyper.seed).spawn(2)
        rng = np.random.default_rng(init_seq)
        dims = [in_dim] + [hyper.hidden_dim] * (hyper.depth - 1) + [hyper.embed_dim]
        self.hops: List[DenseLayer] = [
            DenseLayer.create(2 * dims[j], dims[j + 1], rng) for j in range(hyper.depth)
        ]
        self.decoder: List[DenseLayer] = [
            DenseLayer.create(hyper.embed_dim, hyper.hidden_dim, rng),
            DenseLayer.create(hyper.hidden_dim, in_dim, rng),
        ]
        self._hop_tape: Optional[List[Tuple[sparse.csr_matrix, np.ndarray, int]]] = None
        self._norm_tape: Optional[Tuple[np.ndarray, np.ndarray]] = None
        self._decode_tape: Optional[np.ndarray] = None

    def sampling_rng(self) -> np.random.Generator:
        """Neighbour-sampling stream, independent of the initialization stream."""
        _, sample_seq = np.random.SeedSequence(self.hyper.seed).spawn(2)
        return np.random.default_rng(sample_seq)

    def parameters(self) -> Dict[str, np.ndarray]:
        params = {}
        for prefix, layers in (('hop', self.hops), ('dec', self.decoder)):
            for j, layer in enumerate(layers):
                params[f"{prefix}{j}.W"] = layer.W
                params[f"{prefix}{j}.b"] = layer.b
        return params

    def gradients(self) -> Dict[str, np.ndarray]:
        grads = {}
        for prefix, layers in (('hop', self.hops), ('dec', self.decoder)):
            for j, layer in enumerate(layers):
                grads[f"{prefix}{j}.W"] = layer.dW
                grads[f"{prefix}{j}.b"] = layer.db
        return grads

    def zero_grad(self) -> None:
        for layer in self.hops + self.decoder:
            layer.zero_grad()

    def encode(self, graph: AttributedGraph, X, mode: str = 'inference',
               rng: Optional[np.random.Generator] = None) -> np.ndarray:
        """Embeddings Z (m x embed_dim); train mode samples neighbours per hop."""
        if mode not in MODES:
            raise InputError(f"mode must be one of {MODES}, got {mode!r}")
        H = as_rows(X)
        if H.ndim != 2 or H.shape != (graph.m, self.in_dim):
            raise ShapeError(f"expected a {graph.m}x{self.in_dim} feature matrix, got {H.shape}")
        if mode == 'train' and rng is None:
            rng = self.sampling_rng()
        ratio = self.hyper.sampling_ratio if mode == 'train' else 1.0

        tape = []
        for layer in self.hops:
            positions = sample_positions(graph.m, graph.k, ratio, rng)
            P = aggregation_operator(graph, positions, self.hyper.weighted_mean)
            pre = layer.forward(np.hstack([H, P @ H]))
            tape.append((P, pre, H.shape[1]))
            H = activate(pre, self.hyper.activation)

        Z, norms = l2_normalize(H)
        self._hop_tape = tape
        self._norm_tape = (Z, norms)
        return Z

    def decode(self, Z: np.ndarray) -> np.ndarray:
        """Reconstruction in standardized feature space (m x in_dim)."""
        pre = self.decoder[0].forward(Z)
        self._decode_tape = pre
        return self.decoder[1].forward(activate(pre, self.hyper.activation))

    def backward(self, grad_xhat: np.ndarray) -> None:
        """Accumulate parameter gradients for the last encode/decode pass."""
        if self._hop_tape is None or self._decode_tape is None:
            raise TrainingError("backward called before forward")
        activation = self.hyper.activation

        grad = self.decoder[1].backward(grad_xhat)
        grad = activation_backward(grad, self._decode_tape, activation)
        grad = self.decoder[0].backward(grad)

        Z, norms = self._norm_tape
        grad = l2_normalize_backward(grad, Z, norms)
        for layer, (P, pre, width) in zip(reversed(self.hops), reversed(self._hop_tape)):
            grad = activation_backward(grad, pre, activation)
            grad_concat = layer.backward(grad)
            grad = grad_concat[:, :width] + P.T @ grad_concat[:, width:]

        self._hop_tape = None
        self._decode_tape = None

    def reconstruct(self, graph: AttributedGraph, X) -> np.ndarray:
        """Deterministic full-neighbourhood forward pass."""
        return self.decode(self.encode(graph, X, 'inference'))

    def pre_activations(self) -> List[np.ndarray]:
        """Hop and decoder-hidden pre-activations of the last forward pass."""
        if self._hop_tape is None or self._decode_tape is None:
            raise TrainingError("no forward pass recorded")
        return [pre for _, pre, _ in self._hop_tape] + [self._decode_tape]

    def loss_and_pattern(self, graph: AttributedGraph, X) -> Tuple[float, np.ndarray]:
        """Full-neighbourhood loss and the on/off pattern of every ReLU (empty when linear)."""
        rows = as_rows(X)
        loss, _ = mse_loss(self.reconstruct(graph, rows), rows)
        if self.hyper.activation != 'relu':
            return loss, np.zeros(0, dtype=bool)
        return loss, np.concatenate([(pre > 0).ravel() for pre in self.pre_activations()])

    def loss_and_gradients(self, graph: AttributedGraph, X) -> Tuple[float, Dict[str, np.ndarray]]:
        rows = as_rows(X)
        self.zero_grad()
        loss, grad = mse_loss(self.reconstruct(graph, rows), rows)
        self.backward(grad)
        return loss, {name: value.copy() for name, value in self.gradients().items()}

    def to_checkpoint(self) -> Checkpoint:
        return Checkpoint(
            kind='gsabfd',
            hyper=asdict(self.hyper),
            params={name: value.copy() for name, value in self.parameters().items()},
            in_dim=self.in_dim,
            adam=self.adam,
            norm_stats=self.norm_stats,
        )

    @classmethod
    def from_checkpoint(cls, checkpoint: Checkpoint) -> 'SageModel':
        if checkpoint.kind != 'gsabfd':
            raise DataFormatError(f"checkpoint holds a {checkpoint.kind!r} model, not gsabfd")
        model = cls(SageHyper(**checkpoint.hyper), checkpoint.in_dim, checkpoint.norm_stats)
        params = model.parameters()
        if set(params) != set(checkpoint.params):
            raise DataFormatError("checkpoint parameter blocks do not match the model layout")
        for name, value in checkpoint.params.items():
            if value.shape != params[name].shape:
                raise DataFormatError(f"checkpoint block {name} has shape {value.shape}, "
                                      f"model expects {params[name].shape}")
            params[name][...] = value
        model.adam = checkpoint.adam
        return model


def encode(graph: AttributedGraph, X, model: SageModel, mode: str = 'inference',
           rng: Optional[np.random.Generator] = None) -> np.ndarray:
    return model.encode(graph, X, mode, rng)


def decode(Z: np.ndarray, model: SageModel) -> np.ndarray:
    return model.decode(Z)
