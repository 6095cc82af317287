"""
Settings shared by the reference detectors.
"""
from dataclasses import dataclass

from utils.errors import ConfigError

METHODS = ('ae', 'lof', 'knn', 'iforest')


@dataclass(frozen=True)
class BaselineConfig:
    method: str = 'lof'
    k: int = 20
    trees: int = 256
    subsample: int = 256
    hidden_dim: int = 32
    embed_dim: int = 16
    epochs: int = 100
    lr: float = 0.003
    seed: int = 0

    def __post_init__(self):
        if self.method not in METHODS:
            raise ConfigError(f"unknown baseline {self.method!r}; expected one of {', '.join(METHODS)}")
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.trees < 1:
            raise ConfigError("trees must be >= 1")
        if self.subsample < 2:
            raise ConfigError("subsample must be >= 2")
        if self.hidden_dim < 1 or self.embed_dim < 1:
            raise ConfigError("autoencoder dims must be >= 1")
        if self.epochs < 1:
            raise ConfigError("epochs must be >= 1")
        if not self.lr > 0:
            raise ConfigError("lr must be > 0")
