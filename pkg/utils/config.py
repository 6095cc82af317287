"""
Run configuration: a flat ``KEY=value`` file read with python-dotenv.

Every key matches a ``RunConfig`` field (case-insensitive, upper-case on disk
like any other settings.env) and every key can be overridden from the command
line with a flag of the same name.
"""
import os
import dataclasses
import logging
from dataclasses import dataclass, fields
from typing import Optional, Dict, Any

from dotenv import dotenv_values

from utils.errors import ConfigError

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = 'config/settings.env'

_TRUE = {'1', 'true', 'yes', 'on'}
_FALSE = {'0', 'false', 'no', 'off'}


@dataclass
class RunConfig:
    """All tunables of one pipeline run."""

    # ingest
    window_width: int = 300
    n_normal: int = 800
    n_fault: int = 60
    sample_rate: float = 12000.0
    var_filter: str = 'DE_time'
    fault_label: str = 'inner'
    # features
    ensemble_size: int = 50
    noise_ratio: float = 0.2
    max_sift_iters: int = 10
    sift_sd_threshold: float = 0.3
    max_imfs: int = 6
    workers: int = 1
    # graph + sage
    k: int = 20
    sampling_ratio: float = 0.5
    depth: int = 2
    hidden_dim: int = 32
    embed_dim: int = 16
    epochs: int = 100
    lr: float = 0.003
    weighted_mean: bool = False
    activation: str = 'relu'
    # diagnose
    contamination: float = 60 / 860
    timing: bool = True
    # baselines
    lof_k: int = 20
    knn_k: int = 20
    iforest_trees: int = 256
    iforest_subsample: int = 256
    ae_hidden_dim: int = 32
    ae_embed_dim: int = 16
    ae_epochs: int = 100
    ae_lr: float = 0.003
    # harness
    repetitions: int = 10
    seed: int = 0
    log_level: str = 'INFO'

    def validate(self) -> 'RunConfig':
        """Check parameter ranges, raising ConfigError on the first violation."""
        checks = [
            (self.window_width >= 8, "window_width must be >= 8"),
            (self.n_normal >= 1, "n_normal must be >= 1"),
            (self.n_fault >= 0, "n_fault must be >= 0"),
            (self.sample_rate > 0, "sample_rate must be > 0"),
            (self.ensemble_size >= 1, "ensemble_size must be >= 1"),
            (self.noise_ratio >= 0, "noise_ratio must be >= 0"),
            (self.max_sift_iters >= 1, "max_sift_iters must be >= 1"),
            (self.sift_sd_threshold > 0, "sift_sd_threshold must be > 0"),
            (self.max_imfs >= 1, "max_imfs must be >= 1"),
            (self.workers >= 1, "workers must be >= 1"),
            (self.k >= 1, "k must be >= 1"),
            (0 < self.sampling_ratio <= 1, "sampling_ratio must be in (0, 1]"),
            (self.depth >= 1, "depth must be >= 1"),
            (self.hidden_dim >= 1 and self.embed_dim >= 1, "layer dims must be >= 1"),
            (self.epochs >= 1, "epochs must be >= 1"),
            (self.lr > 0, "lr must be > 0"),
            (self.activation in ('relu', 'linear'), "activation must be relu or linear"),
            (0 < self.contamination < 1, "contamination must be in (0, 1)"),
            (self.lof_k >= 1 and self.knn_k >= 1, "lof_k and knn_k must be >= 1"),
            (self.iforest_trees >= 1, "iforest_trees must be >= 1"),
            (self.iforest_subsample >= 2, "iforest_subsample must be >= 2"),
            (self.ae_hidden_dim >= 1 and self.ae_embed_dim >= 1, "ae dims must be >= 1"),
            (self.ae_epochs >= 1, "ae_epochs must be >= 1"),
            (self.ae_lr > 0, "ae_lr must be > 0"),
            (self.repetitions >= 1, "repetitions must be >= 1"),
        ]
        for ok, message in checks:
            if not ok:
                raise ConfigError(message)
        return self

    def eemd_kwargs(self) -> Dict[str, Any]:
        return {
            'ensemble_size': self.ensemble_size,
            'noise_ratio': self.noise_ratio,
            'max_sift_iters': self.max_sift_iters,
            'sift_sd_threshold': self.sift_sd_threshold,
            'max_imfs': self.max_imfs,
        }

    def sage_kwargs(self) -> Dict[str, Any]:
        return {
            'depth': self.depth,
            'hidden_dim': self.hidden_dim,
            'embed_dim': self.embed_dim,
            'k': self.k,
            'sampling_ratio': self.sampling_ratio,
            'epochs': self.epochs,
            'lr': self.lr,
            'seed': self.seed,
            'weighted_mean': self.weighted_mean,
            'activation': self.activation,
        }

    def ae_kwargs(self) -> Dict[str, Any]:
        return {
            'hidden_dim': self.ae_hidden_dim,
            'embed_dim': self.ae_embed_dim,
            'epochs': self.ae_epochs,
            'lr': self.ae_lr,
            'seed': self.seed,
        }

    def replace(self, **changes) -> 'RunConfig':
        return dataclasses.replace(self, **changes).validate()

    def to_env_text(self) -> str:
        """Serialize to the same KEY=value format load_run_config reads."""
        lines = []
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, bool):
                text = 'true' if value else 'false'
            elif isinstance(value, float):
                text = repr(value)
            else:
                text = str(value)
            lines.append(f"{f.name.upper()}={text}")
        return '\n'.join(lines) + '\n'


def _coerce(name: str, raw: Any, target: Any) -> Any:
    """Convert a raw config value to the type of the matching field."""
    if raw is None:
        raise ConfigError(f"{name} has no value")
    if not isinstance(raw, str):
        raw_type = type(raw)
        if target is float and raw_type is int:
            return float(raw)
        if raw_type is target:
            return raw
        raw = str(raw)
    text = raw.strip()
    try:
        if target is bool:
            lowered = text.lower()
            if lowered in _TRUE:
                return True
            if lowered in _FALSE:
                return False
            raise ValueError(text)
        if target is int:
            return int(text)
        if target is float:
            if '/' in text:
                numerator, denominator = text.split('/', 1)
                return float(numerator) / float(denominator)
            return float(text)
        return text
    except (ValueError, ZeroDivisionError):
        raise ConfigError(f"{name}: cannot parse {raw!r} as {target.__name__}")


def load_run_config(path: Optional[str] = None,
                    overrides: Optional[Dict[str, Any]] = None) -> RunConfig:
    """Build a RunConfig from defaults, an optional settings file and overrides.

    Precedence: overrides > settings file > dataclass defaults.
    ``LOG_LEVEL`` from the process environment is honoured when neither the
    file nor the overrides set it.
    """
    field_types = {f.name: f.type for f in fields(RunConfig)}
    values: Dict[str, Any] = {}

    if path is None and os.path.exists(DEFAULT_CONFIG_PATH):
        path = DEFAULT_CONFIG_PATH

    if path is not None:
        if not os.path.exists(path):
            raise ConfigError(f"config file not found: {path}")
        for key, raw in dotenv_values(path).items():
            name = key.lower()
            if name not in field_types:
                raise ConfigError(f"unknown config key: {key}")
            values[name] = _coerce(name, raw, field_types[name])
        logger.debug(f"Loaded {len(values)} settings from {path}")

    if 'log_level' not in values and os.getenv('LOG_LEVEL'):
        values['log_level'] = os.getenv('LOG_LEVEL')

    for name, raw in (overrides or {}).items():
        if raw is None:
            continue
        if name not in field_types:
            raise ConfigError(f"unknown config key: {name}")
        values[name] = _coerce(name, raw, field_types[name])

    return RunConfig(**values).validate()


def save_run_config(config: RunConfig, path: str) -> None:
    """Write the config so that load_run_config(path) reproduces it."""
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        handle.write(config.to_env_text())
