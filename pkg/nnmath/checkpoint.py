"""
Versioned JSON checkpoints: layer shapes, parameters, optimizer state,
feature normalization stats and the hyperparameters needed to rebuild a model.

Floats are written with full repr precision, so a save/load cycle is lossless.
"""
import os
import json
import logging
from dataclasses import dataclass, field
from typing import Dict, Any, Optional

import numpy as np

from features.extractor import NormStats
from nnmath.optim import AdamState
from utils.errors import InputError, DataFormatError

logger = logging.getLogger(__name__)

CHECKPOINT_FORMAT = 'gsabfd-checkpoint/1'


@dataclass
class Checkpoint:
    kind: str
    hyper: Dict[str, Any]
    params: Dict[str, np.ndarray]
    in_dim: int
    adam: Optional[AdamState] = None
    norm_stats: Optional[NormStats] = None
    extra: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            'format': CHECKPOINT_FORMAT,
            'kind': self.kind,
            'in_dim': self.in_dim,
            'hyper': self.hyper,
            'shapes': {name: list(value.shape) for name, value in self.params.items()},
            'params': {name: value.tolist() for name, value in self.params.items()},
            'adam': self.adam.to_dict() if self.adam is not None else None,
            'norm_stats': self.norm_stats.to_dict() if self.norm_stats is not None else None,
            'extra': self.extra,
        }

    @classmethod
    def from_dict(cls, data: dict) -> 'Checkpoint':
        if data.get('format') != CHECKPOINT_FORMAT:
            raise DataFormatError(f"unsupported checkpoint format {data.get('format')!r}, "
                                  f"expected {CHECKPOINT_FORMAT}")
        try:
            params = {}
            for name, value in data['params'].items():
                array = np.asarray(value, dtype=np.float64)
                if list(array.shape) != list(data['shapes'][name]):
                    raise DataFormatError(f"checkpoint block {name} has shape {array.shape}, "
                                          f"header says {data['shapes'][name]}")
                params[name] = array
            adam = AdamState.from_dict(data['adam']) if data.get('adam') else None
            stats = NormStats.from_dict(data['norm_stats']) if data.get('norm_stats') else None
            return cls(data['kind'], dict(data['hyper']), params, int(data['in_dim']),
                       adam, stats, dict(data.get('extra') or {}))
        except (KeyError, TypeError) as e:
            raise DataFormatError(f"malformed checkpoint: missing or invalid {e}")


def save_checkpoint(checkpoint: Checkpoint, path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(checkpoint.to_dict(), handle, sort_keys=True)
    logger.info(f"Saved {checkpoint.kind} checkpoint to {path}")


def load_checkpoint(path: str) -> Checkpoint:
    if not os.path.isfile(path):
        raise InputError(f"checkpoint not found: {path}")
    try:
        with open(path, 'r', encoding='utf-8') as handle:
            data = json.load(handle)
    except json.JSONDecodeError as e:
        raise DataFormatError(f"{path}: not a JSON checkpoint ({e})")
    return Checkpoint.from_dict(data)
