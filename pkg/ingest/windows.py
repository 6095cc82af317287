"""
Non-overlapping windowing and assembly of the mixed normal/fault dataset.
"""
import logging
from typing import List, Sequence

import numpy as np

from ingest.signals import RawSignal, Window, WindowSet
from utils.errors import InputError

logger = logging.getLogger(__name__)

MIN_WIDTH = 8


def slice_windows(signal: RawSignal, width: int = 300) -> List[Window]:
    """Cut the signal into floor(len/width) consecutive windows; the tail is dropped."""
    if width < MIN_WIDTH:
        raise InputError(f"window width must be >= {MIN_WIDTH}, got {width}")
    if len(signal) < width:
        raise InputError(f"{signal.source}: {len(signal)} samples is shorter than window width {width}")

    count = len(signal) // width
    blocks = signal.samples[:count * width].reshape(count, width)
    windows = [
        Window(blocks[i], signal.label, i * width, signal.source, expected_width=width)
        for i in range(count)
    ]
    logger.info(f"Sliced {count} windows of width {width} from {signal.source} "
                f"({len(signal) - count * width} trailing samples dropped)")
    return windows


def assemble_dataset(normals: Sequence[Window], faults: Sequence[Window],
                     n_normal: int = 800, n_fault: int = 60, seed: int = 0) -> WindowSet:
    """First ``n_normal`` normals followed by ``n_fault`` faults sampled without replacement.

    The sampled faults keep their relative order from the pool.
    """
    if n_normal < 0 or n_fault < 0:
        raise InputError("window counts must be non-negative")
    if len(normals) < n_normal:
        raise InputError(f"need {n_normal} normal windows, only {len(normals)} available")
    if len(faults) < n_fault:
        raise InputError(f"need {n_fault} fault windows, only {len(faults)} available")

    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(len(faults), size=n_fault, replace=False)) if n_fault else []
    windows = list(normals[:n_normal]) + [faults[int(i)] for i in chosen]

    dataset = WindowSet(windows, assembly_seed=seed)
    logger.info(f"Assembled {len(dataset)} windows {dataset.counts} with seed {seed}")
    return dataset


def pool_windows(signals: Sequence[RawSignal], width: int = 300) -> List[Window]:
    """Slice several records (e.g. one per fault diameter) into one pool."""
    pool: List[Window] = []
    for signal in signals:
        pool.extend(slice_windows(signal, width))
    return pool
