"""
Deterministic synthetic vibration records standing in for the bearing dataset.

Normal records are two fixed sinusoidal carriers plus white noise. Fault
records add a train of exponentially decaying resonance bursts, one roughly
every quarter window, whose height is ``impulse_ratio`` times the main carrier
amplitude. Only the counts, the width, the seed and the impulse ratio are
external; the constants below fix everything else.
"""
import logging
from typing import Tuple

import numpy as np

from ingest.signals import RawSignal
from utils.errors import InputError

logger = logging.getLogger(__name__)

SAMPLE_RATE = 12000.0
CARRIER_HZ = (157.0, 1213.0)
CARRIER_AMPLITUDES = (1.0, 0.5)
NOISE_SIGMA = 0.1
RESONANCE_HZ = 3100.0
IMPULSE_DECAY = 6.0          # e-folding length of a burst, in samples
IMPULSE_SPAN = 48            # samples a burst lasts before it is truncated
PERIOD_JITTER = 0.1          # relative jitter of the burst spacing
AMPLITUDE_JITTER = 0.2       # relative jitter of the burst height


def _carrier(n: int, rng: np.random.Generator) -> np.ndarray:
    t = np.arange(n) / SAMPLE_RATE
    phases = rng.uniform(0.0, 2 * np.pi, size=len(CARRIER_HZ))
    carrier = np.zeros(n)
    for freq, amp, phase in zip(CARRIER_HZ, CARRIER_AMPLITUDES, phases):
        carrier += amp * np.sin(2 * np.pi * freq * t + phase)
    return carrier + rng.normal(0.0, NOISE_SIGMA, size=n)


def _impulse_train(n: int, period: float, height: float, rng: np.random.Generator) -> np.ndarray:
    train = np.zeros(n)
    offsets = np.arange(IMPULSE_SPAN)
    burst = np.exp(-offsets / IMPULSE_DECAY) * np.cos(2 * np.pi * RESONANCE_HZ * offsets / SAMPLE_RATE)
    position = rng.uniform(0.0, period)
    while position < n:
        start = int(position)
        stop = min(n, start + IMPULSE_SPAN)
        amplitude = height * (1.0 + AMPLITUDE_JITTER * rng.uniform(-1.0, 1.0))
        train[start:stop] += amplitude * burst[:stop - start]
        position += period * (1.0 + PERIOD_JITTER * rng.uniform(-1.0, 1.0))
    return train


def synth_signals(n_normal_windows: int, n_fault_windows: int, width: int = 300,
                  seed: int = 0, impulse_ratio: float = 5.0,
                  fault_label: str = 'inner') -> Tuple[RawSignal, RawSignal]:
    """Generate (normal, fault) records of ``count * width`` samples each."""
    if n_normal_windows <= 0 or n_fault_windows <= 0 or width <= 0:
        raise InputError("synthetic window counts and width must be positive")
    if impulse_ratio < 0:
        raise InputError("impulse_ratio must be non-negative")

    normal_seq, fault_seq = np.random.SeedSequence(seed).spawn(2)
    normal_rng = np.random.default_rng(normal_seq)
    fault_rng = np.random.default_rng(fault_seq)

    n_normal = n_normal_windows * width
    n_fault = n_fault_windows * width
    normal = _carrier(n_normal, normal_rng)
    fault = _carrier(n_fault, fault_rng)
    fault += _impulse_train(n_fault, width / 4.0, impulse_ratio * CARRIER_AMPLITUDES[0], fault_rng)

    logger.info(f"Synthesized {n_normal} normal and {n_fault} fault samples (seed {seed})")
    return (
        RawSignal(normal, SAMPLE_RATE, 'normal', source=f"synth-normal-{seed}"),
        RawSignal(fault, SAMPLE_RATE, fault_label, source=f"synth-{fault_label}-{seed}"),
    )
