"""
Periodized Daubechies filter bank and relative sub-band energies.

The filter is the length-20 Daubechies scaling filter (10 vanishing moments,
``db10`` in PyWavelets). Each level pads an odd-length input with one zero
before the periodized analysis step, so every level is an orthogonal map:
coefficient counts follow ceil(n/2), energy is conserved exactly and the
inverse reproduces the input.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Tuple

import numpy as np
import pywt

from ingest.signals import Window
from utils.errors import InputError

logger = logging.getLogger(__name__)

WAVELET = 'db10'
FILTER_LENGTH = 20
DWT_LEVELS = 8
ENERGY_GUARD = 1e-24


@lru_cache(maxsize=None)
def daubechies_filters(name: str = WAVELET) -> Tuple[np.ndarray, np.ndarray]:
    """(low-pass, high-pass) orthonormal filter pair."""
    wavelet = pywt.Wavelet(name)
    low = np.asarray(wavelet.rec_lo, dtype=np.float64)
    high = np.asarray(wavelet.rec_hi, dtype=np.float64)
    low.setflags(write=False)
    high.setflags(write=False)
    return low, high


def _indices(n: int, taps: int) -> np.ndarray:
    """Periodized sample index for output k and tap j: (2k + j) mod n."""
    return (2 * np.arange(n // 2)[:, None] + np.arange(taps)[None, :]) % n


def analysis_step(x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """One periodized decimating step: (approximation, detail)."""
    low, high = daubechies_filters()
    if x.size % 2:
        x = np.append(x, 0.0)
    taps = x[_indices(x.size, low.size)]
    return taps @ low, taps @ high


def synthesis_step(approx: np.ndarray, detail: np.ndarray, length: int) -> np.ndarray:
    """Inverse of analysis_step, truncated back to ``length`` samples."""
    low, high = daubechies_filters()
    n = 2 * approx.size
    out = np.zeros(n)
    contributions = approx[:, None] * low[None, :] + detail[:, None] * high[None, :]
    np.add.at(out, _indices(n, low.size), contributions)
    return out[:length]


@dataclass
class WaveletDecomposition:
    """Detail coefficients d1..dL (finest first) and the final approximation."""

    details: List[np.ndarray]
    approximation: np.ndarray
    lengths: List[int]

    @property
    def levels(self) -> int:
        return len(self.details)


def dwt_subbands(signal, levels: int = DWT_LEVELS) -> WaveletDecomposition:
    """Multi-level periodized decomposition of a 1-D signal."""
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.size < 2:
        raise InputError("wavelet decomposition needs at least 2 samples")
    if levels < 1:
        raise InputError("wavelet decomposition needs at least 1 level")

    details: List[np.ndarray] = []
    lengths: List[int] = []
    approx = x
    for _ in range(levels):
        # once a level is down to one coefficient it stays at one
        lengths.append(approx.size)
        approx, detail = analysis_step(approx)
        details.append(detail)
    return WaveletDecomposition(details, approx, lengths)


def dwt_reconstruct(decomposition: WaveletDecomposition) -> np.ndarray:
    approx = decomposition.approximation
    for detail, length in zip(reversed(decomposition.details), reversed(decomposition.lengths)):
        approx = synthesis_step(approx, detail, length)
    return approx


def dwt_features(window, levels: int = DWT_LEVELS) -> np.ndarray:
    """Relative energy of each detail band: ||d_j||^2 / ||x||^2."""
    x = window.values if isinstance(window, Window) else np.asarray(window, dtype=np.float64)
    energy = float(np.dot(x, x))
    if energy < ENERGY_GUARD:
        return np.zeros(levels)
    decomposition = dwt_subbands(x, levels)
    return np.array([float(np.dot(d, d)) / energy for d in decomposition.details])
