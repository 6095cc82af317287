"""
Empirical mode decomposition by classic sifting, and its noise-assisted
ensemble variant.

Envelopes are natural cubic splines through the strict local extrema, with the
first and last extremum mirrored about the signal ends. A sift stops once
SD = sum((h_prev - h_new)^2) / sum(h_prev^2) falls under the threshold and the
candidate satisfies the IMF condition, or when the iteration cap is reached
(recorded per IMF). Extraction stops when the residue has fewer than three
extrema or ``max_imfs`` modes were taken.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.signal import argrelextrema

from ingest.signals import Window
from utils.errors import InputError

logger = logging.getLogger(__name__)

MIN_LENGTH = 8
EEMD_FEATURES = 6
ENERGY_GUARD = 1e-24


@dataclass(frozen=True)
class EemdParams:
    ensemble_size: int = 50
    noise_ratio: float = 0.2
    max_sift_iters: int = 10
    sift_sd_threshold: float = 0.3
    max_imfs: int = 6

    def __post_init__(self):
        if self.ensemble_size < 1:
            raise InputError("ensemble_size must be >= 1")
        if self.noise_ratio < 0:
            raise InputError("noise_ratio must be >= 0")
        if self.max_imfs < 1:
            raise InputError("max_imfs must be >= 1")
        if self.max_sift_iters < 1:
            raise InputError("max_sift_iters must be >= 1")


@dataclass
class EmdResult:
    imfs: List[np.ndarray]
    residue: np.ndarray
    sift_counts: List[int] = field(default_factory=list)
    capped: List[bool] = field(default_factory=list)

    def __iter__(self):
        # unpacks as (imfs, residue)
        return iter((self.imfs, self.residue))

    def reconstruct(self) -> np.ndarray:
        return np.sum(self.imfs, axis=0) + self.residue if self.imfs else self.residue.copy()


def local_maxima(x: np.ndarray) -> np.ndarray:
    return argrelextrema(x, np.greater)[0]


def local_minima(x: np.ndarray) -> np.ndarray:
    return argrelextrema(x, np.less)[0]


def count_extrema(x: np.ndarray) -> int:
    return int(local_maxima(x).size + local_minima(x).size)


def count_zero_crossings(x: np.ndarray) -> int:
    return int(np.sum(x[:-1] * x[1:] < 0))


def is_imf(x: np.ndarray) -> bool:
    return abs(count_zero_crossings(x) - count_extrema(x)) <= 1


def envelope(x: np.ndarray, extrema: np.ndarray) -> np.ndarray:
    """Natural cubic spline through the extrema plus their mirror images at both ends."""
    n = x.size
    first, last = extrema[0], extrema[-1]
    knots = np.concatenate(([-first], extrema, [2 * (n - 1) - last]))
    values = np.concatenate(([x[first]], x[extrema], [x[last]]))
    spline = CubicSpline(knots, values, bc_type='natural')
    return spline(np.arange(n))


def sift(x: np.ndarray, params: EemdParams):
    """Extract one IMF candidate. Returns (imf, iterations, capped)."""
    h = x.copy()
    for iteration in range(1, params.max_sift_iters + 1):
        maxima = local_maxima(h)
        minima = local_minima(h)
        if maxima.size == 0 or minima.size == 0:
            return h, iteration - 1, not is_imf(h)
        mean_envelope = 0.5 * (envelope(h, maxima) + envelope(h, minima))
        h_new = h - mean_envelope
        denominator = float(np.dot(h, h))
        sd = float(np.sum((h - h_new) ** 2)) / denominator if denominator > 0 else 0.0
        h = h_new
        if sd < params.sift_sd_threshold and is_imf(h):
            return h, iteration, False
    return h, params.max_sift_iters, True


def emd(signal, params: Optional[EemdParams] = None, noise=None) -> EmdResult:
    """Decompose ``signal`` (plus ``noise`` when given) into IMFs and a residue."""
    params = params or EemdParams()
    x = np.asarray(signal, dtype=np.float64).ravel()
    if x.size < MIN_LENGTH:
        raise InputError(f"EMD needs at least {MIN_LENGTH} samples, got {x.size}")
    if noise is not None:
        x = x + np.asarray(noise, dtype=np.float64).ravel()

    imfs: List[np.ndarray] = []
    sift_counts: List[int] = []
    capped: List[bool] = []
    residue = x.copy()
    while len(imfs) < params.max_imfs and count_extrema(residue) >= 3:
        imf, iterations, hit_cap = sift(residue, params)
        imfs.append(imf)
        sift_counts.append(iterations)
        capped.append(hit_cap)
        residue = residue - imf

    if imfs:
        residue = x - np.sum(imfs, axis=0)
    return EmdResult(imfs, residue, sift_counts, capped)


def trial_seed(seed: int, trial: int) -> np.random.SeedSequence:
    return np.random.SeedSequence([seed, trial])


def eemd(signal, params: Optional[EemdParams] = None, seed: int = 0) -> List[np.ndarray]:
    """Ensemble-averaged IMFs 1..max_imfs; trials lacking an IMF contribute zeros."""
    params = params or EemdParams()
    x = np.asarray(signal, dtype=np.float64).ravel()
    scale = params.noise_ratio * float(np.std(x))
    totals = np.zeros((params.max_imfs, x.size))
    # trials are accumulated in index order so the average is reproducible
    for trial in range(params.ensemble_size):
        rng = np.random.default_rng(trial_seed(seed, trial))
        noise = scale * rng.standard_normal(x.size)
        result = emd(x, params, noise)
        for j, imf in enumerate(result.imfs):
            totals[j] += imf
    return list(totals / params.ensemble_size)


def eemd_features(window, params: Optional[EemdParams] = None, seed: int = 0) -> np.ndarray:
    """Relative energy of the first six ensemble-averaged IMFs."""
    params = params or EemdParams()
    x = window.values if isinstance(window, Window) else np.asarray(window, dtype=np.float64)
    energy = float(np.dot(x, x))
    features = np.zeros(EEMD_FEATURES)
    if energy < ENERGY_GUARD:
        return features
    averaged = eemd(x, params, seed)
    for j, imf in enumerate(averaged[:EEMD_FEATURES]):
        features[j] = float(np.dot(imf, imf)) / energy
    # modes are not orthogonal, so a ratio can overshoot 1 slightly
    return np.minimum(features, 1.0)
