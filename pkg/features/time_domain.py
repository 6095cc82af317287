"""
Nine time-domain statistics of a vibration window.

Order: peak, standard deviation, mean square, RMS, crest factor (peak/RMS),
impulse factor (peak/mean |x|), shape factor (RMS/mean |x|), kurtosis,
skewness. The peak is max |x| and the mean in the factors is mean |x|. The
standard deviation uses the n-1 divisor, kurtosis and skewness use population
moments. Any ratio whose denominator is below 1e-12 is 0.
"""
import numpy as np
from scipy import stats

from ingest.signals import Window

TIME_FEATURE_NAMES = (
    'peak', 'std', 'mean_square', 'rms',
    'crest_factor', 'impulse_factor', 'shape_factor',
    'kurtosis', 'skewness',
)
GUARD = 1e-12


def _ratio(numerator: float, denominator: float) -> float:
    return float(numerator / denominator) if denominator >= GUARD else 0.0


def time_features(window) -> np.ndarray:
    """Return the 9 time-domain features of a window (or a plain array)."""
    x = window.values if isinstance(window, Window) else np.asarray(window, dtype=np.float64)
    n = x.size
    abs_x = np.abs(x)

    peak = float(abs_x.max())
    std = float(np.std(x, ddof=1)) if n > 1 else 0.0
    mean_square = float(np.mean(x * x))
    rms = float(np.sqrt(mean_square))
    mean_abs = float(abs_x.mean())

    # population second moment decides whether the shape statistics exist
    m2 = float(np.mean((x - x.mean()) ** 2))
    if m2 >= GUARD:
        kurtosis = float(stats.kurtosis(x, fisher=False, bias=True))
        skewness = float(stats.skew(x, bias=True))
    else:
        kurtosis = skewness = 0.0

    return np.array([
        peak, std, mean_square, rms,
        _ratio(peak, rms), _ratio(peak, mean_abs), _ratio(rms, mean_abs),
        kurtosis, skewness,
    ])
