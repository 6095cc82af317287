"""
Exception hierarchy shared by every stage of the fault detection pipeline.

Each error carries a short ``category`` that the command line prints in its
one-line failure message, so scripts can branch on it.
"""


class GsabfdError(Exception):
    """Base class for all pipeline errors."""

    category = "internal"


class InputError(GsabfdError, ValueError):
    """Missing or unreadable inputs, or a violated precondition."""

    category = "input"


class DataFormatError(GsabfdError, ValueError):
    """Malformed file content (CSV rows, MAT-file structure)."""

    category = "format"


class UnsupportedFormatError(DataFormatError):
    """File content that is valid but outside the supported subset."""

    category = "unsupported"


class ShapeError(GsabfdError, ValueError):
    """Array or vector dimensions that do not line up."""

    category = "shape"


class ConfigError(GsabfdError, ValueError):
    """Out-of-range parameters or an unparsable configuration file."""

    category = "config"


class TrainingError(GsabfdError, RuntimeError):
    """Numerical failure while training or differentiating a model."""

    category = "training"
