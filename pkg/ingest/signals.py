"""
Domain types for raw vibration records and their fixed-width windows.
"""
from dataclasses import dataclass, field
from typing import Optional, List, Dict

import numpy as np

from utils.errors import InputError

LABELS = ('normal', 'inner', 'outer', 'ball')


def check_label(label: str) -> str:
    if label not in LABELS:
        raise InputError(f"unknown label {label!r}; expected one of {', '.join(LABELS)}")
    return label


@dataclass(frozen=True)
class RawSignal:
    """A labeled 1-D acceleration record."""

    samples: np.ndarray
    sample_rate: float
    label: str = 'normal'
    fault_diameter: Optional[float] = None
    source: str = '<memory>'

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64).ravel()
        if samples.size == 0:
            raise InputError(f"{self.source}: signal has no samples")
        if not np.all(np.isfinite(samples)):
            raise InputError(f"{self.source}: signal contains non-finite samples")
        if not self.sample_rate > 0:
            raise InputError(f"{self.source}: sample_rate must be > 0")
        check_label(self.label)
        samples.setflags(write=False)
        object.__setattr__(self, 'samples', samples)

    def __len__(self) -> int:
        return int(self.samples.size)


@dataclass(frozen=True)
class Window:
    """One fixed-width slice of a RawSignal."""

    values: np.ndarray
    label: str
    source_offset: int
    source: str = '<memory>'
    expected_width: Optional[int] = None

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64).ravel()
        if self.expected_width is not None and values.size != self.expected_width:
            raise InputError(f"{self.source}@{self.source_offset}: window has {values.size} values, "
                             f"expected {self.expected_width}")
        if not np.all(np.isfinite(values)):
            raise InputError(f"{self.source}@{self.source_offset}: window contains non-finite values")
        values.setflags(write=False)
        object.__setattr__(self, 'values', values)

    @property
    def width(self) -> int:
        return int(self.values.size)

    @property
    def identity(self) -> tuple:
        return (self.source, self.source_offset)

    @property
    def is_fault(self) -> bool:
        return self.label != 'normal'


@dataclass
class WindowSet:
    """The assembled evaluation dataset: normals first, then sampled faults."""

    windows: List[Window]
    assembly_seed: int
    counts: Dict[str, int] = field(default_factory=dict)

    def __post_init__(self):
        counts: Dict[str, int] = {}
        for window in self.windows:
            counts[window.label] = counts.get(window.label, 0) + 1
        if self.counts and self.counts != counts:
            raise InputError(f"label counts {self.counts} do not match windows {counts}")
        self.counts = counts

        widths = sorted({w.width for w in self.windows})
        if len(widths) > 1:
            raise InputError(f"window set mixes widths {widths}")

        identities = [w.identity for w in self.windows]
        if len(set(identities)) != len(identities):
            raise InputError("window set contains a duplicated window")

    def __len__(self) -> int:
        return len(self.windows)

    @property
    def labels(self) -> List[str]:
        return [w.label for w in self.windows]

    def as_array(self) -> np.ndarray:
        return np.vstack([w.values for w in self.windows])
