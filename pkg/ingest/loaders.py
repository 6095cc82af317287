"""
Readers for raw vibration records: one-value-per-row CSV and the uncompressed
subset of MAT-file level 5 (the distribution format of the bearing dataset).
"""
import os
import logging
from typing import Optional

import numpy as np
import pandas as pd
from scipy.io import loadmat, whosmat
from scipy.io.matlab import MatReadError

from ingest.signals import RawSignal
from utils.errors import InputError, DataFormatError, UnsupportedFormatError

logger = logging.getLogger(__name__)

DEFAULT_SAMPLE_RATE = 12000.0

# top-level element types of a level-5 MAT-file
MI_MATRIX = 14
MI_COMPRESSED = 15
MAT_HEADER_BYTES = 128
MAT_VERSION = 0x0100
ENDIAN_MARKERS = {b'IM': '<', b'MI': '>'}


def _check_readable(path: str) -> None:
    if not os.path.isfile(path):
        raise InputError(f"input file not found: {path}")
    if not os.access(path, os.R_OK):
        raise InputError(f"input file not readable: {path}")


def _parse_float(cell: str) -> Optional[float]:
    try:
        return float(cell)
    except ValueError:
        return None


def load_csv(path: str, sample_rate: float = DEFAULT_SAMPLE_RATE,
             label: str = 'normal', fault_diameter: Optional[float] = None) -> RawSignal:
    """Load a one-value-per-row CSV.

    A first row that does not parse as a number is taken as header; numbers
    that parse but are not finite (``inf``, ``nan``) are rejected on any row.
    """
    _check_readable(path)
    try:
        frame = pd.read_csv(path, header=None, dtype=str, skip_blank_lines=False,
                            keep_default_na=False)
    except pd.errors.EmptyDataError:
        raise DataFormatError(f"{path}: file is empty")
    except pd.errors.ParserError as e:
        raise DataFormatError(f"{path}: expected one value per row ({e})")
    except (OSError, UnicodeDecodeError) as e:
        raise InputError(f"{path}: cannot read file ({e})")

    if frame.shape[1] != 1:
        raise DataFormatError(f"{path}: expected one value per row, found {frame.shape[1]} columns")

    cells = frame.iloc[:, 0].fillna('').astype(str).str.strip().tolist()
    blank = np.array([cell == '' for cell in cells], dtype=bool)
    parsed = [_parse_float(cell) if cell else 0.0 for cell in cells]
    unparsable = np.array([value is None for value in parsed], dtype=bool)

    if unparsable.size and unparsable[0]:
        logger.debug(f"{path}: treating first row {cells[0]!r} as header")
        unparsable[0] = False
        blank[0] = True

    values = np.array([0.0 if value is None else value for value in parsed], dtype=np.float64)
    bad = unparsable | (~blank & ~np.isfinite(values))
    if bad.any():
        row = int(np.flatnonzero(bad)[0]) + 1
        kind = 'non-numeric' if unparsable[row - 1] else 'non-finite'
        raise DataFormatError(f"{path}: row {row}: {kind} value {cells[row - 1]!r}")

    samples = values[~blank]
    if samples.size == 0:
        raise DataFormatError(f"{path}: file contains no values")

    logger.info(f"Loaded {samples.size} samples from {path}")
    return RawSignal(samples, sample_rate, label, fault_diameter, source=path)


def _scan_mat_file(path: str) -> str:
    """Validate the level-5 header and top-level element tags; return the byte order."""
    with open(path, 'rb') as handle:
        buffer = handle.read()

    if len(buffer) < MAT_HEADER_BYTES:
        raise DataFormatError(f"{path}: too short for a MAT-file header")
    order = ENDIAN_MARKERS.get(buffer[126:128])
    if order is None:
        raise DataFormatError(f"{path}: missing MAT-file endian marker")
    version = int(np.frombuffer(buffer, dtype=order + 'u2', count=1, offset=124)[0])
    if version != MAT_VERSION:
        raise DataFormatError(f"{path}: unsupported MAT-file version 0x{version:04x}")

    pos = MAT_HEADER_BYTES
    while pos + 8 <= len(buffer):
        dtype, nbytes = (int(v) for v in np.frombuffer(buffer, dtype=order + 'u4', count=2, offset=pos))
        if dtype == MI_COMPRESSED:
            raise UnsupportedFormatError("compressed MAT element unsupported; convert to CSV")
        if dtype != MI_MATRIX:
            raise DataFormatError(f"{path}: unexpected top-level MAT element type {dtype} at byte {pos}")
        if pos + 8 + nbytes > len(buffer):
            raise DataFormatError(f"{path}: truncated MAT element at byte {pos}")
        pos += 8 + nbytes
    return order


def load_mat_v5(path: str, var_filter: str = 'DE_time',
                sample_rate: float = DEFAULT_SAMPLE_RATE, label: str = 'normal',
                fault_diameter: Optional[float] = None) -> RawSignal:
    """Load the first double matrix whose name contains ``var_filter``, flattened column-major."""
    _check_readable(path)
    order = _scan_mat_file(path)

    try:
        variables = whosmat(path)
    except (MatReadError, ValueError, TypeError) as e:
        raise DataFormatError(f"{path}: cannot list MAT variables ({e})")

    match = next((v for v in variables if var_filter in v[0]), None)
    if match is None:
        available = ', '.join(name for name, _, _ in variables) or 'none'
        raise InputError(f"{path}: no variable matching {var_filter!r} (available: {available})")
    name, shape, storage_class = match
    if storage_class != 'double':
        raise DataFormatError(f"{path}: variable {name!r} has storage class {storage_class}, expected double")

    try:
        array = loadmat(path, variable_names=[name])[name]
    except (MatReadError, ValueError, TypeError, KeyError) as e:
        raise DataFormatError(f"{path}: cannot read MAT variable {name!r} ({e})")
    if np.iscomplexobj(array):
        raise DataFormatError(f"{path}: variable {name!r} is complex")

    samples = np.asarray(array, dtype=np.float64).ravel(order='F')
    logger.info(f"Loaded {samples.size} samples of {name} {shape} from {path} "
                f"({'big' if order == '>' else 'little'}-endian)")
    return RawSignal(samples, sample_rate, label, fault_diameter, source=f"{path}:{name}")


def load_signal(path: str, var_filter: str = 'DE_time',
                sample_rate: float = DEFAULT_SAMPLE_RATE, label: str = 'normal',
                fault_diameter: Optional[float] = None) -> RawSignal:
    """Dispatch on the file extension: ``.mat`` goes to the MAT reader, the rest is CSV."""
    if path.lower().endswith('.mat'):
        return load_mat_v5(path, var_filter, sample_rate, label, fault_diameter)
    return load_csv(path, sample_rate, label, fault_diameter)


def save_csv(signal: RawSignal, path: str, header: str = 'value') -> None:
    """Write a signal in the format load_csv reads."""
    frame = pd.DataFrame({header: signal.samples})
    frame.to_csv(path, index=False, lineterminator='\n')
    logger.info(f"Wrote {len(signal)} samples to {path}")
