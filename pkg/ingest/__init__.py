"""
Raw vibration records: loading, windowing, dataset assembly and synthesis.
"""
from ingest.signals import RawSignal, Window, WindowSet, LABELS
from ingest.loaders import load_csv, load_mat_v5, load_signal, save_csv
from ingest.windows import slice_windows, assemble_dataset, pool_windows
from ingest.synth import synth_signals

__all__ = [
    'RawSignal', 'Window', 'WindowSet', 'LABELS',
    'load_csv', 'load_mat_v5', 'load_signal', 'save_csv',
    'slice_windows', 'assemble_dataset', 'pool_windows', 'synth_signals',
]
