"""
Window features: nine time-domain statistics, eight wavelet sub-band energies
and six EEMD mode energies, plus matrix standardization.
"""
from features.time_domain import time_features, TIME_FEATURE_NAMES
from features.wavelet import dwt_subbands, dwt_reconstruct, dwt_features, daubechies_filters
from features.emd import EemdParams, emd, eemd, eemd_features
from features.extractor import (
    N_FEATURES, FeatureMatrix, NormStats,
    extract, extract_matrix, standardize, apply_stats, unstandardize,
    write_feature_csv, read_feature_csv,
)

__all__ = [
    'time_features', 'TIME_FEATURE_NAMES',
    'dwt_subbands', 'dwt_reconstruct', 'dwt_features', 'daubechies_filters',
    'EemdParams', 'emd', 'eemd', 'eemd_features',
    'N_FEATURES', 'FeatureMatrix', 'NormStats',
    'extract', 'extract_matrix', 'standardize', 'apply_stats', 'unstandardize',
    'write_feature_csv', 'read_feature_csv',
]
