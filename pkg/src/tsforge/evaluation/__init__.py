from .features import FEATURE_NAMES, extract_features, feature_matrix, feature_labels
from .similarity import (
    avg_cos_sim,
    avg_jen_dis,
    kl_divergence,
    js_distance,
    feature_histograms,
    per_feature_js,
)
from .pca import PCAResult, jacobi_eigh, pca_project
from .report import SimilarityReport, similarity_report, check_compatible, evaluate, write_pca_csv, shared_labels

__all__ = [
    'FEATURE_NAMES', 'extract_features', 'feature_matrix', 'feature_labels',
    'avg_cos_sim', 'avg_jen_dis', 'kl_divergence', 'js_distance',
    'feature_histograms', 'per_feature_js',
    'PCAResult', 'jacobi_eigh', 'pca_project',
    'SimilarityReport', 'similarity_report', 'check_compatible', 'evaluate', 'write_pca_csv',
    'shared_labels',
]
