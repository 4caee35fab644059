"""Average cosine similarity and average Jensen-Shannon distance"""

from typing import Tuple

import numpy as np
from scipy.special import rel_entr

from ..errors import MetricError, ParameterError

SMOOTHING = 1e-10
JEN_REDUCTIONS = ("mean", "sum")


def _check_matrix(feats: np.ndarray, name: str) -> np.ndarray:
    feats = np.asarray(feats, dtype=np.float64)
    if feats.ndim != 2 or feats.shape[0] == 0:
        raise MetricError(f"{name} must be a non-empty (n, m) matrix, got shape {feats.shape}")
    return feats


def _unit_rows(feats: np.ndarray, name: str) -> np.ndarray:
    norms = np.linalg.norm(feats, axis=1)
    zero = np.flatnonzero(norms == 0)
    if zero.size:
        raise MetricError(f"{name} sample {int(zero[0])} has an all-zero feature vector")
    return feats / norms[:, None]


def avg_cos_sim(real_feats: np.ndarray, syn_feats: np.ndarray) -> float:
    """
    Mean cosine similarity over every (real, synthetic) pair.

    The mean of a_i . b_j over all pairs equals (mean of unit real rows) .
    (mean of unit synthetic rows), so no pair loop is needed.
    """
    real = _check_matrix(real_feats, "real features")
    syn = _check_matrix(syn_feats, "synthetic features")
    if real.shape[1] != syn.shape[1]:
        raise MetricError(f"feature sizes differ: {real.shape[1]} vs {syn.shape[1]}")
    value = float(_unit_rows(real, "real").mean(axis=0) @ _unit_rows(syn, "synthetic").mean(axis=0))
    return float(np.clip(value, -1.0, 1.0))


def kl_divergence(p: np.ndarray, q: np.ndarray) -> float:
    """KL(p || q) in bits, with 0 * log(0 / q) = 0"""
    p = np.asarray(p, dtype=np.float64)
    q = np.asarray(q, dtype=np.float64)
    if p.shape != q.shape:
        raise MetricError(f"distributions differ in length: {p.shape} vs {q.shape}")
    for name, dist in (("p", p), ("q", q)):
        if (dist < 0).any() or abs(dist.sum() - 1.0) > 1e-6:
            raise MetricError(f"{name} is not a probability vector (sum={dist.sum()})")
    if (q[p > 0] <= 0).any():
        raise MetricError("q must be positive wherever p is")
    return float(rel_entr(p, q).sum() / np.log(2.0))


def js_distance(p: np.ndarray, q: np.ndarray) -> float:
    """sqrt((KL(p || m) + KL(q || m)) / 2) with m the pointwise mean"""
    m = 0.5 * (np.asarray(p, dtype=np.float64) + np.asarray(q, dtype=np.float64))
    divergence = 0.5 * (kl_divergence(p, m) + kl_divergence(q, m))
    return float(np.sqrt(max(divergence, 0.0)))


def feature_histograms(real: np.ndarray, syn: np.ndarray, bins: int = 50) -> Tuple[np.ndarray, np.ndarray]:
    """Smoothed probability histograms of two samples over their joint range"""
    if bins < 1:
        raise ParameterError(f"bins must be >= 1, got {bins}")
    lo = min(real.min(), syn.min())
    hi = max(real.max(), syn.max())
    hist_real, _ = np.histogram(real, bins=bins, range=(lo, hi))
    hist_syn, _ = np.histogram(syn, bins=bins, range=(lo, hi))
    p = hist_real.astype(np.float64) + SMOOTHING
    q = hist_syn.astype(np.float64) + SMOOTHING
    return p / p.sum(), q / q.sum()


def per_feature_js(real_feats: np.ndarray, syn_feats: np.ndarray, bins: int = 50) -> np.ndarray:
    real = _check_matrix(real_feats, "real features")
    syn = _check_matrix(syn_feats, "synthetic features")
    if real.shape[1] != syn.shape[1]:
        raise MetricError(f"feature sizes differ: {real.shape[1]} vs {syn.shape[1]}")
    return np.array([
        js_distance(*feature_histograms(real[:, i], syn[:, i], bins))
        for i in range(real.shape[1])
    ])


def avg_jen_dis(
    real_feats: np.ndarray,
    syn_feats: np.ndarray,
    bins: int = 50,
    reduction: str = "mean",
) -> float:
    """Jensen-Shannon distance of each feature's histograms, averaged (or summed) over features"""
    if reduction not in JEN_REDUCTIONS:
        raise ParameterError(f"reduction must be one of {JEN_REDUCTIONS}, got {reduction!r}")
    distances = per_feature_js(real_feats, syn_feats, bins)
    return float(distances.sum() if reduction == "sum" else distances.mean())
