"""PCA via cyclic Jacobi rotations on the covariance matrix"""

import logging
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import MetricError

logger = logging.getLogger(__name__)

_EPS = np.finfo(np.float64).eps
_TINY = 1e-300


def jacobi_eigh(
    matrix: np.ndarray,
    tol: float = 1e-14,
    max_sweeps: int = 100,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a real symmetric matrix by cyclic Jacobi sweeps.

    Returns:
        (eigenvalues, eigenvectors) with eigenvalues descending and
        eigenvectors as columns
    """
    a = np.array(matrix, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise MetricError(f"jacobi_eigh needs a square matrix, got {a.shape}")
    n = a.shape[0]
    a = 0.5 * (a + a.T)
    v = np.eye(n)
    scale = max(np.linalg.norm(a), np.finfo(np.float64).tiny)

    for sweep in range(max_sweeps):
        off = np.sqrt(max(np.sum(a * a) - np.sum(np.diag(a) ** 2), 0.0))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                gap = a[q, q] - a[p, p]
                if abs(apq) <= _TINY + _EPS * abs(gap):
                    # rotation angle is below rounding of the diagonal
                    a[p, q] = a[q, p] = 0.0
                    continue
                theta = gap / (2.0 * apq)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning(f"Jacobi did not converge in {max_sweeps} sweeps")

    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    values, v = values[order], v[:, order]
    # sign convention: largest-magnitude entry of each eigenvector is positive
    pivots = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[pivots, np.arange(n)])
    signs[signs == 0] = 1.0
    return values, v * signs


@dataclass
class PCAResult:
    projections: np.ndarray
    components: np.ndarray
    explained_variance: np.ndarray
    mean: np.ndarray

    def transform(self, rows: np.ndarray) -> np.ndarray:
        return (np.asarray(rows, dtype=np.float64) - self.mean) @ self.components.T


def pca_project(rows: np.ndarray, k: int = 2) -> PCAResult:
    """
    Project n rows onto the top-k principal axes of their sample covariance.

    Returns projections (n, k), orthonormal components (k, d) and the
    descending explained variances (k,).
    """
    rows = np.asarray(rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[0] < 2:
        raise MetricError(f"PCA needs at least 2 rows of a 2-D matrix, got shape {rows.shape}")
    n, d = rows.shape
    if not 1 <= k <= d:
        raise MetricError(f"k must be between 1 and {d}, got {k}")

    mean = rows.mean(axis=0)
    centered = rows - mean
    cov = centered.T @ centered / (n - 1)
    values, vectors = jacobi_eigh(cov)
    components = vectors[:, :k].T
    explained = np.maximum(values[:k], 0.0)
    logger.debug(f"PCA on {n}x{d}: explained variance {explained}")
    return PCAResult(centered @ components.T, components, explained, mean)
