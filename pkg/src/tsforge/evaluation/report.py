"""Similarity report and PCA plot data for a real/synthetic comparison"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, List, Tuple, Union

import numpy as np
import pandas as pd

from ..data import SequenceBatch
from ..errors import DimensionError, ParameterError
from .features import feature_matrix
from .pca import PCAResult, pca_project
from .similarity import JEN_REDUCTIONS, avg_cos_sim, per_feature_js

logger = logging.getLogger(__name__)


@dataclass
class SimilarityReport:
    avg_cos_sim: float
    avg_jen_dis: float
    n_real: int
    n_syn: int
    per_feature_js: List[float] = field(default_factory=list)
    jen_dis_reduction: str = "mean"

    def to_dict(self) -> dict:
        return {
            "avg_cos_sim": self.avg_cos_sim,
            "avg_jen_dis": self.avg_jen_dis,
            "n_real": self.n_real,
            "n_syn": self.n_syn,
            "per_feature_js": list(self.per_feature_js),
            "jen_dis_reduction": self.jen_dis_reduction,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "w") as f:
            f.write(self.to_json())


def similarity_report(
    real_feats: np.ndarray,
    syn_feats: np.ndarray,
    bins: int = 50,
    reduction: str = "mean",
) -> SimilarityReport:
    if reduction not in JEN_REDUCTIONS:
        raise ParameterError(f"reduction must be one of {JEN_REDUCTIONS}, got {reduction!r}")
    distances = per_feature_js(real_feats, syn_feats, bins)
    return SimilarityReport(
        avg_cos_sim=avg_cos_sim(real_feats, syn_feats),
        avg_jen_dis=float(distances.sum() if reduction == "sum" else distances.mean()),
        n_real=int(real_feats.shape[0]),
        n_syn=int(syn_feats.shape[0]),
        per_feature_js=distances.tolist(),
        jen_dis_reduction=reduction,
    )


def check_compatible(real: SequenceBatch, syn: SequenceBatch) -> None:
    if (real.channels, real.seq_len) != (syn.channels, syn.seq_len):
        raise DimensionError(
            f"real sequences are {real.channels}x{real.seq_len} but synthetic are "
            f"{syn.channels}x{syn.seq_len} (channels x timesteps)"
        )


def evaluate(
    real: SequenceBatch,
    syn: SequenceBatch,
    bins: int = 50,
    reduction: str = "mean",
    pca_components: int = 2,
) -> Tuple[SimilarityReport, PCAResult]:
    """Similarity scores on extracted features plus a shared PCA of the raw sequences"""
    check_compatible(real, syn)
    report = similarity_report(feature_matrix(real), feature_matrix(syn), bins, reduction)
    pooled = np.concatenate([real.sequences(), syn.sequences()]).reshape(len(real) + len(syn), -1)
    projection = pca_project(pooled, pca_components)
    logger.info(
        f"avg_cos_sim={report.avg_cos_sim:.4f} avg_jen_dis={report.avg_jen_dis:.4f} "
        f"({report.n_real} real, {report.n_syn} synthetic)"
    )
    return report, projection


def write_pca_csv(path: Union[str, Path], projection: PCAResult, n_real: int) -> None:
    """Plot data `sample_id,origin,pc1,pc2,...`; rows are real first, then synthetic"""
    n = projection.projections.shape[0]
    columns: Dict[str, object] = {
        "sample_id": np.concatenate([np.arange(n_real), np.arange(n - n_real)]),
        "origin": ["real"] * n_real + ["syn"] * (n - n_real),
    }
    for i in range(projection.projections.shape[1]):
        columns[f"pc{i + 1}"] = projection.projections[:, i]
    pd.DataFrame(columns).to_csv(path, index=False, float_format="%.17g")


def shared_labels(real: SequenceBatch, syn: SequenceBatch) -> List[int]:
    if real.labels is None or syn.labels is None:
        return []
    return sorted(set(real.labels.tolist()) & set(syn.labels.tolist()))
