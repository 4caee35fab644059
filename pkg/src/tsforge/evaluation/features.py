"""Per-channel signal statistics used by the similarity scores"""

from typing import List

import numpy as np

from ..data import SequenceBatch

FEATURE_NAMES = ("median", "mean", "std", "variance", "rms", "max", "min")


def _channel_features(x: np.ndarray) -> np.ndarray:
    """(..., W) -> (..., 7), population statistics over the last axis"""
    return np.stack([
        np.median(x, axis=-1),
        x.mean(axis=-1),
        x.std(axis=-1),
        x.var(axis=-1),
        np.sqrt((x * x).mean(axis=-1)),
        x.max(axis=-1),
        x.min(axis=-1),
    ], axis=-1)


def extract_features(seq: np.ndarray) -> np.ndarray:
    """Feature vector of one (C, W) sequence: 7 statistics per channel, channel-major"""
    seq = np.asarray(seq, dtype=np.float64)
    if seq.ndim == 1:
        seq = seq[None, :]
    return _channel_features(seq).reshape(-1)


def feature_matrix(batch: SequenceBatch) -> np.ndarray:
    """Stack the feature vectors of every sequence into an (n, 7*C) matrix"""
    sequences = batch.sequences()
    return _channel_features(sequences).reshape(len(batch), -1)


def feature_labels(channels: int) -> List[str]:
    return [f"ch{c}_{name}" for c in range(channels) for name in FEATURE_NAMES]
