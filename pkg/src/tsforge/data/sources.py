"""Build a training set from a DatasetSpec"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import DataError
from .csv_io import load_csv
from .preprocess import NormalizationStats, channel_statistics, filter_class, slice_window
from .simulate import simulate_sinusoids
from .types import DatasetSpec, SequenceBatch

logger = logging.getLogger(__name__)


@dataclass
class PreparedDataset:
    batch: SequenceBatch
    stats: Optional[NormalizationStats] = None
    sim_params: Optional[np.ndarray] = None


def build_dataset(spec: DatasetSpec) -> PreparedDataset:
    """Simulate or load, then filter by class, window and normalize as configured"""
    sim_params = None
    if spec.kind == "sinusoid":
        batch, sim_params = simulate_sinusoids(
            spec.n_samples, spec.seq_len, spec.channels, np.random.default_rng(spec.seed)
        )
    else:
        batch = load_csv(spec.path)

    if spec.class_label is not None:
        batch = filter_class(batch, spec.class_label)
    if spec.window is not None:
        batch = slice_window(batch, *spec.window)

    if (batch.channels, batch.seq_len) != (spec.channels, spec.seq_len):
        raise DataError(
            f"dataset has {batch.channels} channels x {batch.seq_len} steps, "
            f"config expects {spec.channels} x {spec.seq_len}"
        )

    stats = None
    if spec.normalize:
        stats = channel_statistics(batch)
        batch = stats.apply(batch)
        logger.info(f"Normalized {batch.channels} channels over {len(batch)} sequences")
    return PreparedDataset(batch, stats, sim_params)
