"""Channel-wise normalization, windowing, class filtering and splits"""

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Tuple, Union

import numpy as np

from ..errors import DataError, ParameterError
from .types import SequenceBatch

logger = logging.getLogger(__name__)


@dataclass
class NormalizationStats:
    """Per-channel mean and standard deviation over a whole dataset"""
    mean: np.ndarray
    std: np.ndarray

    def to_dict(self) -> dict:
        return {"mean": self.mean.tolist(), "std": self.std.tolist()}

    @classmethod
    def from_dict(cls, data: dict) -> "NormalizationStats":
        return cls(np.asarray(data["mean"], dtype=np.float64), np.asarray(data["std"], dtype=np.float64))

    def save(self, path: Union[str, Path]) -> None:
        with open(path, "w") as f:
            json.dump(self.to_dict(), f, indent=2)

    @classmethod
    def load(cls, path: Union[str, Path]) -> "NormalizationStats":
        with open(path, "r") as f:
            return cls.from_dict(json.load(f))

    def apply(self, batch: SequenceBatch) -> SequenceBatch:
        data = (batch.data - self.mean[None, :, None, None]) / self.std[None, :, None, None]
        return SequenceBatch(data, batch.labels, batch.source)

    def denormalize(self, batch: SequenceBatch) -> SequenceBatch:
        data = batch.data * self.std[None, :, None, None] + self.mean[None, :, None, None]
        return SequenceBatch(data, batch.labels, batch.source)


def channel_statistics(batch: SequenceBatch) -> NormalizationStats:
    """Mean and population std of each channel over all samples and timesteps"""
    mean = batch.data.mean(axis=(0, 2, 3))
    std = batch.data.std(axis=(0, 2, 3))
    flat = np.flatnonzero(std == 0)
    if flat.size:
        raise DataError(f"channel {int(flat[0])} has zero variance and cannot be normalized")
    return NormalizationStats(mean, std)


def normalize_channelwise(batch: SequenceBatch) -> SequenceBatch:
    """Rescale every channel to zero mean and unit variance over the dataset"""
    stats = channel_statistics(batch)
    logger.info(f"Normalized {batch.channels} channels over {len(batch)} sequences")
    return stats.apply(batch)


def slice_window(batch: SequenceBatch, start: int = 5, end: int = 55) -> SequenceBatch:
    """Keep timesteps [start, end)"""
    if not 0 <= start < end <= batch.seq_len:
        raise ParameterError(
            f"window [{start}, {end}) is outside sequences of length {batch.seq_len}"
        )
    return SequenceBatch(batch.data[..., start:end], batch.labels, batch.source)


def filter_class(batch: SequenceBatch, label: int) -> SequenceBatch:
    """Keep the sequences of one class"""
    if batch.labels is None:
        raise DataError("cannot filter by class: dataset has no labels")
    keep = np.flatnonzero(batch.labels == label)
    if keep.size == 0:
        raise DataError(f"no sequences with label {label}")
    logger.info(f"Class {label}: {keep.size} of {len(batch)} sequences")
    return batch.subset(keep)


def train_holdout_split(
    batch: SequenceBatch,
    fraction: float,
    seed: int,
) -> Tuple[SequenceBatch, SequenceBatch]:
    """Deterministically move ``fraction`` of the sequences into a held-out set"""
    if not 0.0 <= fraction < 1.0:
        raise ParameterError(f"holdout fraction must be in [0, 1), got {fraction}")
    order = np.random.default_rng(seed).permutation(len(batch))
    n_holdout = int(round(len(batch) * fraction))
    return batch.subset(np.sort(order[n_holdout:])), batch.subset(np.sort(order[:n_holdout]))
