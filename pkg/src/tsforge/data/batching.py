"""Shuffled fixed-size mini-batches"""

from typing import Iterator

import numpy as np

from ..errors import ParameterError
from .types import SequenceBatch


def batches_per_epoch(n: int, batch_size: int) -> int:
    return n // batch_size


def epoch_generator(seed: int, epoch: int) -> np.random.Generator:
    """Shuffle stream for one epoch, derived from the run seed"""
    return np.random.default_rng([seed, epoch])


def batch_iter(
    dataset: SequenceBatch,
    batch_size: int,
    rng: np.random.Generator,
    start_batch: int = 0,
) -> Iterator[SequenceBatch]:
    """
    Yield one epoch of batches from a single permutation drawn from ``rng``.
    The final partial batch is dropped. ``start_batch`` skips batches already
    consumed when resuming mid-epoch.
    """
    if batch_size < 1:
        raise ParameterError(f"batch_size must be >= 1, got {batch_size}")
    order = rng.permutation(len(dataset))
    for b in range(start_batch, batches_per_epoch(len(dataset), batch_size)):
        yield dataset.subset(order[b * batch_size:(b + 1) * batch_size])
