"""Simulated multi-channel sinusoids x_i(t) = sin(A t + B)"""

import logging
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
import pandas as pd

from ..errors import DataError, ParameterError
from .types import SequenceBatch

logger = logging.getLogger(__name__)


def simulate_sinusoids(
    n: int = 10000,
    seq_len: int = 24,
    channels: int = 5,
    rng: Optional[np.random.Generator] = None,
    freq_range: Tuple[float, float] = (0.0, 0.1),
    phase_range: Tuple[float, float] = (0.0, 0.1),
) -> Tuple[SequenceBatch, np.ndarray]:
    """
    Simulate n sequences; every channel of every sequence gets its own
    frequency A and phase B drawn uniformly from the given ranges.

    Returns:
        (batch, params) where params is (n, C, 2) holding (A, B) per channel
    """
    if n < 1:
        raise DataError(f"cannot simulate an empty dataset (n={n})")
    if seq_len < 1 or channels < 1:
        raise ParameterError(f"seq_len and channels must be >= 1, got ({seq_len}, {channels})")
    rng = rng if rng is not None else np.random.default_rng()

    freq = rng.uniform(freq_range[0], freq_range[1], size=(n, channels))
    phase = rng.uniform(phase_range[0], phase_range[1], size=(n, channels))
    t = np.arange(seq_len, dtype=np.float64)
    values = np.sin(freq[:, :, None] * t[None, None, :] + phase[:, :, None])

    logger.info(f"Simulated {n} sinusoids ({channels} channels x {seq_len} steps)")
    batch = SequenceBatch(values[:, :, None, :], source="simulated")
    return batch, np.stack([freq, phase], axis=-1)


def write_parameter_log(params: np.ndarray, path: Path) -> None:
    """Write per-sequence (A, B) as CSV `sample_id,channel,A,B`"""
    n, channels, _ = params.shape
    frame = pd.DataFrame({
        "sample_id": np.repeat(np.arange(n), channels),
        "channel": np.tile(np.arange(channels), n),
        "A": params[:, :, 0].reshape(-1),
        "B": params[:, :, 1].reshape(-1),
    })
    frame.to_csv(path, index=False, float_format="%.17g")


def read_parameter_log(path: Path) -> np.ndarray:
    frame = pd.read_csv(path).sort_values(["sample_id", "channel"])
    n = frame["sample_id"].nunique()
    channels = frame["channel"].nunique()
    return frame[["A", "B"]].to_numpy(dtype=np.float64).reshape(n, channels, 2)
