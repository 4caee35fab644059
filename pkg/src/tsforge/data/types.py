"""Dataset containers"""

from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from ..errors import DataError


@dataclass
class SequenceBatch:
    """Sequences shaped (B, C, 1, W) with optional per-sequence class ids"""
    data: np.ndarray
    labels: Optional[np.ndarray] = None
    source: str = "simulated"

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float64)
        if self.data.ndim != 4 or self.data.shape[2] != 1:
            raise DataError(f"sequence batch must be (B, C, 1, W), got {self.data.shape}")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (self.data.shape[0],):
                raise DataError(
                    f"labels {self.labels.shape} do not match batch size {self.data.shape[0]}"
                )

    def __len__(self) -> int:
        return self.data.shape[0]

    @property
    def channels(self) -> int:
        return self.data.shape[1]

    @property
    def seq_len(self) -> int:
        return self.data.shape[3]

    @property
    def shape(self) -> Tuple[int, int, int, int]:
        return self.data.shape

    def subset(self, indices: Sequence[int]) -> "SequenceBatch":
        indices = np.asarray(indices, dtype=np.int64)
        labels = None if self.labels is None else self.labels[indices]
        return SequenceBatch(self.data[indices], labels, self.source)

    def sequences(self) -> np.ndarray:
        """The batch as (B, C, W)"""
        return self.data[:, :, 0, :]


@dataclass(frozen=True)
class DatasetSpec:
    """Where training sequences come from and how they are prepared"""
    kind: str = "sinusoid"
    n_samples: int = 10000
    seq_len: int = 24
    channels: int = 5
    path: Optional[str] = None
    class_label: Optional[int] = None
    window: Optional[Tuple[int, int]] = None
    normalize: bool = False
    seed: int = 0

    def __post_init__(self):
        if self.kind not in ("sinusoid", "csv"):
            raise DataError(f"unknown dataset kind: {self.kind!r}")
        if self.kind == "csv" and not self.path:
            raise DataError("csv dataset needs a path")
        if self.window is not None and not 0 <= self.window[0] < self.window[1]:
            raise DataError(f"window start must be below end, got {self.window}")
