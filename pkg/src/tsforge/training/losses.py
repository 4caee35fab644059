"""Least-squares GAN losses"""

from dataclasses import dataclass
from typing import Tuple

from ..errors import ConfigError, DimensionError
from ..tensor import Tensor, ops

LABEL_MODES = ("hard", "soft", "flipped")


@dataclass(frozen=True)
class LabelConfig:
    """
    Regression targets for real and synthetic sequences.

    ``flipped`` swaps the targets in the discriminator loss only; the
    generator always regresses towards ``real_label``.
    """
    real_label: float = 1.0
    fake_label: float = 0.0
    flipped: bool = False

    def __post_init__(self):
        if not 0.0 <= self.fake_label < self.real_label <= 1.0:
            raise ConfigError(
                f"labels must satisfy 0 <= fake < real <= 1, got "
                f"real={self.real_label}, fake={self.fake_label}"
            )

    @classmethod
    def from_mode(cls, mode: str, soft_real: float = 0.9, soft_fake: float = 0.1) -> "LabelConfig":
        if mode == "hard":
            return cls()
        if mode == "soft":
            return cls(soft_real, soft_fake)
        if mode == "flipped":
            return cls(flipped=True)
        raise ConfigError(f"label_mode must be one of {LABEL_MODES}, got {mode!r}")

    def discriminator_targets(self) -> Tuple[float, float]:
        if self.flipped:
            return self.fake_label, self.real_label
        return self.real_label, self.fake_label


def _check_logits(logits: Tensor, name: str) -> None:
    if logits.ndim != 2 or logits.shape[1] != 1:
        raise DimensionError(f"{name} must be shaped (B, 1), got {logits.shape}")


def discriminator_loss(real_logits: Tensor, fake_logits: Tensor, labels: LabelConfig = LabelConfig()) -> Tensor:
    """MSE(D(real), real target) + MSE(D(G(z)), fake target)"""
    _check_logits(real_logits, "real_logits")
    _check_logits(fake_logits, "fake_logits")
    real_target, fake_target = labels.discriminator_targets()
    return ops.add(ops.mse_loss(real_logits, real_target), ops.mse_loss(fake_logits, fake_target))


def generator_loss(fake_logits: Tensor, real_label: float = 1.0) -> Tensor:
    """MSE(D(G(z)), real_label)"""
    _check_logits(fake_logits, "fake_logits")
    return ops.mse_loss(fake_logits, real_label)
