"""Height-1 patch tokenization of (B, C, 1, W) sequences"""

from dataclasses import dataclass
from typing import Union

import numpy as np

from ..errors import ConfigError, DimensionError
from ..tensor import Tensor, as_tensor, ops


@dataclass(frozen=True)
class PatchSpec:
    """Sequence length W, patch length N and channel count C"""
    seq_len: int
    patch_len: int
    channels: int

    def __post_init__(self):
        for name in ("seq_len", "patch_len", "channels"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.seq_len % self.patch_len:
            raise ConfigError(
                f"seq_len {self.seq_len} is not divisible by patch_len {self.patch_len}"
            )

    @property
    def num_patches(self) -> int:
        return self.seq_len // self.patch_len

    @property
    def token_dim(self) -> int:
        return self.patch_len * self.channels


def _check_sequence_shape(x: Tensor, spec: PatchSpec) -> None:
    expected = (spec.channels, 1, spec.seq_len)
    if x.ndim != 4 or x.shape[1:] != expected:
        raise DimensionError(f"patchify: input {x.shape} does not match (B, *{expected})")


def patchify(x: Union[Tensor, np.ndarray], spec: PatchSpec) -> Tensor:
    """
    Cut each sequence into W/N patches along time.

    Patch t holds timesteps [tN, (t+1)N) of every channel, flattened
    channel-major, so the result is (B, W/N, C*N).
    """
    x = as_tensor(x)
    _check_sequence_shape(x, spec)
    batch = x.shape[0]
    h = ops.reshape(x, (batch, spec.channels, spec.num_patches, spec.patch_len))
    h = ops.transpose(h, (0, 2, 1, 3))
    return ops.reshape(h, (batch, spec.num_patches, spec.token_dim))


def unpatchify(tokens: Union[Tensor, np.ndarray], spec: PatchSpec) -> Tensor:
    """Inverse of patchify: (B, W/N, C*N) back to (B, C, 1, W)"""
    tokens = as_tensor(tokens)
    if tokens.ndim != 3 or tokens.shape[1:] != (spec.num_patches, spec.token_dim):
        raise DimensionError(
            f"unpatchify: tokens {tokens.shape} do not match "
            f"(B, {spec.num_patches}, {spec.token_dim})"
        )
    batch = tokens.shape[0]
    h = ops.reshape(tokens, (batch, spec.num_patches, spec.channels, spec.patch_len))
    h = ops.transpose(h, (0, 2, 1, 3))
    return ops.reshape(h, (batch, spec.channels, 1, spec.seq_len))
