"""Latent noise for the generator"""

import numpy as np

from ..errors import ParameterError
from ..tensor import Tensor

# rng.random() can return exactly 0.0; the latent interval is open
_SMALLEST = np.nextafter(0.0, 1.0)


def sample_latent(batch: int, latent_dim: int, rng: np.random.Generator) -> Tensor:
    """Draw a (batch, latent_dim) matrix of i.i.d. U(0, 1) values, all strictly inside (0, 1)"""
    if batch < 1 or latent_dim < 1:
        raise ParameterError(f"latent batch and size must be >= 1, got ({batch}, {latent_dim})")
    return Tensor(np.maximum(rng.random((batch, latent_dim)), _SMALLEST))
