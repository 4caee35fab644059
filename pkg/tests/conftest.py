"""
Shared fixtures: seeded generators, tiny model configs and a central
finite-difference gradient checker.
"""

from typing import Callable, Sequence

import numpy as np
import pytest

from tsforge.models import DiscriminatorConfig, GeneratorConfig
from tsforge.tensor import Tensor, backward


def numerical_gradient(fn: Callable[[], Tensor], tensor: Tensor, eps: float = 1e-6) -> np.ndarray:
    """Central differences of the scalar fn() with respect to tensor.data"""
    grad = np.zeros_like(tensor.data)
    it = np.nditer(tensor.data, flags=["multi_index"])
    for _ in it:
        idx = it.multi_index
        original = tensor.data[idx]
        tensor.data[idx] = original + eps
        plus = fn().item()
        tensor.data[idx] = original - eps
        minus = fn().item()
        tensor.data[idx] = original
        grad[idx] = (plus - minus) / (2 * eps)
    return grad


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-3) -> float:
    # floor covers gradients that are exactly zero, such as the attention key bias
    scale = max(np.abs(analytic).max(), np.abs(numeric).max(), floor)
    return float(np.abs(analytic - numeric).max() / scale)


def check_gradients(fn: Callable[[], Tensor], tensors: Sequence[Tensor], tol: float = 1e-4) -> None:
    """Assert backward matches central differences for every tensor"""
    for t in tensors:
        t.zero_grad()
    backward(fn())
    for i, t in enumerate(tensors):
        analytic = t.grad if t.grad is not None else np.zeros_like(t.data)
        numeric = numerical_gradient(fn, t)
        err = relative_error(analytic, numeric)
        assert err < tol, f"tensor {i} {t.name or t.shape}: relative error {err:.3e}"


@pytest.fixture
def gradcheck():
    return check_gradients


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def tiny_gen_cfg():
    return GeneratorConfig(
        seq_len=4, channels=2, latent_dim=3, embed_dim=4, patch_len=1,
        num_heads=2, mlp_ratio=2, dropout_p=0.0, depth=1, init_std=0.5,
    )


@pytest.fixture
def tiny_disc_cfg():
    return DiscriminatorConfig(
        seq_len=4, channels=2, patch_len=2, embed_dim=4,
        num_heads=2, mlp_ratio=2, dropout_p=0.0, depth=1, init_std=0.5,
    )


@pytest.fixture
def small_gen_cfg():
    return GeneratorConfig(
        seq_len=8, channels=2, latent_dim=6, embed_dim=4, patch_len=1,
        num_heads=2, mlp_ratio=2, dropout_p=0.1, depth=1,
    )


@pytest.fixture
def small_disc_cfg():
    return DiscriminatorConfig(
        seq_len=8, channels=2, patch_len=2, embed_dim=4,
        num_heads=2, mlp_ratio=2, dropout_p=0.1, depth=1,
    )
