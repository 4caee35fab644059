"""Pre-norm transformer encoder shared by the generator and discriminator"""

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ConfigError, DimensionError
from ..tensor import LayerNorm, Linear, Module, ModuleList, Parameter, Tensor, ops


@dataclass(frozen=True)
class EncoderConfig:
    """Encoder hyperparameters; ``embed_dim`` is the token width M"""
    embed_dim: int
    num_heads: int = 5
    mlp_ratio: int = 4
    dropout_p: float = 0.1
    depth: int = 3
    init_std: float = 0.02

    def __post_init__(self):
        for name in ("embed_dim", "num_heads", "mlp_ratio", "depth"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"{name} must be a positive integer, got {value!r}")
        if self.embed_dim % self.num_heads:
            raise ConfigError(
                f"embed_dim {self.embed_dim} is not divisible by num_heads {self.num_heads}"
            )
        if not 0.0 <= self.dropout_p < 1.0:
            raise ConfigError(f"dropout_p must be in [0, 1), got {self.dropout_p}")

    @property
    def head_dim(self) -> int:
        return self.embed_dim // self.num_heads


def embed_tokens(patches: Tensor, projection: Linear) -> Tensor:
    """Project each (N*C)-wide patch token to M dimensions"""
    if patches.shape[-1] != projection.in_features:
        raise DimensionError(
            f"embed_tokens: patches {patches.shape} vs projection "
            f"({projection.in_features} -> {projection.out_features})"
        )
    return projection(patches)


def add_positional(tokens: Tensor, pos: Tensor) -> Tensor:
    """Add a learned (T, M) table to every sequence of a (B, T, M) batch"""
    if tokens.ndim != 3 or tokens.shape[1:] != pos.shape:
        raise DimensionError(f"positional table {pos.shape} does not match tokens {tokens.shape}")
    return ops.add(tokens, pos)


class MultiHeadAttention(Module):
    """Scaled dot-product self-attention with learned Q, K, V and output projections"""

    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator):
        super().__init__()
        self.num_heads = cfg.num_heads
        self.head_dim = cfg.head_dim
        dim = cfg.embed_dim
        self.query = Linear(dim, dim, rng, cfg.init_std)
        self.key = Linear(dim, dim, rng, cfg.init_std)
        self.value = Linear(dim, dim, rng, cfg.init_std)
        self.out = Linear(dim, dim, rng, cfg.init_std)
        # Last forward's weights, (B, heads, T, T); kept for inspection only
        self.last_attention: Optional[np.ndarray] = None

    def _split_heads(self, x: Tensor) -> Tensor:
        batch, tokens, _ = x.shape
        x = ops.reshape(x, (batch, tokens, self.num_heads, self.head_dim))
        return ops.transpose(x, (0, 2, 1, 3))

    def forward(self, x: Tensor) -> Tensor:
        if x.ndim != 3:
            raise DimensionError(f"attention expects (B, T, M) tokens, got {x.shape}")
        batch, tokens, dim = x.shape
        q = self._split_heads(self.query(x))
        k = self._split_heads(self.key(x))
        v = self._split_heads(self.value(x))

        scores = ops.scale(ops.matmul(q, ops.swapaxes(k, -1, -2)), 1.0 / math.sqrt(self.head_dim))
        weights = ops.softmax(scores, axis=-1)
        self.last_attention = weights.data.copy()

        context = ops.transpose(ops.matmul(weights, v), (0, 2, 1, 3))
        context = ops.reshape(context, (batch, tokens, dim))
        return self.out(context)


class FeedForward(Module):
    """Linear(M -> ratio*M), GELU, Linear(-> M)"""

    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator):
        super().__init__()
        hidden = cfg.mlp_ratio * cfg.embed_dim
        self.fc1 = Linear(cfg.embed_dim, hidden, rng, cfg.init_std)
        self.fc2 = Linear(hidden, cfg.embed_dim, rng, cfg.init_std)

    def forward(self, x: Tensor) -> Tensor:
        return self.fc2(ops.gelu(self.fc1(x)))


class EncoderBlock(Module):
    """x + Dropout(MHA(LN(x))), then x + Dropout(MLP(LN(x)))"""

    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator):
        super().__init__()
        self.dropout_p = cfg.dropout_p
        self.norm1 = LayerNorm(cfg.embed_dim)
        self.attn = MultiHeadAttention(cfg, rng)
        self.norm2 = LayerNorm(cfg.embed_dim)
        self.mlp = FeedForward(cfg, rng)

    def forward(self, x: Tensor, rng: Optional[np.random.Generator] = None) -> Tensor:
        h = ops.dropout(self.attn(self.norm1(x)), self.dropout_p, self.training, rng)
        x = ops.add(x, h)
        h = ops.dropout(self.mlp(self.norm2(x)), self.dropout_p, self.training, rng)
        return ops.add(x, h)


class EncoderStack(Module):
    """``depth`` independent encoder blocks applied in order"""

    def __init__(self, cfg: EncoderConfig, rng: np.random.Generator):
        super().__init__()
        self.blocks = ModuleList(EncoderBlock(cfg, rng) for _ in range(cfg.depth))

    def forward(self, x: Tensor, rng: Optional[np.random.Generator] = None) -> Tensor:
        for block in self.blocks:
            x = block(x, rng)
        return x


def positional_table(tokens: int, dim: int) -> Parameter:
    """Learned positional encodings, zero at init"""
    return Parameter(np.zeros((tokens, dim)))
