"""Transformer generator: latent vector -> (B, C, 1, W) sequence"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ConfigError, DimensionError
from ..tensor import Linear, Module, Parameter, Tensor, as_tensor, no_grad, ops
from ..tensor.nn import normal_init
from ..transformer import EncoderConfig, EncoderStack, add_positional, positional_table
from .latent import sample_latent

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GeneratorConfig:
    """
    Generator shape and encoder settings.

    ``embed_dim`` is the per-timestep width M. Timesteps are grouped
    ``patch_len`` at a time, so the encoder runs on W/patch_len tokens of
    width patch_len * M.
    """
    seq_len: int
    channels: int
    latent_dim: int = 100
    embed_dim: int = 10
    patch_len: int = 1
    num_heads: int = 5
    mlp_ratio: int = 4
    dropout_p: float = 0.0
    depth: int = 3
    init_std: float = 0.02

    def __post_init__(self):
        for name in ("seq_len", "channels", "latent_dim", "embed_dim", "patch_len"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ConfigError(f"generator {name} must be a positive integer, got {value!r}")
        if self.seq_len % self.patch_len:
            raise ConfigError(
                f"generator seq_len {self.seq_len} is not divisible by patch_len {self.patch_len}"
            )
        # validates heads/dropout/depth
        self.encoder

    @property
    def num_tokens(self) -> int:
        return self.seq_len // self.patch_len

    @property
    def encoder(self) -> EncoderConfig:
        return EncoderConfig(
            embed_dim=self.patch_len * self.embed_dim,
            num_heads=self.num_heads,
            mlp_ratio=self.mlp_ratio,
            dropout_p=self.dropout_p,
            depth=self.depth,
            init_std=self.init_std,
        )


class Generator(Module):
    """
    Project z to W*M values, view them as W timesteps of width M, group into
    patches, add learned positions, run the encoder stack, then map M hidden
    channels to C output channels with a 1x1 projection.
    """

    def __init__(self, cfg: GeneratorConfig, rng: np.random.Generator):
        super().__init__()
        self.cfg = cfg
        enc = cfg.encoder
        self.input_proj = Linear(cfg.latent_dim, cfg.seq_len * cfg.embed_dim, rng, cfg.init_std)
        self.pos_embed = positional_table(cfg.num_tokens, enc.embed_dim)
        self.blocks = EncoderStack(enc, rng)
        self.channel_weight = Parameter(normal_init(rng, (cfg.channels, cfg.embed_dim), cfg.init_std))
        self.channel_bias = Parameter(np.zeros(cfg.channels))
        logger.debug(f"Generator built with {self.num_parameters()} parameters")

    def forward(self, z, rng: Optional[np.random.Generator] = None) -> Tensor:
        z = as_tensor(z)
        cfg = self.cfg
        if z.ndim != 2 or z.shape[1] != cfg.latent_dim:
            raise DimensionError(f"generator expects (B, {cfg.latent_dim}) latents, got {z.shape}")
        batch = z.shape[0]

        h = self.input_proj(z)
        h = ops.reshape(h, (batch, cfg.num_tokens, cfg.patch_len * cfg.embed_dim))
        h = add_positional(h, self.pos_embed)
        h = self.blocks(h, rng)

        h = ops.reshape(h, (batch, cfg.seq_len, cfg.embed_dim))
        h = ops.transpose(h, (0, 2, 1))
        h = ops.reshape(h, (batch, cfg.embed_dim, 1, cfg.seq_len))
        return ops.pointwise_channel_projection(h, self.channel_weight, self.channel_bias)

    def generate(self, n: int, rng: np.random.Generator, batch_size: int = 256) -> np.ndarray:
        """Eval-mode sampling of n sequences as a (n, C, 1, W) array"""
        was_training = self.training
        self.eval()
        chunks = []
        try:
            with no_grad():
                for start in range(0, n, batch_size):
                    size = min(batch_size, n - start)
                    z = sample_latent(size, self.cfg.latent_dim, rng)
                    chunks.append(self.forward(z).data)
        finally:
            self.train(was_training)
        if not chunks:
            return np.zeros((0, self.cfg.channels, 1, self.cfg.seq_len))
        return np.concatenate(chunks, axis=0)


def generator_forward(
    z,
    generator: Generator,
    training: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> Tensor:
    generator.train(training)
    return generator(z, rng=rng)
