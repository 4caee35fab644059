"""ViT-style transformer discriminator: (B, C, 1, W) -> one logit per sequence"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from ..errors import ConfigError
from ..tensor import LayerNorm, Linear, Module, Parameter, Tensor, as_tensor, ops
from ..tensor.nn import normal_init
from ..transformer import (
    EncoderConfig,
    EncoderStack,
    PatchSpec,
    add_positional,
    embed_tokens,
    patchify,
    positional_table,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DiscriminatorConfig:
    seq_len: int
    channels: int
    patch_len: int
    embed_dim: int = 10
    num_heads: int = 5
    mlp_ratio: int = 4
    dropout_p: float = 0.1
    depth: int = 3
    init_std: float = 0.02

    def __post_init__(self):
        if not isinstance(self.init_std, (int, float)) or self.init_std <= 0:
            raise ConfigError(f"init_std must be > 0, got {self.init_std!r}")
        self.patch_spec
        self.encoder

    @property
    def patch_spec(self) -> PatchSpec:
        return PatchSpec(self.seq_len, self.patch_len, self.channels)

    @property
    def num_tokens(self) -> int:
        """Patch tokens plus the classification token: (W/N) + 1"""
        return self.seq_len // self.patch_len + 1

    @property
    def encoder(self) -> EncoderConfig:
        return EncoderConfig(
            embed_dim=self.embed_dim,
            num_heads=self.num_heads,
            mlp_ratio=self.mlp_ratio,
            dropout_p=self.dropout_p,
            depth=self.depth,
            init_std=self.init_std,
        )


class Discriminator(Module):
    """
    Patchify, embed, prepend a learned classification token, add a
    ((W/N)+1, M) positional table, run the encoder stack and score the
    classification token's final state.
    """

    def __init__(self, cfg: DiscriminatorConfig, rng: np.random.Generator):
        super().__init__()
        self.cfg = cfg
        self.spec = cfg.patch_spec
        enc = cfg.encoder
        self.patch_embed = Linear(self.spec.token_dim, cfg.embed_dim, rng, cfg.init_std)
        self.cls_token = Parameter(normal_init(rng, (1, 1, cfg.embed_dim), cfg.init_std))
        self.pos_embed = positional_table(cfg.num_tokens, cfg.embed_dim)
        self.blocks = EncoderStack(enc, rng)
        self.head_norm = LayerNorm(cfg.embed_dim)
        self.head = Linear(cfg.embed_dim, 1, rng, cfg.init_std)
        logger.debug(f"Discriminator built with {self.num_parameters()} parameters")

    def tokenize(self, x) -> Tensor:
        """(B, C, 1, W) -> (B, (W/N)+1, M) tokens with positions added"""
        x = as_tensor(x)
        patches = patchify(x, self.spec)
        tokens = embed_tokens(patches, self.patch_embed)
        batch = x.shape[0]
        cls = ops.broadcast_to(self.cls_token, (batch, 1, self.cfg.embed_dim))
        tokens = ops.concat([cls, tokens], axis=1)
        return add_positional(tokens, self.pos_embed)

    def forward(self, x, rng: Optional[np.random.Generator] = None) -> Tensor:
        h = self.blocks(self.tokenize(x), rng)
        cls_state = ops.getitem(h, (slice(None), 0, slice(None)))
        return self.head(self.head_norm(cls_state))


def discriminator_forward(
    x,
    discriminator: Discriminator,
    training: bool = False,
    rng: Optional[np.random.Generator] = None,
) -> Tensor:
    discriminator.train(training)
    return discriminator(x, rng=rng)
