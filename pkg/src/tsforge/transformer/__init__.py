from .patching import PatchSpec, patchify, unpatchify
from .encoder import (
    EncoderConfig,
    MultiHeadAttention,
    FeedForward,
    EncoderBlock,
    EncoderStack,
    embed_tokens,
    add_positional,
    positional_table,
)

__all__ = [
    'PatchSpec', 'patchify', 'unpatchify',
    'EncoderConfig', 'MultiHeadAttention', 'FeedForward', 'EncoderBlock', 'EncoderStack',
    'embed_tokens', 'add_positional', 'positional_table',
]
