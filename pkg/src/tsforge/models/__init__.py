from .latent import sample_latent
from .generator import Generator, GeneratorConfig, generator_forward
from .discriminator import Discriminator, DiscriminatorConfig, discriminator_forward

__all__ = [
    'sample_latent',
    'Generator', 'GeneratorConfig', 'generator_forward',
    'Discriminator', 'DiscriminatorConfig', 'discriminator_forward',
]
