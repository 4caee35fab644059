from .losses import LabelConfig, LABEL_MODES, discriminator_loss, generator_loss
from .adam import Adam, AdamState, adam_step
from .checkpoint import (
    Checkpoint,
    FORMAT_VERSION,
    checkpoint_bytes,
    parse_checkpoint,
    save_checkpoint,
    load_checkpoint,
)
from .trainer import TrainConfig, LossRecord, GANTrainer, train_step, train

__all__ = [
    'LabelConfig', 'LABEL_MODES', 'discriminator_loss', 'generator_loss',
    'Adam', 'AdamState', 'adam_step',
    'Checkpoint', 'FORMAT_VERSION', 'checkpoint_bytes', 'parse_checkpoint',
    'save_checkpoint', 'load_checkpoint',
    'TrainConfig', 'LossRecord', 'GANTrainer', 'train_step', 'train',
]
