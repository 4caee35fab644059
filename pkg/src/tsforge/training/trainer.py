"""Alternating discriminator/generator optimization"""

import logging
from collections import OrderedDict
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from ..data import SequenceBatch, batch_iter, batches_per_epoch, epoch_generator
from ..errors import ConfigError, DataError, NumericError
from ..models import Discriminator, DiscriminatorConfig, Generator, GeneratorConfig, sample_latent
from ..tensor import Tensor, backward, no_grad
from .adam import Adam, AdamState
from .checkpoint import Checkpoint, save_checkpoint
from .losses import LABEL_MODES, LabelConfig, discriminator_loss, generator_loss

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    lr_g: float = 1e-4
    lr_d: float = 3e-4
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    batch_size: int = 32
    epochs: int = 200
    label_mode: str = "hard"
    soft_real_label: float = 0.9
    soft_fake_label: float = 0.1
    seed: int = 0
    checkpoint_every: int = 0
    log_every: int = 50

    def __post_init__(self):
        problems = []
        if self.lr_g <= 0 or self.lr_d <= 0:
            problems.append(f"learning rates must be > 0 (lr_g={self.lr_g}, lr_d={self.lr_d})")
        if not 0.0 <= self.beta1 < self.beta2 < 1.0:
            problems.append(f"need 0 <= beta1 < beta2 < 1 (beta1={self.beta1}, beta2={self.beta2})")
        if self.batch_size < 1:
            problems.append(f"batch_size must be >= 1 (batch_size={self.batch_size})")
        if self.epochs < 0:
            problems.append(f"epochs must be >= 0 (epochs={self.epochs})")
        if self.label_mode not in LABEL_MODES:
            problems.append(f"label_mode must be one of {LABEL_MODES} (label_mode={self.label_mode!r})")
        if problems:
            raise ConfigError("; ".join(problems))
        self.labels

    @property
    def labels(self) -> LabelConfig:
        return LabelConfig.from_mode(self.label_mode, self.soft_real_label, self.soft_fake_label)


@dataclass(frozen=True)
class LossRecord:
    step: int
    d_loss: float
    g_loss: float


def train_step(
    real_batch: Union[SequenceBatch, np.ndarray],
    generator: Generator,
    discriminator: Discriminator,
    opt_g: Adam,
    opt_d: Adam,
    cfg: TrainConfig,
    rng: np.random.Generator,
) -> Tuple[float, float]:
    """
    One discriminator update on a real batch and a freshly generated,
    detached fake batch, then one generator update through the discriminator.
    """
    real = real_batch.data if isinstance(real_batch, SequenceBatch) else real_batch
    batch = real.shape[0]
    labels = cfg.labels
    generator.train()
    discriminator.train()

    with no_grad():
        fake = generator(sample_latent(batch, generator.cfg.latent_dim, rng), rng=rng).detach()
    opt_d.zero_grad()
    d_loss = discriminator_loss(discriminator(Tensor(real), rng=rng), discriminator(fake, rng=rng), labels)
    backward(d_loss)
    opt_d.step()

    opt_g.zero_grad()
    fake = generator(sample_latent(batch, generator.cfg.latent_dim, rng), rng=rng)
    g_loss = generator_loss(discriminator(fake, rng=rng), labels.real_label)
    backward(g_loss)
    opt_g.step()
    # drop discriminator grads left by the generator pass
    opt_d.zero_grad()

    return d_loss.item(), g_loss.item()


class GANTrainer:
    """Owns both networks, their optimizers, the run generator and the step counter"""

    def __init__(
        self,
        gen_cfg: GeneratorConfig,
        disc_cfg: DiscriminatorConfig,
        cfg: TrainConfig,
        run_config: Optional[Dict[str, Any]] = None,
    ):
        if (gen_cfg.channels, gen_cfg.seq_len) != (disc_cfg.channels, disc_cfg.seq_len):
            raise ConfigError(
                f"generator shape (C={gen_cfg.channels}, W={gen_cfg.seq_len}) does not match "
                f"discriminator shape (C={disc_cfg.channels}, W={disc_cfg.seq_len})"
            )
        self.cfg = cfg
        self.run_config = dict(run_config or {})
        self.rng = np.random.default_rng(cfg.seed)
        self.generator = Generator(gen_cfg, self.rng)
        self.discriminator = Discriminator(disc_cfg, self.rng)
        self.opt_g = Adam(self.generator.params(), cfg.lr_g, cfg.beta1, cfg.beta2, cfg.adam_eps)
        self.opt_d = Adam(self.discriminator.params(), cfg.lr_d, cfg.beta1, cfg.beta2, cfg.adam_eps)
        self.step = 0
        logger.info(
            f"Built generator ({self.generator.num_parameters()} params) and "
            f"discriminator ({self.discriminator.num_parameters()} params)"
        )

    def to_checkpoint(self) -> Checkpoint:
        return Checkpoint(
            config=self.run_config,
            generator=self.generator.state_dict(),
            discriminator=self.discriminator.state_dict(),
            adam_g=_copy_state(self.opt_g.state),
            adam_d=_copy_state(self.opt_d.state),
            step=self.step,
            rng_state=self.rng.bit_generator.state,
        )

    def restore(self, ckpt: Checkpoint) -> None:
        """Continue from a checkpoint written by a run with the same architecture"""
        self.generator.load_state_dict(ckpt.generator)
        self.discriminator.load_state_dict(ckpt.discriminator)
        self.opt_g.state = _copy_state(ckpt.adam_g)
        self.opt_d.state = _copy_state(ckpt.adam_d)
        self.rng.bit_generator.state = ckpt.rng_state
        self.step = ckpt.step
        logger.info(f"Resumed from step {self.step}")

    def fit(
        self,
        dataset: SequenceBatch,
        checkpoint_dir: Optional[Path] = None,
        on_record: Optional[Callable[[LossRecord], None]] = None,
    ) -> List[LossRecord]:
        """Run the remaining steps of ``cfg.epochs`` epochs"""
        cfg = self.cfg
        if len(dataset) == 0:
            raise DataError("training dataset is empty")
        per_epoch = batches_per_epoch(len(dataset), cfg.batch_size)
        if per_epoch == 0:
            raise DataError(
                f"dataset has {len(dataset)} sequences, fewer than batch_size {cfg.batch_size}"
            )

        history: List[LossRecord] = []
        total = cfg.epochs * per_epoch
        first_epoch = self.step // per_epoch
        for epoch in range(first_epoch, cfg.epochs):
            start = self.step - epoch * per_epoch
            for real in batch_iter(dataset, cfg.batch_size, epoch_generator(cfg.seed, epoch), start):
                d_loss, g_loss = train_step(
                    real, self.generator, self.discriminator, self.opt_g, self.opt_d, cfg, self.rng
                )
                self.step += 1
                if not (np.isfinite(d_loss) and np.isfinite(g_loss)):
                    raise NumericError(f"non-finite loss at step {self.step}")

                record = LossRecord(self.step, d_loss, g_loss)
                history.append(record)
                if on_record is not None:
                    on_record(record)
                if cfg.log_every and self.step % cfg.log_every == 0:
                    logger.info(
                        f"step {self.step}/{total} epoch {epoch + 1}: "
                        f"d_loss={d_loss:.5f} g_loss={g_loss:.5f}"
                    )
                if checkpoint_dir is not None and cfg.checkpoint_every and self.step % cfg.checkpoint_every == 0:
                    save_checkpoint(Path(checkpoint_dir) / f"step_{self.step:08d}.ckpt", self.to_checkpoint())
        return history


def _copy_state(state: AdamState) -> AdamState:
    return AdamState(
        OrderedDict((k, v.copy()) for k, v in state.m.items()),
        OrderedDict((k, v.copy()) for k, v in state.v.items()),
        state.t,
    )


def train(
    dataset: SequenceBatch,
    gen_cfg: GeneratorConfig,
    disc_cfg: DiscriminatorConfig,
    cfg: TrainConfig,
    run_config: Optional[Dict[str, Any]] = None,
    resume: Optional[Checkpoint] = None,
    checkpoint_dir: Optional[Path] = None,
    on_record: Optional[Callable[[LossRecord], None]] = None,
) -> Tuple[Checkpoint, List[LossRecord]]:
    """Train from scratch (or from ``resume``) and return the final checkpoint and loss history"""
    if len(dataset) == 0:
        raise DataError("training dataset is empty")
    if (dataset.channels, dataset.seq_len) != (gen_cfg.channels, gen_cfg.seq_len):
        raise DataError(
            f"dataset is {dataset.channels} channels x {dataset.seq_len} steps, "
            f"models expect {gen_cfg.channels} x {gen_cfg.seq_len}"
        )
    trainer = GANTrainer(gen_cfg, disc_cfg, cfg, run_config)
    if resume is not None:
        trainer.restore(resume)
    history = trainer.fit(dataset, checkpoint_dir, on_record) if cfg.epochs else []
    return trainer.to_checkpoint(), history
