"""Losses, Adam, the training loop and checkpoints"""

import zlib
from collections import OrderedDict

import numpy as np
import pytest

from tsforge.data import SequenceBatch, simulate_sinusoids
from tsforge.errors import (
    BadMagicError,
    CheckpointError,
    ConfigError,
    DataError,
    DimensionError,
    TruncatedCheckpointError,
    VersionMismatchError,
)
from tsforge.models import Discriminator, Generator, sample_latent
from tsforge.tensor import Parameter, Tensor, backward, ops
from tsforge.training import (
    Adam,
    AdamState,
    Checkpoint,
    LabelConfig,
    TrainConfig,
    adam_step,
    checkpoint_bytes,
    discriminator_loss,
    generator_loss,
    load_checkpoint,
    parse_checkpoint,
    save_checkpoint,
    train,
    train_step,
)


def logits(*values):
    return Tensor(np.asarray(values, dtype=float).reshape(-1, 1))


@pytest.fixture
def sinusoids():
    batch, _ = simulate_sinusoids(40, 8, 2, np.random.default_rng(7))
    return batch


@pytest.fixture
def fast_cfg():
    return TrainConfig(batch_size=4, epochs=1, seed=11, log_every=0)


class TestLosses:
    def test_perfect_discriminator(self):
        assert discriminator_loss(logits(1, 1, 1, 1), logits(0, 0, 0, 0), LabelConfig()).item() == 0.0

    def test_undecided_discriminator(self):
        loss = discriminator_loss(logits(0.5, 0.5, 0.5, 0.5), logits(0.5, 0.5, 0.5, 0.5))
        assert loss.item() == 0.5

    def test_soft_labels(self):
        labels = LabelConfig.from_mode("soft", 0.9, 0.1)
        loss = discriminator_loss(logits(1, 1, 1, 1), logits(0, 0, 0, 0), labels).item()
        assert loss == (1.0 - 0.9) ** 2 + (0.0 - 0.1) ** 2
        assert loss == pytest.approx(0.02, abs=1e-15)

    def test_flipped_swaps_discriminator_targets_only(self):
        labels = LabelConfig.from_mode("flipped")
        assert discriminator_loss(logits(0, 0), logits(1, 1), labels).item() == 0.0
        assert generator_loss(logits(1, 1), labels.real_label).item() == 0.0

    def test_generator_loss_values(self):
        assert generator_loss(logits(1, 1), 1.0).item() == 0.0
        assert generator_loss(logits(0, 0, 0, 0), 1.0).item() == 1.0
        assert generator_loss(logits(0.2, 0.6), 1.0).item() == pytest.approx(0.4, abs=1e-15)

    def test_logit_shape_checked(self):
        with pytest.raises(DimensionError):
            generator_loss(Tensor(np.zeros(3)), 1.0)
        with pytest.raises(DimensionError):
            discriminator_loss(Tensor(np.zeros((2, 2))), logits(0, 0))

    @pytest.mark.parametrize("real,fake", [(0.5, 0.5), (0.4, 0.6), (1.2, 0.0), (0.9, -0.1)])
    def test_invalid_soft_labels(self, real, fake):
        with pytest.raises(ConfigError):
            LabelConfig(real, fake)

    def test_unknown_mode(self):
        with pytest.raises(ConfigError):
            TrainConfig(label_mode="noisy")


class TestAdam:
    def test_zero_gradient_is_fixed_point(self):
        params = {"w": np.array([1.0, -2.0])}
        state = adam_step(params, {"w": np.zeros(2)}, AdamState(), lr=0.1)
        np.testing.assert_array_equal(params["w"], [1.0, -2.0])
        assert state.t == 1

    def test_first_step_is_signed_lr(self):
        params = {"w": np.array([0.0, 0.0, 0.0])}
        adam_step(params, {"w": np.array([5.0, -0.3, 100.0])}, AdamState(), lr=1e-3)
        np.testing.assert_allclose(params["w"], [-1e-3, 1e-3, -1e-3], rtol=1e-6)

    def test_converges_on_quadratic(self):
        x = Parameter(np.array([0.0]))
        opt = Adam({"x": x}, lr=0.1)
        for _ in range(500):
            opt.zero_grad()
            backward(ops.sum(ops.square(ops.sub(x, 3.0))))
            opt.step()
        assert abs(x.data[0] - 3.0) < 0.05
        assert opt.state.t == 500

    def test_state_shapes_follow_params(self):
        params = {"a": Parameter(np.zeros((2, 3))), "b": Parameter(np.zeros(4))}
        state = Adam(params, lr=0.1).state
        assert state.m["a"].shape == (2, 3) and state.v["b"].shape == (4,)

    def test_invalid_betas(self):
        with pytest.raises(ValueError):
            Adam({"x": Parameter(np.zeros(1))}, lr=0.1, beta1=0.999, beta2=0.9)


class TestTrainStep:
    def _build(self, small_gen_cfg, small_disc_cfg, seed=0):
        rng = np.random.default_rng(seed)
        gen = Generator(small_gen_cfg, rng)
        disc = Discriminator(small_disc_cfg, rng)
        cfg = TrainConfig(batch_size=4)
        opt_g = Adam(gen.params(), cfg.lr_g)
        opt_d = Adam(disc.params(), cfg.lr_d)
        return rng, gen, disc, opt_g, opt_d, cfg

    def test_updates_are_isolated(self, small_gen_cfg, small_disc_cfg, sinusoids):
        rng, gen, disc, opt_g, opt_d, cfg = self._build(small_gen_cfg, small_disc_cfg)
        seen = {}
        d_step, g_step = opt_d.step, opt_g.step

        def wrapped_d_step():
            before = gen.state_dict()
            d_step()
            seen["g_untouched"] = all(np.array_equal(before[k], v) for k, v in gen.state_dict().items())

        def wrapped_g_step():
            before = disc.state_dict()
            g_step()
            seen["d_untouched"] = all(np.array_equal(before[k], v) for k, v in disc.state_dict().items())

        opt_d.step = wrapped_d_step
        opt_g.step = wrapped_g_step
        train_step(sinusoids.subset(range(4)), gen, disc, opt_g, opt_d, cfg, rng)
        assert seen == {"g_untouched": True, "d_untouched": True}

    def test_both_networks_move(self, small_gen_cfg, small_disc_cfg, sinusoids):
        rng, gen, disc, opt_g, opt_d, cfg = self._build(small_gen_cfg, small_disc_cfg)
        g_before, d_before = gen.state_dict(), disc.state_dict()
        d_loss, g_loss = train_step(sinusoids.subset(range(4)), gen, disc, opt_g, opt_d, cfg, rng)
        assert np.isfinite(d_loss) and np.isfinite(g_loss)
        assert not np.array_equal(g_before["input_proj.weight"], gen.input_proj.weight.data)
        assert not np.array_equal(d_before["head.weight"], disc.head.weight.data)
        assert all(p.grad is None for p in disc.parameters())


class TestTrain:
    def test_history_length(self, small_gen_cfg, small_disc_cfg):
        batch, _ = simulate_sinusoids(50, 8, 2, np.random.default_rng(1))
        cfg = TrainConfig(batch_size=8, epochs=2, seed=3, log_every=0)
        final, history = train(batch, small_gen_cfg, small_disc_cfg, cfg)
        assert len(history) == 2 * (50 // 8)
        assert [r.step for r in history] == list(range(1, 13))
        assert final.step == 12

    def test_zero_epochs(self, small_gen_cfg, small_disc_cfg, sinusoids):
        final, history = train(sinusoids, small_gen_cfg, small_disc_cfg, TrainConfig(epochs=0))
        assert history == [] and final.step == 0
        assert final.adam_g.t == 0

    def test_empty_dataset(self, small_gen_cfg, small_disc_cfg, fast_cfg):
        with pytest.raises(DataError):
            train(SequenceBatch(np.zeros((0, 2, 1, 8))), small_gen_cfg, small_disc_cfg, fast_cfg)

    def test_dataset_shape_must_match(self, small_gen_cfg, small_disc_cfg, fast_cfg):
        batch, _ = simulate_sinusoids(8, 12, 2, np.random.default_rng(0))
        with pytest.raises(DataError):
            train(batch, small_gen_cfg, small_disc_cfg, fast_cfg)

    def test_fixed_seed_reproduces_trace(self, small_gen_cfg, small_disc_cfg, sinusoids):
        cfg = TrainConfig(batch_size=4, epochs=10, seed=5, log_every=0)
        _, first = train(sinusoids, small_gen_cfg, small_disc_cfg, cfg)
        _, second = train(sinusoids, small_gen_cfg, small_disc_cfg, cfg)
        assert len(first) == 100
        for a, b in zip(first, second):
            assert abs(a.d_loss - b.d_loss) <= 1e-12 and abs(a.g_loss - b.g_loss) <= 1e-12
        assert all(np.isfinite(r.d_loss) and np.isfinite(r.g_loss) for r in first)

    def test_resume_matches_uninterrupted(self, tmp_path, small_gen_cfg, small_disc_cfg, sinusoids):
        cfg = TrainConfig(batch_size=4, epochs=3, seed=9, checkpoint_every=7, log_every=0)
        _, full = train(sinusoids, small_gen_cfg, small_disc_cfg, cfg, checkpoint_dir=tmp_path)

        # step 7 is mid-way through the first 10-batch epoch
        ckpt = load_checkpoint(tmp_path / "step_00000007.ckpt")
        _, resumed = train(sinusoids, small_gen_cfg, small_disc_cfg, cfg, resume=ckpt)
        assert [r.step for r in resumed] == list(range(8, 31))
        assert resumed == full[7:]

    def test_on_record_callback(self, small_gen_cfg, small_disc_cfg, sinusoids, fast_cfg):
        records = []
        _, history = train(sinusoids, small_gen_cfg, small_disc_cfg, fast_cfg, on_record=records.append)
        assert records == history


class TestCheckpoint:
    @pytest.fixture
    def trained(self, small_gen_cfg, small_disc_cfg, sinusoids, fast_cfg):
        final, _ = train(sinusoids, small_gen_cfg, small_disc_cfg, fast_cfg, run_config={"seed": 11, "tag": "unit"})
        return final

    def test_round_trip_is_byte_identical(self, tmp_path, trained):
        save_checkpoint(tmp_path / "a.ckpt", trained)
        save_checkpoint(tmp_path / "b.ckpt", load_checkpoint(tmp_path / "a.ckpt"))
        assert (tmp_path / "a.ckpt").read_bytes() == (tmp_path / "b.ckpt").read_bytes()

    def test_round_trip_fields(self, trained):
        loaded = parse_checkpoint(checkpoint_bytes(trained))
        assert loaded.step == trained.step and loaded.config == trained.config
        assert loaded.rng_state == trained.rng_state
        assert list(loaded.generator) == list(trained.generator)
        for name, value in trained.discriminator.items():
            assert np.array_equal(loaded.discriminator[name], value)
        assert loaded.adam_g.t == trained.adam_g.t
        for name, value in trained.adam_d.v.items():
            assert np.array_equal(loaded.adam_d.v[name], value)

    def test_bad_magic(self, trained):
        buf = bytearray(checkpoint_bytes(trained))
        buf[0:8] = b"NOTACKPT"
        with pytest.raises(BadMagicError):
            parse_checkpoint(bytes(buf))

    def test_version_mismatch(self, trained):
        buf = bytearray(checkpoint_bytes(trained))
        buf[8:12] = (99).to_bytes(4, "little")
        with pytest.raises(VersionMismatchError):
            parse_checkpoint(bytes(buf))

    @pytest.mark.parametrize("keep", [0.05, 0.5, 0.99])
    def test_truncated(self, trained, keep):
        buf = checkpoint_bytes(trained)
        with pytest.raises(TruncatedCheckpointError):
            parse_checkpoint(buf[:int(len(buf) * keep)])

    def test_corrupted_header_bytes(self, trained):
        buf = checkpoint_bytes(trained)
        header_len = int.from_bytes(buf[12:16], "little")
        for pos in range(16, 16 + header_len, 7):
            corrupted = bytearray(buf)
            corrupted[pos] = ord("#") if corrupted[pos] != ord("#") else ord("!")
            with pytest.raises(CheckpointError):
                parse_checkpoint(bytes(corrupted))

    def test_corrupted_payload_fails_checksum(self, trained):
        corrupted = bytearray(checkpoint_bytes(trained))
        corrupted[-20] ^= 0xFF
        with pytest.raises(CheckpointError, match="checksum"):
            parse_checkpoint(bytes(corrupted))

    def test_missing_file(self, tmp_path):
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "nope.ckpt")


def small_checkpoint():
    weights = OrderedDict([("w", np.arange(6.0).reshape(2, 3)), ("b", np.ones(1))])
    moments = OrderedDict([("w", np.full((2, 3), 0.5)), ("b", np.zeros(1))])
    return Checkpoint(
        config={"seed": 1},
        generator=OrderedDict(weights),
        discriminator=OrderedDict([("cls", np.zeros((1, 1, 2)))]),
        adam_g=AdamState(OrderedDict(moments), OrderedDict(moments), 3),
        adam_d=AdamState(),
        step=3,
        rng_state=np.random.default_rng(0).bit_generator.state,
    )


def with_crc(body: bytes) -> bytes:
    return body + zlib.crc32(body).to_bytes(4, "little")


def first_record_offset(buf: bytes) -> int:
    return 16 + int.from_bytes(buf[12:16], "little")


class TestCheckpointCorruption:
    def test_every_single_byte_flip(self):
        buf = checkpoint_bytes(small_checkpoint())
        for pos in range(len(buf)):
            corrupted = bytearray(buf)
            corrupted[pos] ^= 0xFF
            with pytest.raises(CheckpointError):
                parse_checkpoint(bytes(corrupted))

    def test_flipped_record_name_fails_checksum(self):
        buf = bytearray(checkpoint_bytes(small_checkpoint()))
        buf[first_record_offset(buf) + 2] ^= 0xFF
        with pytest.raises(CheckpointError, match="checksum"):
            parse_checkpoint(bytes(buf))

    def test_too_many_dimensions(self):
        buf = checkpoint_bytes(small_checkpoint())
        start = first_record_offset(buf)
        name_len = int.from_bytes(buf[start:start + 2], "little")
        body = bytearray(buf[:-4])
        body[start + 2 + name_len] = 200
        with pytest.raises(CheckpointError, match="dimensions"):
            parse_checkpoint(with_crc(bytes(body)))

    def test_oversized_shape(self):
        buf = checkpoint_bytes(small_checkpoint())
        start = first_record_offset(buf)
        name_len = int.from_bytes(buf[start:start + 2], "little")
        dims_at = start + 2 + name_len + 1
        body = bytearray(buf[:-4])
        body[dims_at:dims_at + 4] = (0xFFFFFFFF).to_bytes(4, "little")
        with pytest.raises(TruncatedCheckpointError):
            parse_checkpoint(with_crc(bytes(body)))

    def test_small_checkpoint_round_trip(self):
        ckpt = small_checkpoint()
        loaded = parse_checkpoint(checkpoint_bytes(ckpt))
        np.testing.assert_array_equal(loaded.generator["w"], ckpt.generator["w"])
        assert loaded.discriminator["cls"].shape == (1, 1, 2)
        assert loaded.adam_g.t == 3 and loaded.adam_d.t == 0
