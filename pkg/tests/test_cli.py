"""End-to-end runs of the tsforge command line"""

import json

import numpy as np
import pandas as pd
import pytest
import yaml

from tsforge.config import SEED_ENV
from tsforge.data import load_csv
from tsforge.logging import RunLogger
from tsforge.main import main
from tsforge.training import load_checkpoint

TINY_RUN = {
    "n_samples": 16,
    "seq_len": 4,
    "channels": 2,
    "holdout_fraction": 0.25,
    "latent_dim": 3,
    "patch_len": 2,
    "d_embed_dim": 4,
    "d_num_heads": 2,
    "d_depth": 1,
    "g_embed_dim": 2,
    "g_num_heads": 2,
    "g_depth": 1,
    "batch_size": 4,
    "epochs": 1,
    "checkpoint_every": 2,
    "log_every": 0,
    "seed": 5,
}


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv(SEED_ENV, raising=False)


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(TINY_RUN))
    return path


def run_train(config_file, out, *extra):
    return main(["train", "--config", str(config_file), "--out", str(out), *extra])


class TestSimulate:
    def test_same_seed_same_bytes(self, tmp_path):
        for name in ("a.csv", "b.csv"):
            assert main(["simulate", "--n", "5", "--seed", "3", "--out", str(tmp_path / name)]) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert (tmp_path / "a_params.csv").is_file()
        assert load_csv(tmp_path / "a.csv").shape == (5, 5, 1, 24)

    def test_label_column(self, tmp_path):
        main(["simulate", "--n", "2", "--timesteps", "6", "--channels", "2", "--label", "3",
              "--out", str(tmp_path / "s.csv")])
        assert load_csv(tmp_path / "s.csv").labels.tolist() == [3, 3]

    def test_empty_request_is_a_data_error(self, tmp_path):
        assert main(["simulate", "--n", "0", "--out", str(tmp_path / "s.csv")]) == 2


class TestUsage:
    def test_missing_subcommand_arguments(self):
        with pytest.raises(SystemExit) as excinfo:
            main(["train"])
        assert excinfo.value.code == 1

    def test_missing_config_file(self, tmp_path):
        assert main(["train", "--config", str(tmp_path / "absent.yaml")]) == 1

    def test_invalid_config(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("patch_len: 5\n")
        assert main(["train", "--config", str(path)]) == 1


class TestTrain:
    def test_run_directory(self, tmp_path, config_file):
        out = tmp_path / "run"
        assert run_train(config_file, out) == 0
        for name in ("run.json", "VERSION", "config.json", "holdout.csv", "sim_params.csv",
                     "loss_history.csv", "final.ckpt", "checkpoints/step_00000002.ckpt"):
            assert (out / name).is_file(), name

        record = RunLogger.read(out)
        assert record["status"] == "ok"
        assert record["command"] == "train"
        assert record["summary"]["steps"] == 3

        history = pd.read_csv(out / "loss_history.csv")
        assert list(history.columns) == ["step", "d_loss", "g_loss"]
        assert history["step"].tolist() == [1, 2, 3]
        assert len(load_csv(out / "holdout.csv")) == 4
        assert json.loads((out / "config.json").read_text())["epochs"] == 1

    def test_epochs_override(self, tmp_path, config_file):
        out = tmp_path / "run"
        assert run_train(config_file, out, "--epochs", "2") == 0
        assert load_checkpoint(out / "final.ckpt").step == 6

    def test_resume_continues_the_trace(self, tmp_path, config_file):
        full = tmp_path / "full"
        part = tmp_path / "part"
        assert run_train(config_file, full, "--epochs", "2") == 0
        assert run_train(config_file, part) == 0
        resume = str(part / "checkpoints" / "step_00000002.ckpt")
        assert run_train(config_file, part, "--epochs", "2", "--resume", resume) == 0

        expected = pd.read_csv(full / "loss_history.csv")
        resumed = pd.read_csv(part / "loss_history.csv")
        assert resumed["step"].tolist() == list(range(1, 7))
        np.testing.assert_array_equal(resumed.to_numpy(), expected.to_numpy())

    def test_bad_resume_checkpoint(self, tmp_path, config_file):
        junk = tmp_path / "junk.ckpt"
        junk.write_bytes(b"not a checkpoint at all")
        assert run_train(config_file, tmp_path / "run", "--resume", str(junk)) == 2

    def test_csv_dataset_shape_mismatch(self, tmp_path):
        data = tmp_path / "data.csv"
        main(["simulate", "--n", "4", "--timesteps", "6", "--channels", "2", "--out", str(data)])
        config = dict(TINY_RUN, dataset_kind="csv", dataset_path=str(data))
        path = tmp_path / "csv.yaml"
        path.write_text(yaml.safe_dump(config))
        out = tmp_path / "run"
        assert run_train(path, out) == 2
        assert RunLogger.read(out)["status"] == "failed"

    def test_missing_final_checkpoint_fails_the_run(self, tmp_path, config_file, monkeypatch):
        monkeypatch.setattr("tsforge.main.save_checkpoint", lambda path, ckpt: None)
        out = tmp_path / "run"
        assert run_train(config_file, out) == 3
        assert RunLogger.read(out)["status"] == "incomplete"


class TestGenerate:
    @pytest.fixture
    def checkpoint(self, tmp_path, config_file):
        out = tmp_path / "run"
        assert run_train(config_file, out) == 0
        return out / "final.ckpt"

    def test_fixed_seed_same_file(self, tmp_path, checkpoint):
        for name in ("a.csv", "b.csv"):
            args = ["generate", "--ckpt", str(checkpoint), "--n", "5", "--seed", "3", "--out", str(tmp_path / name)]
            assert main(args) == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        assert load_csv(tmp_path / "a.csv").shape == (5, 2, 1, 4)

    def test_single_sequence(self, tmp_path, checkpoint):
        out = tmp_path / "one.csv"
        assert main(["generate", "--ckpt", str(checkpoint), "--n", "1", "--out", str(out)]) == 0
        assert len(load_csv(out)) == 1

    def test_batching_does_not_change_output(self, tmp_path, checkpoint):
        for name, size in (("a.csv", "2"), ("b.csv", "256")):
            main(["generate", "--ckpt", str(checkpoint), "--n", "5", "--batch-size", size,
                  "--out", str(tmp_path / name)])
        np.testing.assert_allclose(load_csv(tmp_path / "a.csv").data, load_csv(tmp_path / "b.csv").data, atol=1e-12)

    def test_zero_sequences(self, tmp_path, checkpoint):
        assert main(["generate", "--ckpt", str(checkpoint), "--n", "0", "--out", str(tmp_path / "x.csv")]) == 1

    def test_missing_checkpoint(self, tmp_path):
        args = ["generate", "--ckpt", str(tmp_path / "none.ckpt"), "--n", "1", "--out", str(tmp_path / "x.csv")]
        assert main(args) == 2

    def test_denormalize_needs_stats(self, tmp_path, checkpoint):
        args = ["generate", "--ckpt", str(checkpoint), "--n", "1", "--denormalize", "--out", str(tmp_path / "x.csv")]
        assert main(args) == 1


class TestEval:
    def test_self_comparison(self, tmp_path):
        real = tmp_path / "real.csv"
        main(["simulate", "--n", "1", "--seed", "1", "--channels", "2", "--timesteps", "8", "--out", str(real)])
        out = tmp_path / "eval"
        assert main(["eval", "--real", str(real), "--syn", str(real), "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert abs(report["avg_cos_sim"] - 1.0) < 1e-12
        assert report["avg_jen_dis"] < 1e-12
        pca = pd.read_csv(out / "pca.csv")
        assert list(pca.columns) == ["sample_id", "origin", "pc1", "pc2"]
        assert RunLogger.read(out)["status"] == "ok"

    def test_metric_options(self, tmp_path):
        real = tmp_path / "real.csv"
        syn = tmp_path / "syn.csv"
        main(["simulate", "--n", "10", "--seed", "1", "--channels", "2", "--timesteps", "8", "--out", str(real)])
        main(["simulate", "--n", "12", "--seed", "2", "--channels", "2", "--timesteps", "8", "--out", str(syn)])
        out = tmp_path / "eval"
        args = ["eval", "--real", str(real), "--syn", str(syn), "--out", str(out),
                "--bins", "10", "--jen-reduction", "sum", "--components", "3"]
        assert main(args) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["jen_dis_reduction"] == "sum"
        assert (report["n_real"], report["n_syn"]) == (10, 12)
        assert len(report["per_feature_js"]) == 14
        assert "pc3" in pd.read_csv(out / "pca.csv").columns

    def test_channel_mismatch(self, tmp_path):
        real = tmp_path / "real.csv"
        syn = tmp_path / "syn.csv"
        main(["simulate", "--n", "3", "--channels", "5", "--out", str(real)])
        main(["simulate", "--n", "3", "--channels", "4", "--out", str(syn)])
        assert main(["eval", "--real", str(real), "--syn", str(syn), "--out", str(tmp_path / "eval")]) == 2
        assert not (tmp_path / "eval" / "run.json").exists()

    def test_timestep_mismatch(self, tmp_path):
        real = tmp_path / "real.csv"
        syn = tmp_path / "syn.csv"
        main(["simulate", "--n", "3", "--channels", "2", "--timesteps", "8", "--out", str(real)])
        main(["simulate", "--n", "3", "--channels", "2", "--timesteps", "6", "--out", str(syn)])
        assert main(["eval", "--real", str(real), "--syn", str(syn), "--out", str(tmp_path / "eval")]) == 2

    def test_malformed_csv(self, tmp_path):
        real = tmp_path / "real.csv"
        main(["simulate", "--n", "2", "--channels", "2", "--timesteps", "8", "--out", str(real)])
        lines = real.read_text().splitlines()
        lines[2] += ",9"
        syn = tmp_path / "syn.csv"
        syn.write_text("\n".join(lines) + "\n")
        assert main(["eval", "--real", str(real), "--syn", str(syn), "--out", str(tmp_path / "eval")]) == 2

    def test_non_utf8_csv(self, tmp_path):
        real = tmp_path / "real.csv"
        main(["simulate", "--n", "2", "--channels", "2", "--timesteps", "8", "--out", str(real)])
        syn = tmp_path / "syn.csv"
        syn.write_bytes(real.read_bytes() + b"1,,0,0,\xff\xfe\n")
        assert main(["eval", "--real", str(real), "--syn", str(syn), "--out", str(tmp_path / "eval")]) == 2

    def test_missing_report_output_fails_the_run(self, tmp_path, monkeypatch):
        real = tmp_path / "real.csv"
        main(["simulate", "--n", "4", "--seed", "1", "--channels", "2", "--timesteps", "8", "--out", str(real)])
        monkeypatch.setattr("tsforge.main.write_pca_csv", lambda *args: None)
        out = tmp_path / "eval"
        assert main(["eval", "--real", str(real), "--syn", str(real), "--out", str(out)]) == 3
        assert RunLogger.read(out)["status"] == "incomplete"

    def test_by_class(self, tmp_path):
        real = tmp_path / "real.csv"
        syn = tmp_path / "syn.csv"
        main(["simulate", "--n", "6", "--seed", "1", "--channels", "2", "--timesteps", "8", "--label", "2", "--out", str(real)])
        main(["simulate", "--n", "6", "--seed", "2", "--channels", "2", "--timesteps", "8", "--label", "2", "--out", str(syn)])
        out = tmp_path / "eval"
        assert main(["eval", "--real", str(real), "--syn", str(syn), "--out", str(out), "--by-class"]) == 0
        assert (out / "report_2.json").is_file()
        assert "report_2.json" in RunLogger.read(out)["outputs"]


@pytest.mark.slow
class TestSinusoidQuality:
    def test_desk_scale_run(self, tmp_path):
        config = {
            "preset": "sinusoid",
            "n_samples": 3000,
            "holdout_fraction": 1 / 3,
            "epochs": 200,
            "log_every": 500,
            "seed": 0,
        }
        path = tmp_path / "sinusoid.yaml"
        path.write_text(yaml.safe_dump(config))
        run = tmp_path / "run"
        assert main(["train", "--config", str(path), "--out", str(run)]) == 0
        syn = tmp_path / "syn.csv"
        assert main(["generate", "--ckpt", str(run / "final.ckpt"), "--n", "1000", "--out", str(syn)]) == 0
        out = tmp_path / "eval"
        assert main(["eval", "--real", str(run / "holdout.csv"), "--syn", str(syn), "--out", str(out)]) == 0
        report = json.loads((out / "report.json").read_text())
        assert report["n_real"] == 1000
        assert report["avg_cos_sim"] >= 0.97
        assert report["avg_jen_dis"] <= 0.25
