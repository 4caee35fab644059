"""Run configuration: defaults, presets, config file and environment"""

import json
import logging
import os
from copy import deepcopy
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import yaml

from ..data import DatasetSpec
from ..errors import ConfigError
from ..evaluation.similarity import JEN_REDUCTIONS
from ..models import DiscriminatorConfig, GeneratorConfig
from ..training import LABEL_MODES, TrainConfig
from .defaults import DEFAULT_SETTINGS, KEY_TYPES, NULLABLE_KEYS, PRESETS

logger = logging.getLogger(__name__)

SEED_ENV = "TSFORGE_SEED"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


def _read_document(path: Path) -> Dict[str, Any]:
    try:
        with open(path, "r") as f:
            if path.suffix.lower() == ".json":
                document = json.load(f)
            else:
                document = yaml.safe_load(f)
    except (json.JSONDecodeError, yaml.YAMLError) as e:
        raise ConfigError(f"cannot parse config {path}: {e}") from e
    if document is None:
        return {}
    if not isinstance(document, dict):
        raise ConfigError(f"config {path} must be a flat key-value document")
    return document


def _type_ok(key: str, value: Any) -> bool:
    if value is None:
        return key in NULLABLE_KEYS
    accepted = KEY_TYPES[key]
    # bool is an int subclass; only bool keys take booleans
    if isinstance(value, bool):
        return bool in accepted
    return isinstance(value, accepted)


class SettingsManager:
    """
    Effective run configuration.

    Layers, lowest first: DEFAULT_SETTINGS, the named preset, the config
    file, explicit overrides, then the TSFORGE_SEED environment variable.
    """

    def __init__(
        self,
        config_path: Optional[Union[str, Path]] = None,
        overrides: Optional[Dict[str, Any]] = None,
    ):
        self.config_path = Path(config_path) if config_path is not None else None
        document: Dict[str, Any] = {}
        if self.config_path is not None:
            if not self.config_path.is_file():
                raise ConfigError(f"config file not found: {self.config_path}")
            document = _read_document(self.config_path)
        document.update(overrides or {})

        self._settings = deepcopy(DEFAULT_SETTINGS)
        preset = document.get("preset")
        if isinstance(preset, str) and preset in PRESETS:
            self._settings.update(PRESETS[preset])
        self._settings.update(document)
        self._apply_env()
        self.validate()

    def _apply_env(self) -> None:
        raw = os.environ.get(SEED_ENV)
        if raw is None or raw.strip() == "":
            return
        try:
            self._settings["seed"] = int(raw)
        except ValueError as e:
            raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from e
        logger.info(f"seed overridden by {SEED_ENV}={self._settings['seed']}")

    def validate(self) -> None:
        """Collect every invalid field and raise one ConfigError naming them all"""
        s = self._settings
        problems: List[str] = []

        unknown = sorted(k for k in s if k not in KEY_TYPES)
        problems.extend(f"{k}: unknown key" for k in unknown)
        bad_type = sorted(k for k in KEY_TYPES if k in s and not _type_ok(k, s[k]))
        problems.extend(
            f"{k}: expected {'/'.join(t.__name__ for t in KEY_TYPES[k])}, got {s[k]!r}"
            for k in bad_type
        )
        if problems:
            raise ConfigError("invalid configuration: " + "; ".join(problems))

        def check(ok: bool, field: str, message: str) -> None:
            if not ok:
                problems.append(f"{field}: {message}")

        check(s["preset"] is None or s["preset"] in PRESETS, "preset",
              f"must be one of {sorted(PRESETS)}, got {s['preset']!r}")
        check(s["dataset_kind"] in ("sinusoid", "csv"), "dataset_kind",
              f"must be sinusoid or csv, got {s['dataset_kind']!r}")
        check(s["dataset_kind"] != "csv" or bool(s["dataset_path"]), "dataset_path",
              "required when dataset_kind is csv")
        for key in ("n_samples", "seq_len", "channels", "latent_dim", "g_embed_dim",
                    "g_num_heads", "g_mlp_ratio", "g_depth", "patch_len",
                    "d_embed_dim", "d_num_heads", "d_mlp_ratio", "d_depth", "batch_size",
                    "js_bins", "pca_components"):
            check(s[key] >= 1, key, f"must be >= 1, got {s[key]}")
        for key in ("epochs", "checkpoint_every", "log_every"):
            check(s[key] >= 0, key, f"must be >= 0, got {s[key]}")

        start, end = s["window_start"], s["window_end"]
        check((start is None) == (end is None), "window_start",
              "window_start and window_end must be set together")
        if start is not None and end is not None:
            check(0 <= start < end, "window_end", f"need 0 <= window_start < window_end, got ({start}, {end})")
            check(end - start == s["seq_len"], "seq_len",
                  f"must equal window_end - window_start ({end - start}), got {s['seq_len']}")
        check(0.0 <= s["holdout_fraction"] < 1.0, "holdout_fraction",
              f"must be in [0, 1), got {s['holdout_fraction']}")

        if s["seq_len"] >= 1 and s["patch_len"] >= 1:
            check(s["seq_len"] % s["patch_len"] == 0, "patch_len",
                  f"seq_len {s['seq_len']} is not divisible by patch_len {s['patch_len']}")
        g_patch = self.generator_patch_len()
        check(g_patch >= 1, "g_patch_len", f"must be >= 1, got {g_patch}")
        if s["seq_len"] >= 1 and g_patch >= 1:
            check(s["seq_len"] % g_patch == 0, "g_patch_len",
                  f"seq_len {s['seq_len']} is not divisible by generator patch length {g_patch}")
        if s["d_num_heads"] >= 1:
            check(s["d_embed_dim"] % s["d_num_heads"] == 0, "d_num_heads",
                  f"d_embed_dim {s['d_embed_dim']} is not divisible by d_num_heads {s['d_num_heads']}")
        if s["g_num_heads"] >= 1:
            width = g_patch * s["g_embed_dim"]
            check(width % s["g_num_heads"] == 0, "g_num_heads",
                  f"generator token width {width} is not divisible by g_num_heads {s['g_num_heads']}")
        for key in ("g_dropout", "d_dropout"):
            check(0.0 <= s[key] < 1.0, key, f"must be in [0, 1), got {s[key]}")
        check(s["init_std"] > 0, "init_std", f"must be > 0, got {s['init_std']}")

        for key in ("lr_g", "lr_d", "adam_eps"):
            check(s[key] > 0, key, f"must be > 0, got {s[key]}")
        check(0.0 <= s["beta1"] < s["beta2"] < 1.0, "beta1",
              f"need 0 <= beta1 < beta2 < 1, got ({s['beta1']}, {s['beta2']})")
        check(s["label_mode"] in LABEL_MODES, "label_mode",
              f"must be one of {LABEL_MODES}, got {s['label_mode']!r}")
        check(0.0 <= s["soft_fake_label"] < s["soft_real_label"] <= 1.0, "soft_real_label",
              f"need 0 <= soft_fake_label < soft_real_label <= 1, got "
              f"({s['soft_fake_label']}, {s['soft_real_label']})")

        check(s["jen_dis_reduction"] in JEN_REDUCTIONS, "jen_dis_reduction",
              f"must be one of {JEN_REDUCTIONS}, got {s['jen_dis_reduction']!r}")
        check(s["log_level"].upper() in LOG_LEVELS, "log_level",
              f"must be one of {LOG_LEVELS}, got {s['log_level']!r}")

        if problems:
            raise ConfigError("invalid configuration: " + "; ".join(problems))

    def get(self, key: str, default: Any = None) -> Any:
        return self._settings.get(key, default)

    def set(self, key: str, value: Any) -> None:
        """Set one key and re-validate"""
        previous = self._settings.get(key)
        self._settings[key] = value
        try:
            self.validate()
        except ConfigError:
            self._settings[key] = previous
            raise

    @property
    def all(self) -> dict:
        return deepcopy(self._settings)

    def snapshot(self, path: Union[str, Path]) -> None:
        """Write the effective configuration as sorted-key JSON"""
        with open(path, "w") as f:
            json.dump(self._settings, f, indent=2, sort_keys=True)
            f.write("\n")

    def dataset_spec(self) -> DatasetSpec:
        s = self._settings
        window = None
        if s["window_start"] is not None:
            window = (s["window_start"], s["window_end"])
        return DatasetSpec(
            kind=s["dataset_kind"],
            n_samples=s["n_samples"],
            seq_len=s["seq_len"],
            channels=s["channels"],
            path=s["dataset_path"],
            class_label=s["class_label"],
            window=window,
            normalize=s["normalize"],
            seed=s["data_seed"],
        )

    def generator_patch_len(self) -> int:
        g_patch = self._settings["g_patch_len"]
        return self._settings["patch_len"] if g_patch is None else g_patch

    def generator_config(self) -> GeneratorConfig:
        s = self._settings
        return GeneratorConfig(
            seq_len=s["seq_len"],
            channels=s["channels"],
            latent_dim=s["latent_dim"],
            embed_dim=s["g_embed_dim"],
            patch_len=self.generator_patch_len(),
            num_heads=s["g_num_heads"],
            mlp_ratio=s["g_mlp_ratio"],
            dropout_p=float(s["g_dropout"]),
            depth=s["g_depth"],
            init_std=float(s["init_std"]),
        )

    def discriminator_config(self) -> DiscriminatorConfig:
        s = self._settings
        return DiscriminatorConfig(
            seq_len=s["seq_len"],
            channels=s["channels"],
            patch_len=s["patch_len"],
            embed_dim=s["d_embed_dim"],
            num_heads=s["d_num_heads"],
            mlp_ratio=s["d_mlp_ratio"],
            dropout_p=float(s["d_dropout"]),
            depth=s["d_depth"],
            init_std=float(s["init_std"]),
        )

    def train_config(self) -> TrainConfig:
        s = self._settings
        return TrainConfig(
            lr_g=float(s["lr_g"]),
            lr_d=float(s["lr_d"]),
            beta1=float(s["beta1"]),
            beta2=float(s["beta2"]),
            adam_eps=float(s["adam_eps"]),
            batch_size=s["batch_size"],
            epochs=s["epochs"],
            label_mode=s["label_mode"],
            soft_real_label=float(s["soft_real_label"]),
            soft_fake_label=float(s["soft_fake_label"]),
            seed=s["seed"],
            checkpoint_every=s["checkpoint_every"],
            log_every=s["log_every"],
        )

    def metric_options(self) -> Dict[str, Any]:
        s = self._settings
        return {
            "bins": s["js_bins"],
            "reduction": s["jen_dis_reduction"],
            "pca_components": s["pca_components"],
        }
