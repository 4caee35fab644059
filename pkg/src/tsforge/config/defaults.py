"""Default configuration values"""

# Dataset presets: shapes used in the sinusoid, activity and heartbeat experiments.
# Explicit keys in a config file win over the preset.
PRESETS = {
    "sinusoid": {
        "dataset_kind": "sinusoid",
        "channels": 5,
        "seq_len": 24,
        "patch_len": 4,
        "d_embed_dim": 10,
        "g_embed_dim": 10,
        "normalize": False,
    },
    "har": {
        "dataset_kind": "csv",
        "channels": 3,
        "seq_len": 150,
        "patch_len": 15,
        "d_embed_dim": 15,
        "g_embed_dim": 15,
        "normalize": True,
    },
    "ecg": {
        "dataset_kind": "csv",
        "channels": 1,
        "seq_len": 50,
        "patch_len": 5,
        "d_embed_dim": 10,
        "g_embed_dim": 10,
        "window_start": 5,
        "window_end": 55,
        "normalize": False,
    },
}

DEFAULT_SETTINGS = {
    "preset": None,

    # Dataset
    "dataset_kind": "sinusoid",
    "dataset_path": None,
    "n_samples": 10000,
    "seq_len": 24,
    "channels": 5,
    "class_label": None,
    "window_start": None,
    "window_end": None,
    "normalize": False,
    "data_seed": 0,
    "holdout_fraction": 0.0,

    # Generator
    "latent_dim": 100,
    "g_embed_dim": 10,
    "g_patch_len": None,  # None: same patch length as the discriminator
    "g_num_heads": 5,
    "g_mlp_ratio": 4,
    "g_dropout": 0.0,  # generate() samples without dropout
    "g_depth": 3,

    # Discriminator
    "patch_len": 4,
    "d_embed_dim": 10,
    "d_num_heads": 5,
    "d_mlp_ratio": 4,
    "d_dropout": 0.1,
    "d_depth": 3,

    "init_std": 0.02,

    # Training
    "lr_g": 1e-4,
    "lr_d": 3e-4,
    "beta1": 0.9,
    "beta2": 0.999,
    "adam_eps": 1e-8,
    "batch_size": 32,
    "epochs": 200,
    "label_mode": "hard",  # hard, soft or flipped
    "soft_real_label": 0.9,
    "soft_fake_label": 0.1,
    "seed": 0,
    "checkpoint_every": 0,  # steps; 0 keeps only the final checkpoint
    "log_every": 50,

    # Evaluation
    "js_bins": 50,
    "jen_dis_reduction": "mean",
    "pca_components": 2,

    "output_dir": "runs/latest",
    "log_level": "INFO",
}

# Accepted types per key; None is allowed where the default is None
KEY_TYPES = {
    "preset": (str,),
    "dataset_kind": (str,),
    "dataset_path": (str,),
    "n_samples": (int,),
    "seq_len": (int,),
    "channels": (int,),
    "class_label": (int,),
    "window_start": (int,),
    "window_end": (int,),
    "normalize": (bool,),
    "data_seed": (int,),
    "holdout_fraction": (int, float),
    "latent_dim": (int,),
    "g_embed_dim": (int,),
    "g_patch_len": (int,),
    "g_num_heads": (int,),
    "g_mlp_ratio": (int,),
    "g_dropout": (int, float),
    "g_depth": (int,),
    "patch_len": (int,),
    "d_embed_dim": (int,),
    "d_num_heads": (int,),
    "d_mlp_ratio": (int,),
    "d_dropout": (int, float),
    "d_depth": (int,),
    "init_std": (int, float),
    "lr_g": (int, float),
    "lr_d": (int, float),
    "beta1": (int, float),
    "beta2": (int, float),
    "adam_eps": (int, float),
    "batch_size": (int,),
    "epochs": (int,),
    "label_mode": (str,),
    "soft_real_label": (int, float),
    "soft_fake_label": (int, float),
    "seed": (int,),
    "checkpoint_every": (int,),
    "log_every": (int,),
    "js_bins": (int,),
    "jen_dis_reduction": (str,),
    "pca_components": (int,),
    "output_dir": (str,),
    "log_level": (str,),
}

NULLABLE_KEYS = {"preset", "dataset_path", "class_label", "window_start", "window_end", "g_patch_len"}
