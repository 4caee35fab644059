"""
tsforge command-line entry point: simulate, train, generate, eval
"""

import argparse
import logging
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
from dotenv import load_dotenv
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from .config import SettingsManager
from .data import (
    NormalizationStats,
    SequenceBatch,
    build_dataset,
    load_csv,
    save_csv,
    simulate_sinusoids,
    train_holdout_split,
    write_parameter_log,
)
from .errors import ConfigError, DataError, DimensionError, ParameterError, TsforgeError
from .evaluation import (
    SimilarityReport,
    check_compatible,
    evaluate,
    feature_matrix,
    shared_labels,
    similarity_report,
    write_pca_csv,
)
from .logging import LOSS_FILE, RunLogger
from .models import Generator
from .training import load_checkpoint, save_checkpoint, train


# Load environment variables (TSFORGE_SEED may come from .env)
load_dotenv()

logger = logging.getLogger(__name__)

NORMALIZATION_FILE = "normalization.json"
FINAL_CHECKPOINT = "final.ckpt"


def setup_logging(level: str = "INFO"):
    """Setup logging configuration"""
    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format="%(message)s",
        handlers=[
            RichHandler(
                rich_tracebacks=True,
                show_time=True,
                show_path=False,
            )
        ],
        force=True,
    )


class CliParser(argparse.ArgumentParser):
    """Usage errors exit with the configuration error code"""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def cmd_simulate(args: argparse.Namespace) -> int:
    batch, params = simulate_sinusoids(
        args.n, args.timesteps, args.channels, np.random.default_rng(args.seed)
    )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_csv(batch, out, label=args.label)
    params_path = out.with_name(out.stem + "_params.csv")
    write_parameter_log(params, params_path)
    logger.info(f"Wrote {len(batch)} sequences to {out} and parameters to {params_path}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    overrides = {}
    if args.epochs is not None:
        overrides["epochs"] = args.epochs
    if args.out is not None:
        overrides["output_dir"] = args.out
    settings = SettingsManager(args.config, overrides)
    gen_cfg = settings.generator_config()
    disc_cfg = settings.discriminator_config()
    train_cfg = settings.train_config()
    resume = load_checkpoint(args.resume) if args.resume else None

    run = RunLogger(Path(settings.get("output_dir")), "train")
    status = "failed"
    try:
        run.snapshot_config(settings)
        prepared = build_dataset(settings.dataset_spec())
        dataset = prepared.batch

        fraction = settings.get("holdout_fraction")
        if fraction > 0:
            dataset, holdout = train_holdout_split(dataset, fraction, settings.get("data_seed"))
            save_csv(holdout, run.declare_output("holdout.csv"), label=settings.get("class_label"))
            logger.info(f"Held out {len(holdout)} sequences, training on {len(dataset)}")
        if prepared.stats is not None:
            prepared.stats.save(run.declare_output(NORMALIZATION_FILE))
        if prepared.sim_params is not None:
            write_parameter_log(prepared.sim_params, run.declare_output("sim_params.csv"))

        if resume is not None:
            run.truncate_loss_history(resume.step)
        run.declare_output(LOSS_FILE)
        final, history = train(
            dataset,
            gen_cfg,
            disc_cfg,
            train_cfg,
            run_config=settings.all,
            resume=resume,
            checkpoint_dir=run.path("checkpoints"),
            on_record=lambda r: run.log_loss(r.step, r.d_loss, r.g_loss),
        )
        if not history and not run.path(LOSS_FILE).exists():
            run.path(LOSS_FILE).write_text("step,d_loss,g_loss\n")
        save_checkpoint(run.declare_output(FINAL_CHECKPOINT), final)

        summary = {"steps": final.step, "train_sequences": len(dataset)}
        if history:
            summary.update(final_d_loss=history[-1].d_loss, final_g_loss=history[-1].g_loss)
        run.set_summary(**summary)
        status = "ok"
    finally:
        status = run.end_run(status)
    return 0 if status == "ok" else 3


def _stats_for(ckpt_path: Path) -> Optional[NormalizationStats]:
    # final.ckpt sits in the run dir, periodic ones in run_dir/checkpoints
    for directory in (ckpt_path.parent, ckpt_path.parent.parent):
        candidate = directory / NORMALIZATION_FILE
        if candidate.is_file():
            return NormalizationStats.load(candidate)
    return None


def cmd_generate(args: argparse.Namespace) -> int:
    if args.n < 1:
        raise ParameterError(f"--n must be >= 1, got {args.n}")
    ckpt_path = Path(args.ckpt)
    ckpt = load_checkpoint(ckpt_path)
    settings = SettingsManager(overrides=ckpt.config)

    generator = Generator(settings.generator_config(), np.random.default_rng(0))
    generator.load_state_dict(ckpt.generator)
    data = generator.generate(args.n, np.random.default_rng(args.seed), batch_size=args.batch_size)
    batch = SequenceBatch(data, source=str(ckpt_path))

    if args.denormalize:
        stats = _stats_for(ckpt_path)
        if stats is None:
            raise ConfigError(f"--denormalize: no {NORMALIZATION_FILE} next to {ckpt_path}")
        batch = stats.denormalize(batch)

    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    save_csv(batch, out, label=settings.get("class_label"))
    logger.info(f"Wrote {len(batch)} synthetic sequences to {out}")
    return 0


def print_report(report: SimilarityReport, title: str, console: Optional[Console] = None) -> None:
    console = console or Console()
    table = Table(title=title)
    table.add_column("metric")
    table.add_column("value", justify="right")
    table.add_row("avg_cos_sim", f"{report.avg_cos_sim:.6f}")
    table.add_row(f"avg_jen_dis ({report.jen_dis_reduction})", f"{report.avg_jen_dis:.6f}")
    table.add_row("real sequences", str(report.n_real))
    table.add_row("synthetic sequences", str(report.n_syn))
    console.print(table)


def cmd_eval(args: argparse.Namespace) -> int:
    overrides = {"output_dir": args.out}
    if args.bins is not None:
        overrides["js_bins"] = args.bins
    if args.jen_reduction is not None:
        overrides["jen_dis_reduction"] = args.jen_reduction
    if args.components is not None:
        overrides["pca_components"] = args.components
    settings = SettingsManager(args.config, overrides)
    options = settings.metric_options()

    real = load_csv(args.real)
    syn = load_csv(args.syn)
    try:
        check_compatible(real, syn)
    except DimensionError as e:
        raise DataError(f"{args.syn} does not match {args.real}: {e}") from e

    run = RunLogger(Path(args.out), "eval")
    status = "failed"
    try:
        run.snapshot_config(settings)
        report, projection = evaluate(
            real, syn, options["bins"], options["reduction"], options["pca_components"]
        )
        report.save(run.declare_output("report.json"))
        write_pca_csv(run.declare_output("pca.csv"), projection, len(real))
        print_report(report, "real vs synthetic")

        if args.by_class:
            labels = shared_labels(real, syn)
            if not labels:
                logger.warning("--by-class: the two files share no labels")
            for label in labels:
                class_report = similarity_report(
                    feature_matrix(real.subset(np.flatnonzero(real.labels == label))),
                    feature_matrix(syn.subset(np.flatnonzero(syn.labels == label))),
                    options["bins"],
                    options["reduction"],
                )
                class_report.save(run.declare_output(f"report_{label}.json"))
                print_report(class_report, f"class {label}")

        run.set_summary(avg_cos_sim=report.avg_cos_sim, avg_jen_dis=report.avg_jen_dis)
        status = "ok"
    finally:
        status = run.end_run(status)
    return 0 if status == "ok" else 3


def build_parser() -> argparse.ArgumentParser:
    parser = CliParser(prog="tsforge", description="Transformer GAN for multi-channel time series")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--log-level", default="INFO",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=CliParser)

    p = sub.add_parser("simulate", help="write simulated sinusoids as a dataset CSV")
    p.add_argument("--n", type=int, default=10000)
    p.add_argument("--timesteps", type=int, default=24)
    p.add_argument("--channels", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--label", type=int, default=None, help="class id written into every row")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("train", help="train a GAN from a config file")
    p.add_argument("--config", required=True)
    p.add_argument("--resume", default=None, help="checkpoint to continue from")
    p.add_argument("--epochs", type=int, default=None, help="override the config's epoch count")
    p.add_argument("--out", default=None, help="override the config's output_dir")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("generate", help="sample sequences from a checkpoint")
    p.add_argument("--ckpt", required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--batch-size", type=int, default=256)
    p.add_argument("--denormalize", action="store_true",
                   help="map output back through the run's normalization statistics")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("eval", help="score synthetic against real sequences")
    p.add_argument("--real", required=True)
    p.add_argument("--syn", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--config", default=None, help="take metric options from a config file")
    p.add_argument("--bins", type=int, default=None)
    p.add_argument("--jen-reduction", choices=["mean", "sum"], default=None)
    p.add_argument("--components", type=int, default=None)
    p.add_argument("--by-class", action="store_true", help="also report each shared class label")
    p.set_defaults(func=cmd_eval)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Entry point"""
    args = build_parser().parse_args(argv)
    setup_logging(args.log_level)

    try:
        return args.func(args)
    except TsforgeError as e:
        logger.error(f"{type(e).__name__}: {e}")
        return e.exit_code
    except KeyboardInterrupt:
        print("\nInterrupted")
        return 3
    except Exception as e:
        logger.exception(f"Fatal error: {e}")
        return 3


if __name__ == "__main__":
    sys.exit(main())
