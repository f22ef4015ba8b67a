"""Command-line interface for steel-inverse experiments."""

import functools
import logging
from pathlib import Path
from typing import Any, Callable, Optional

import click

from .errors import ConfigError, IngestionError, ModelFormatError, ScalerError, SteelInvError

USAGE_ERRORS = (ConfigError, IngestionError, ScalerError, ModelFormatError)


class CommandError(click.ClickException):
    """A failure reported as ``Error: ...`` with a chosen exit code."""

    def __init__(self, message: str, exit_code: int = 1):
        super().__init__(message)
        self.exit_code = exit_code


def handle_errors(fn: Callable) -> Callable:
    """Map library errors to exit codes: 2 for bad input or config, 1 otherwise."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        from .utils.logging import get_logger

        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except USAGE_ERRORS as e:
            get_logger().error(str(e))
            raise CommandError(str(e), exit_code=2) from e
        except (SteelInvError, OSError, ValueError) as e:
            get_logger().error(str(e))
            raise CommandError(str(e), exit_code=1) from e

    return wrapper


def config_options(fn: Callable) -> Callable:
    """--config, --set, --seed and --kernel, shared by every training command."""
    fn = click.option("--kernel", type=click.Choice(["ordered", "blas"]), default=None,
                      help="Matrix product kernel")(fn)
    fn = click.option("--seed", type=int, default=None, help="Master seed")(fn)
    fn = click.option("--set", "overrides", multiple=True, metavar="SECTION.KEY=VALUE",
                      help="Override a config value (repeatable)")(fn)
    fn = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                      default=None, help="YAML run config (run.yaml); TOML is not read")(fn)
    return fn


def _load_config(config_path: Optional[str], overrides: tuple[str, ...], **flags: Any):
    from .config.settings import load_run_config
    from .nncore.ops import set_kernel

    cfg = load_run_config(config_path, overrides, **flags)
    set_kernel(cfg.kernel)
    return cfg


def _load_splits(data_path: str, cfg):
    from .data.dataset import load_csv
    from .pipeline import make_splits

    return make_splits(load_csv(data_path), cfg)


def _load_teacher(path: str):
    from .training.teacher import load_teacher
    from .training.curves import LossCurve

    teacher, scaler, doc = load_teacher(path)
    return teacher, scaler, LossCurve.from_dict(doc.get("curve", {}))


def _print_metrics(entries) -> None:
    from rich.console import Console
    from rich.table import Table

    table = Table(box=None)
    for column in ("Model", "Protocol", "Split", "MSE", "MAE", "R²", "n"):
        table.add_column(column, justify="left" if column in ("Model", "Protocol", "Split")
                         else "right")
    for name, m in entries:
        table.add_row(name, m.protocol.value, m.split.value, f"{m.mse:.4g}", f"{m.mae:.4g}",
                      "-" if m.r2 is None else f"{m.r2:.4f}", str(m.n))
    Console().print(table)


def _metrics_path(model_path: str) -> Path:
    path = Path(model_path)
    return path.with_name(f"{path.stem}_metrics.csv")


@click.group(invoke_without_command=True)
@click.option("--version", is_flag=True, help="Show version and exit")
@click.option("--verbose", "-v", is_flag=True, help="Verbose output")
@click.option("--log-dir", type=click.Path(file_okay=False), envvar="STEELINV_LOG_DIR",
              default=None, help="Directory for log files")
@click.pass_context
def main(ctx, version, verbose, log_dir):
    """Steel hardness inverse design: Teacher-Student, baselines and TD3."""
    if version:
        from . import __version__
        click.echo(f"steel-inverse v{__version__}")
        return

    from .utils.logging import setup_logger

    setup_logger(level=logging.INFO if verbose else logging.WARNING,
                 log_dir=Path(log_dir) if log_dir else None)

    if ctx.invoked_subcommand is None:
        click.echo(ctx.get_help())


@main.command()
@click.option("--n", "n_samples", type=int, default=None, help="Number of rows")
@click.option("--noise-std", type=float, default=None, help="Hardness noise (HRC)")
@click.option("--out", type=click.Path(dir_okay=False), required=True, help="Output CSV")
@config_options
@handle_errors
def synth(n_samples, noise_std, out, config_path, overrides, seed, kernel):
    """Generate the synthetic many-to-one steel dataset."""
    from .data.dataset import write_csv
    from .data.synth import synth_generate

    cfg = _load_config(config_path, overrides, seed=seed, kernel=kernel,
                       **{"synth.n_samples": n_samples, "synth.noise_std": noise_std})
    data = synth_generate(cfg.synth)
    write_csv(data, out, cfg.digest)
    click.echo(f"Wrote {len(data)} rows to {out}")


@main.command("train-teacher")
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Dataset CSV")
@click.option("--epochs", type=int, default=None, help="Training epochs")
@click.option("--out", type=click.Path(dir_okay=False), default="teacher.json",
              show_default=True, help="Teacher document")
@config_options
@handle_errors
def train_teacher_cmd(data_path, epochs, out, config_path, overrides, seed, kernel):
    """Train the forward surrogate (features -> hardness)."""
    from .eval.metrics import Split
    from .eval.protocols import forward_eval
    from .training.base import save_fit_record, timed_call
    from .training.teacher import save_teacher, train_teacher

    cfg = _load_config(config_path, overrides, seed=seed, kernel=kernel,
                       **{"teacher.epochs": epochs})
    splits = _load_splits(data_path, cfg)
    value, fit = timed_call("teacher", cfg.teacher.seed,
                            lambda: train_teacher(splits.train, splits.val, cfg.teacher))
    fit.raise_for_status()
    teacher, curve = value

    path = save_teacher(out, teacher, splits.scaler, curve, cfg.artifact_dict(), cfg.digest)
    save_fit_record(path, fit, cfg.digest)
    curve.write_csv(path.parent / "teacher_curve.csv", cfg.digest)
    click.echo(f"Teacher saved to {path} ({fit.wall_time_s:.1f} s)")
    _print_metrics([("teacher", forward_eval(teacher, splits.scaler, splits.test, Split.TEST))])


@main.command("train-student")
@click.option("--teacher", "teacher_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Teacher document")
@click.option("--epochs", type=int, default=None, help="Student epochs")
@click.option("--out", type=click.Path(dir_okay=False), default="pair.json",
              show_default=True, help="Teacher-Student pair document")
@config_options
@handle_errors
def train_student_cmd(teacher_path, epochs, out, config_path, overrides, seed, kernel):
    """Train the Student through the frozen Teacher."""
    from .data.sampling import fresh_targets
    from .eval.protocols import functional_eval
    from .pipeline import FRESH_TARGET_OFFSET
    from .training.curves import LossCurve
    from .training.student import StudentModel

    cfg = _load_config(config_path, overrides, seed=seed, kernel=kernel,
                       **{"student.epochs": epochs})
    teacher, scaler, teacher_curve = _load_teacher(teacher_path)
    model = StudentModel(teacher, scaler, cfg.student, teacher_curve)
    model.config = cfg.artifact_dict()
    model.run(None, None).raise_for_status()

    path = model.save(out, cfg.digest)
    (model.curve or LossCurve()).write_csv(path.parent / "student_curve.csv", cfg.digest)
    click.echo(f"Pair saved to {path} ({model.fit_result.wall_time_s:.1f} s)")
    targets = fresh_targets(scaler, cfg.eval.fresh_targets, cfg.seed + FRESH_TARGET_OFFSET)
    _print_metrics([(model.name, functional_eval(model, teacher, targets, scaler))])


def _baseline(model_factory, data_path, teacher_path, out, cfg):
    from .data.sampling import fresh_targets
    from .eval.metrics import Split
    from .eval.protocols import functional_eval, input_space_eval
    from .eval.report import write_metrics_csv
    from .pipeline import FRESH_TARGET_OFFSET

    splits = _load_splits(data_path, cfg)
    model = model_factory(splits.scaler)
    model.run(splits.train, splits.val).raise_for_status()
    path = model.save(out, cfg.digest)

    entries = [
        (model.name, input_space_eval(model, splits.test, Split.TEST)),
        (model.name, input_space_eval(model, splits.train, Split.TRAIN)),
    ]
    if teacher_path:
        teacher, scaler, _ = _load_teacher(teacher_path)
        targets = fresh_targets(scaler, cfg.eval.fresh_targets, cfg.seed + FRESH_TARGET_OFFSET)
        entries.append((model.name, functional_eval(model, teacher, targets, scaler)))
        entries.append((model.name, functional_eval(
            model, teacher, scaler.inverse_targets(splits.test.targets), scaler, Split.TEST)))
    write_metrics_csv(_metrics_path(path), entries, cfg.seed, cfg.digest)
    click.echo(f"{model.display_name} saved to {path} ({model.fit_result.wall_time_s:.1f} s)")
    _print_metrics(entries)
    return model


def baseline_options(fn: Callable) -> Callable:
    fn = click.option("--teacher", "teacher_path", type=click.Path(exists=True, dir_okay=False),
                      default=None, help="Teacher document for functional metrics")(fn)
    fn = click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
                      required=True, help="Dataset CSV")(fn)
    return fn


@main.command("baseline-rf")
@baseline_options
@click.option("--threads", type=int, default=None, help="Worker threads for tree fitting")
@click.option("--out", type=click.Path(dir_okay=False), default="rf.json", show_default=True)
@config_options
@handle_errors
def baseline_rf(data_path, teacher_path, threads, out, config_path, overrides, seed, kernel):
    """Fit the random-forest inverse baseline."""
    from .baselines.forest import ForestModel

    cfg = _load_config(config_path, overrides, seed=seed, kernel=kernel, threads=threads)
    _baseline(lambda scaler: ForestModel(scaler, cfg.forest, threads=cfg.threads),
              data_path, teacher_path, out, cfg)


@main.command("baseline-mlp")
@baseline_options
@click.option("--epochs", type=int, default=None, help="Training epochs")
@click.option("--out", type=click.Path(dir_okay=False), default="mlp.json", show_default=True)
@config_options
@handle_errors
def baseline_mlp(data_path, teacher_path, epochs, out, config_path, overrides, seed, kernel):
    """Fit the direct-inverse MLP baseline."""
    from .baselines.direct import DirectInverseModel
    from .training.curves import LossCurve

    cfg = _load_config(config_path, overrides, seed=seed, kernel=kernel,
                       **{"direct.epochs": epochs})
    model = _baseline(lambda scaler: DirectInverseModel(scaler, cfg.direct),
                      data_path, teacher_path, out, cfg)
    (model.curve or LossCurve()).write_csv(Path(out).parent / "mlp_curve.csv", cfg.digest)


@main.command("train-td3")
@click.option("--teacher", "teacher_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Teacher document")
@click.option("--steps", type=int, default=None, help="Environment steps")
@click.option("--out", type=click.Path(dir_okay=False), default="td3.json", show_default=True)
@config_options
@handle_errors
def train_td3_cmd(teacher_path, steps, out, config_path, overrides, seed, kernel):
    """Train the TD3 actor against the frozen Teacher."""
    from .rl.td3 import Td3Model

    cfg = _load_config(config_path, overrides, seed=seed, kernel=kernel,
                       **{"td3.total_steps": steps})
    teacher, scaler, _ = _load_teacher(teacher_path)
    model = Td3Model(teacher, scaler, cfg.td3)
    model.run(None, None).raise_for_status()
    path = model.save(out, cfg.digest)
    model.reward_curve.write_csv(path.parent / "td3_reward.csv", cfg.digest)
    window = cfg.td3.smoothing_window
    click.echo(f"TD3 actor saved to {path} ({model.fit_result.wall_time_s:.1f} s); "
               f"mean reward over last {window} steps {model.reward_curve.mean_last(window):.4g}")


@main.command()
@click.option("--pair", "--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Inverse model document (pair, rf, mlp or td3)")
@click.option("--teacher", "teacher_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Teacher document (defaults to the pair's own Teacher)")
@click.option("--data", "data_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="Dataset CSV")
@click.option("--protocol", type=click.Choice(["functional", "input-space", "forward", "all"]),
              default="functional", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Metrics CSV (default: <model>_metrics.csv)")
@config_options
@handle_errors
def evaluate(model_path, teacher_path, data_path, protocol, out, config_path, overrides, seed,
             kernel):
    """Evaluate an inverse model under the chosen protocol."""
    from .data.dataset import load_csv, split
    from .data.sampling import fresh_targets
    from .eval.metrics import Split
    from .eval.protocols import forward_eval, functional_eval, input_space_eval
    from .eval.report import write_metrics_csv
    from .pipeline import FRESH_TARGET_OFFSET
    from .training.registry import load_inverse_model
    from .training.student import StudentModel

    cfg = _load_config(config_path, overrides, seed=seed, kernel=kernel)
    model = load_inverse_model(model_path)
    test = None
    if data_path:
        data = load_csv(data_path)
        model.scaler.check_schema(data.schema)
        # Raw rows: the model's own scaler does all normalization.
        _, test = split(data, cfg.test_fraction, [cfg.synth.seed, 1])

    teacher, scaler = None, model.scaler
    if teacher_path:
        teacher, scaler, _ = _load_teacher(teacher_path)
    elif isinstance(model, StudentModel):
        teacher = model.teacher

    wanted = {"functional", "input-space", "forward"} if protocol == "all" else {protocol}
    entries = []
    if "functional" in wanted:
        if teacher is None:
            raise ConfigError("functional evaluation needs --teacher for this model",
                              key="teacher")
        targets = fresh_targets(scaler, cfg.eval.fresh_targets, cfg.seed + FRESH_TARGET_OFFSET)
        entries.append((model.name, functional_eval(model, teacher, targets, scaler)))
        if test is not None:
            entries.append((model.name, functional_eval(
                model, teacher, test.targets, scaler, Split.TEST)))
    if "input-space" in wanted:
        if test is None:
            raise ConfigError("input-space evaluation needs --data", key="data")
        entries.append((model.name, input_space_eval(model, test, Split.TEST)))
    if "forward" in wanted:
        if test is None or teacher is None:
            raise ConfigError("forward evaluation needs --data and a teacher", key="data")
        entries.append(("teacher", forward_eval(teacher, scaler, test, Split.TEST)))

    path = write_metrics_csv(out or _metrics_path(model_path), entries, cfg.seed, cfg.digest)
    _print_metrics(entries)
    click.echo(f"Metrics written to {path}")


@main.command()
@click.option("--runs", "runs_dir", type=click.Path(exists=True, file_okay=False),
              required=True, help="Directory holding run outputs")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Where to write report files (default: the runs directory)")
@click.option("--redact-timing", is_flag=True, help="Write wall times as 0")
@handle_errors
def report(runs_dir, out_dir, redact_timing):
    """Build the comparison report, text table and curve plot script."""
    from .eval.report import build_report, collect_runs, write_report_files

    entries = collect_runs(runs_dir)
    if not entries:
        raise CommandError(f"no metrics files found under {runs_dir}", exit_code=1)
    comparison = build_report(entries)
    paths = write_report_files(comparison, runs_dir, out_dir or runs_dir, redact_timing)
    click.echo(comparison.render_text(redact_timing))
    click.echo(f"Report: {paths['csv']}  Plot script: {paths['plot']}")


@main.command()
@click.option("--pair", "--model", "model_path", type=click.Path(exists=True, dir_okay=False),
              required=True, help="Inverse model document")
@click.option("--hardness", type=float, multiple=True, required=True,
              help="Target hardness in HRC (repeatable)")
@handle_errors
def invert(model_path, hardness):
    """Print recipes (raw feature values) for target hardness values."""
    import numpy as np
    from rich.console import Console
    from rich.table import Table

    from .nncore.mlp import forward
    from .training.registry import load_inverse_model
    from .training.student import StudentModel

    model = load_inverse_model(model_path)
    targets = np.array(hardness, dtype=np.float64)
    recipes = model.predict_raw(targets)

    table = Table(title=f"{model.display_name} recipes")
    table.add_column("Feature")
    for value in targets:
        table.add_column(f"{value:g} HRC", justify="right")
    for j, name in enumerate(model.scaler.feature_names):
        table.add_row(name, *(f"{recipes[i, j]:.4g}" for i in range(len(targets))))
    if isinstance(model, StudentModel):
        normalized = model.scaler.transform_features(recipes)
        achieved = model.scaler.inverse_targets(forward(model.teacher, normalized)[0][:, 0])
        table.add_row("teacher(recipe)", *(f"{v:.3f}" for v in achieved))
    Console().print(table)


@main.command()
@click.option("--groups", type=int, default=50, show_default=True)
@click.option("--size", type=int, default=4, show_default=True, help="Rows per group")
@config_options
@handle_errors
def witness(groups, size, config_path, overrides, seed, kernel):
    """Check that rows sharing (P, composition) share hardness while (T, t) differ."""
    from .data.synth import many_to_one_witness, synth_witness

    cfg = _load_config(config_path, overrides, seed=seed, kernel=kernel)
    data, labels = synth_witness(cfg.synth, n_groups=groups, group_size=size)
    summary = many_to_one_witness(data, labels)
    click.echo(f"Groups: {summary.n_groups}")
    click.echo(f"Max within-group hardness variance: {summary.max_hardness_variance!r}")
    click.echo(f"Min within-group (T, t) spread: {summary.min_process_spread:.6g}")
    click.echo(f"Many-to-one witness holds: {'yes' if summary.holds else 'no'}")
    if not summary.holds:
        raise CommandError("many-to-one witness failed", exit_code=1)


@main.command()
@click.option("--seed", "seeds", type=int, multiple=True, help="Master seed (repeatable)")
@click.option("--out", "out_dir", type=click.Path(file_okay=False), default=None,
              help="Output directory (default: output_dir from the config)")
@click.option("--threads", type=int, default=None, help="Worker threads for tree fitting")
@click.option("--kernel", type=click.Choice(["ordered", "blas"]), default=None)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
              default=None, help="YAML run config (run.yaml); TOML is not read")
@click.option("--set", "overrides", multiple=True, metavar="SECTION.KEY=VALUE")
@click.option("--redact-timing", is_flag=True, help="Write wall times as 0 in the report")
@handle_errors
def pipeline(seeds, out_dir, threads, kernel, config_path, overrides, redact_timing):
    """Run the whole experiment for each seed and write a combined report."""
    from .pipeline import run_pipeline

    cfg = _load_config(config_path, overrides, kernel=kernel, threads=threads)
    seeds = seeds or (cfg.seed,)
    out = Path(out_dir or cfg.output_dir)

    def progress(message: str, fraction: float) -> None:
        if fraction >= 1.0:
            click.echo(f"  {message}")

    comparison = run_pipeline(cfg, seeds, out, redact_timing, progress)
    click.echo(comparison.render_text(redact_timing))
    click.echo(f"Artifacts in {out}")


@main.command()
def info():
    """Show host information and numeric settings."""
    from .nncore.ops import get_kernel
    from .utils.system import default_threads, format_bytes, get_system_info

    host = get_system_info()
    click.echo("System Info")
    click.echo("=" * 50)
    click.echo(f"Python: {host.python_version}  numpy: {host.numpy_version}")
    click.echo(f"Platform: {host.platform}")
    click.echo(f"Hostname: {host.hostname}")
    click.echo(f"CPU cores: {host.cpu_count} logical, {host.physical_cores or '?'} physical")
    click.echo(f"Memory: {format_bytes(host.memory_available)} free of "
               f"{format_bytes(host.memory_total)}")
    click.echo(f"\nKernel: {get_kernel()}")
    click.echo(f"Suggested --threads: {default_threads()}")


@main.command()
@click.option("--lines", "-n", type=int, default=50, show_default=True)
@click.option("--clear", "clear_days", type=int, default=None,
              help="Remove log files older than DAYS instead")
def logs(lines, clear_days):
    """Show today's log or clear old logs."""
    from .utils.logging import clear_old_logs, get_log_directory, get_recent_logs

    if clear_days is not None:
        removed = clear_old_logs(clear_days)
        click.echo(f"Removed {removed} log file(s) from {get_log_directory()}")
        return
    recent = get_recent_logs(lines)
    if not recent:
        click.echo("No log entries for today.")
        return
    click.echo("".join(recent), nl=False)


if __name__ == "__main__":
    main()
