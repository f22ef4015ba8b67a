"""End-to-end experiment runs: data, four inverse models, evaluation and report.

One run directory per master seed::

    seed_42/
        run.yaml            resolved config
        data.csv            synthetic dataset
        teacher.json        forward surrogate (+ teacher.fit.json, teacher_curve.csv)
        pair.json           Teacher-Student pair (+ pair.fit.json, student_curve.csv)
        rf.json             random forest (+ rf.fit.json)
        mlp.json            direct-inverse MLP (+ mlp.fit.json, mlp_curve.csv)
        td3.json            TD3 actor (+ td3.fit.json, td3_reward.csv)
        metrics.csv         every (model, protocol, split) metric

Model documents carry no timings, so a rerun with the same seed reproduces
them byte for byte; wall times live in the ``*.fit.json`` records.
"""

from dataclasses import dataclass, replace
from pathlib import Path
from typing import Callable, Iterable, Optional, Sequence

from .baselines.direct import DirectInverseModel
from .baselines.forest import ForestModel
from .config.settings import CONFIG_FILENAME, RunConfig, save_run_config
from .data.dataset import Dataset, split, write_csv
from .data.sampling import fresh_targets
from .data.scaler import Scaler, fit_scaler, transform
from .data.synth import synth_generate
from .eval.metrics import MetricSet, Split
from .eval.protocols import forward_eval, functional_eval, input_space_eval
from .eval.report import (
    METRICS_FILENAME,
    ComparisonReport,
    build_report,
    collect_runs,
    write_metrics_csv,
    write_report_files,
)
from .nncore.mlp import Mlp
from .nncore.ops import use_kernel
from .rl.td3 import Td3Model
from .training.base import BaseInverseModel, save_fit_record, timed_call
from .training.curves import LossCurve
from .training.student import StudentModel
from .training.teacher import save_teacher, train_teacher
from .utils.logging import get_logger

FRESH_TARGET_OFFSET = 7

ProgressCallback = Callable[[str, float], None]


@dataclass(eq=False)
class Splits:
    """Normalized train/val/test partitions and the scaler fitted on train."""
    scaler: Scaler
    train: Dataset
    val: Dataset
    test: Dataset


def make_splits(data: Dataset, cfg: RunConfig) -> Splits:
    """Seeded test split, then a validation split of the remaining rows.

    ``val_fraction`` is relative to the rows left after the test split.
    """
    rest, test = split(data, cfg.test_fraction, [cfg.synth.seed, 1])
    train, val = split(rest, cfg.val_fraction, [cfg.synth.seed, 2])
    scaler = fit_scaler(train)
    return Splits(scaler, transform(train, scaler), transform(val, scaler),
                  transform(test, scaler))


def evaluate_models(
    models: Sequence[BaseInverseModel],
    teacher: Mlp,
    splits: Splits,
    cfg: RunConfig,
) -> list[tuple[str, MetricSet]]:
    """Teacher forward metrics, then functional and input-space metrics per model."""
    scaler = splits.scaler
    entries = [
        ("teacher", forward_eval(teacher, scaler, splits.train, Split.TRAIN)),
        ("teacher", forward_eval(teacher, scaler, splits.test, Split.TEST)),
    ]
    targets = {
        Split.FRESH: fresh_targets(scaler, cfg.eval.fresh_targets, cfg.seed + FRESH_TARGET_OFFSET),
        Split.TEST: scaler.inverse_targets(splits.test.targets),
        Split.TRAIN: scaler.inverse_targets(splits.train.targets),
    }
    for model in models:
        for which, values in targets.items():
            entries.append((model.name, functional_eval(model, teacher, values, scaler, which)))
        entries.append((model.name, input_space_eval(model, splits.test, Split.TEST)))
        entries.append((model.name, input_space_eval(model, splits.train, Split.TRAIN)))
    return entries


@dataclass
class RunArtifacts:
    run_dir: Path
    config_digest: str
    metrics: list[tuple[str, MetricSet]]

    @property
    def metrics_path(self) -> Path:
        return self.run_dir / METRICS_FILENAME


def run_experiment(cfg: RunConfig, run_dir: Path,
                   progress: Optional[ProgressCallback] = None) -> RunArtifacts:
    """Train and evaluate all four inverse models under one master seed."""
    logger = get_logger()
    run_dir = Path(run_dir)
    digest = cfg.digest
    logger.info(f"run seed {cfg.seed} -> {run_dir} (config {digest[:12]})")
    save_run_config(cfg, run_dir / CONFIG_FILENAME)

    with use_kernel(cfg.kernel):
        data = synth_generate(cfg.synth)
        write_csv(data, run_dir / "data.csv", digest)
        splits = make_splits(data, cfg)

        value, teacher_fit = timed_call(
            "teacher", cfg.teacher.seed,
            lambda: train_teacher(splits.train, splits.val, cfg.teacher, progress),
        )
        teacher_fit.raise_for_status()
        teacher, teacher_curve = value
        teacher_path = save_teacher(run_dir / "teacher.json", teacher, splits.scaler,
                                    teacher_curve, cfg.artifact_dict(), digest)
        save_fit_record(teacher_path, teacher_fit, digest)
        teacher_curve.write_csv(run_dir / "teacher_curve.csv", digest)

        student = StudentModel(teacher, splits.scaler, cfg.student, teacher_curve)
        student.config = cfg.artifact_dict()
        forest = ForestModel(splits.scaler, cfg.forest, threads=cfg.threads)
        direct = DirectInverseModel(splits.scaler, cfg.direct)
        td3 = Td3Model(teacher, splits.scaler, cfg.td3)

        models: list[tuple[BaseInverseModel, str]] = [
            (student, "pair.json"),
            (forest, "rf.json"),
            (direct, "mlp.json"),
            (td3, "td3.json"),
        ]
        for model, file_name in models:
            if progress:
                model.set_progress_callback(progress)
            model.run(splits.train, splits.val).raise_for_status()
            model.save(run_dir / file_name, digest)

        (student.curve or LossCurve()).write_csv(run_dir / "student_curve.csv", digest)
        (direct.curve or LossCurve()).write_csv(run_dir / "mlp_curve.csv", digest)
        if td3.reward_curve is not None:
            td3.reward_curve.write_csv(run_dir / "td3_reward.csv", digest)

        metrics = evaluate_models([m for m, _ in models], teacher, splits, cfg)
    write_metrics_csv(run_dir / METRICS_FILENAME, metrics, cfg.seed, digest)
    logger.info(f"run seed {cfg.seed} complete")
    return RunArtifacts(run_dir=run_dir, config_digest=digest, metrics=metrics)


def run_pipeline(
    cfg: RunConfig,
    seeds: Iterable[int],
    out_dir: Path,
    redact_timing: bool = False,
    progress: Optional[ProgressCallback] = None,
) -> ComparisonReport:
    """One run per seed under ``out_dir/seed_<S>``, then a combined report in ``out_dir``."""
    out_dir = Path(out_dir)
    for seed in seeds:
        run_experiment(replace(cfg, seed=seed), out_dir / f"seed_{seed}", progress)
    report = build_report(collect_runs(out_dir))
    write_report_files(report, out_dir, out_dir, redact_timing)
    return report
