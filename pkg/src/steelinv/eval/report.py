"""Comparison reports: CSV, aligned text table and a gnuplot script for curves."""

import io
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union

from rich import box
from rich.console import Console
from rich.table import Table

from ..errors import ModelFormatError
from ..training.base import FitResult
from ..utils.digest import config_digest
from ..utils.io import format_float, read_config_digest, read_csv, read_json, write_csv
from ..utils.logging import get_logger
from ..utils.system import format_duration
from .metrics import MetricSet, Protocol, Split

REPORT_HEADER = ("model", "protocol", "split", "mse", "mae", "r2", "wall_time_s", "seed")
METRICS_HEADER = ("model", "protocol", "split", "mse", "mae", "r2", "n", "seed")
METRICS_FILENAME = "metrics.csv"
METRICS_GLOB = "*metrics.csv"

BEST_NOTE = "Best overall performance"
POOR_NOTE = "Poor generalization"
POOR_R2 = 0.5

_PROTOCOL_RANK = {Protocol.FUNCTIONAL: 0, Protocol.INPUT_SPACE: 1, Protocol.FORWARD: 2}
_SPLIT_RANK = {Split.FRESH: 0, Split.TEST: 1, Split.TRAIN: 2}

DISPLAY_NAMES = {
    "teacher": "Teacher (forward)",
    "teacher_student": "Teacher-Student",
    "td3": "TD3 (RL)",
    "random_forest": "Random Forest",
    "mlp_baseline": "MLP (baseline)",
}

# (file name, title, y label, columns) per curve artifact found in a run directory.
CURVE_FILES = (
    ("teacher_curve.csv", "Teacher loss", "MSE (normalized)", ("train", "val")),
    ("student_curve.csv", "Student functional loss", "MSE (normalized)", ("train", "val")),
    ("mlp_curve.csv", "Direct-inverse MLP loss", "MSE (normalized)", ("train", "val")),
    ("td3_reward.csv", "TD3 reward", "reward", ("raw", "smoothed")),
)


def _fmt_r2(value: Optional[float]) -> str:
    return "" if value is None else format_float(value)


def _parse_r2(text: str) -> Optional[float]:
    return float(text) if text.strip() else None


@dataclass(frozen=True)
class ReportRow:
    model_name: str
    protocol: Protocol
    split: Split
    mse: float
    mae: float
    r2: Optional[float]
    wall_time_s: Optional[float] = None
    seed: int = 0
    config_digest: str = ""

    @classmethod
    def from_metrics(cls, model_name: str, metrics: MetricSet, seed: int = 0,
                     wall_time_s: Optional[float] = None, digest: str = "") -> "ReportRow":
        return cls(model_name, metrics.protocol, metrics.split, metrics.mse, metrics.mae,
                   metrics.r2, wall_time_s, seed, digest)

    @property
    def sort_key(self) -> tuple:
        return (_PROTOCOL_RANK[self.protocol], _SPLIT_RANK[self.split], self.mse,
                self.model_name, self.seed)


@dataclass(frozen=True)
class ComparisonReport:
    """Rows ordered functional first, then by split, then ascending MSE and model name."""
    rows: tuple[ReportRow, ...]

    @property
    def config_digest(self) -> str:
        digests = sorted({r.config_digest for r in self.rows if r.config_digest})
        if len(digests) == 1:
            return digests[0]
        return config_digest(digests)

    @property
    def model_names(self) -> list[str]:
        return sorted({r.model_name for r in self.rows})

    def best(self) -> Optional[ReportRow]:
        """Lowest-MSE functional row, preferring fresh targets."""
        functional = [r for r in self.rows if r.protocol is Protocol.FUNCTIONAL]
        return min(functional, key=lambda r: r.sort_key) if functional else None

    def notes(self, row: ReportRow) -> str:
        notes = []
        if row is self.best():
            notes.append(BEST_NOTE)
        if row.r2 is not None and row.r2 < POOR_R2:
            notes.append(POOR_NOTE)
        return "; ".join(notes)

    def write_csv(self, path: Union[str, Path], redact_timing: bool = False) -> Path:
        def wall(row: ReportRow) -> float:
            return 0.0 if redact_timing or row.wall_time_s is None else row.wall_time_s

        rows = (
            (r.model_name, r.protocol.value, r.split.value, r.mse, r.mae, _fmt_r2(r.r2),
             wall(r), r.seed)
            for r in self.rows
        )
        return write_csv(path, REPORT_HEADER, rows, self.config_digest)

    def render_text(self, redact_timing: bool = False, include_train: bool = False,
                    width: int = 140) -> str:
        table = Table(title="Performance comparison of inverse modeling approaches",
                      box=box.SIMPLE_HEAD)
        table.add_column("Model")
        table.add_column("Protocol")
        table.add_column("Split")
        table.add_column("MSE", justify="right")
        table.add_column("MAE", justify="right")
        table.add_column("R²", justify="right")
        table.add_column("Training Time", justify="right")
        table.add_column("Seed", justify="right")
        table.add_column("Notes")

        for row in self.rows:
            if row.split is Split.TRAIN and not include_train:
                continue
            if redact_timing or row.wall_time_s is None:
                timing = "-"
            else:
                timing = format_duration(row.wall_time_s)
            table.add_row(
                DISPLAY_NAMES.get(row.model_name, row.model_name),
                row.protocol.value,
                row.split.value,
                f"{row.mse:.4g}",
                f"{row.mae:.4g}",
                "-" if row.r2 is None else f"{row.r2:.3f}",
                timing,
                str(row.seed),
                self.notes(row),
            )

        buffer = io.StringIO()
        console = Console(file=buffer, width=width, color_system=None, force_terminal=False)
        console.print(table)
        return buffer.getvalue()


def build_report(entries: Iterable[ReportRow]) -> ComparisonReport:
    rows = tuple(sorted(entries, key=lambda r: r.sort_key))
    if not rows:
        raise ValueError("a report needs at least one entry")
    return ComparisonReport(rows)


def write_metrics_csv(path: Union[str, Path], entries: Sequence[tuple[str, MetricSet]],
                      seed: int, digest: Optional[str] = None) -> Path:
    """Per-run metrics file: one row per (model, protocol, split)."""
    rows = ((name, m.protocol.value, m.split.value, m.mse, m.mae, _fmt_r2(m.r2), m.n, seed)
            for name, m in entries)
    return write_csv(path, METRICS_HEADER, rows, digest)


def read_metrics_csv(path: Union[str, Path]) -> list[tuple[str, int, MetricSet]]:
    header, rows = read_csv(path)
    if tuple(header) != METRICS_HEADER:
        raise ModelFormatError(f"{path}: expected header {','.join(METRICS_HEADER)}")
    out = []
    for line, row in enumerate(rows, start=1):
        try:
            model, protocol, split, mse, mae, r2, n, seed = row
            metrics = MetricSet(float(mse), float(mae), _parse_r2(r2), int(n),
                                Protocol(protocol), Split(split))
        except ValueError as e:
            raise ModelFormatError(f"{path}: bad metrics row {line}: {e}") from e
        out.append((model, int(seed), metrics))
    return out


def _fit_times(run_dir: Path) -> dict[str, float]:
    times = {}
    for sidecar in sorted(run_dir.glob("*.fit.json")):
        try:
            record = FitResult.from_dict(read_json(sidecar))
        except (KeyError, ValueError, ModelFormatError) as e:
            get_logger().warning(f"skipping fit record {sidecar}: {e}")
            continue
        times[record.model_name] = record.wall_time_s
    return times


def collect_runs(runs_dir: Union[str, Path]) -> list[ReportRow]:
    """Report rows from every ``*metrics.csv`` below ``runs_dir``.

    Wall times come from the ``*.fit.json`` records next to each metrics file.
    """
    runs_dir = Path(runs_dir)
    entries = []
    for metrics_path in sorted(runs_dir.rglob(METRICS_GLOB)):
        digest = read_config_digest(metrics_path) or ""
        times = _fit_times(metrics_path.parent)
        for model, seed, metrics in read_metrics_csv(metrics_path):
            entries.append(ReportRow.from_metrics(model, metrics, seed, times.get(model), digest))
    get_logger().info(f"collected {len(entries)} report rows from {runs_dir}")
    return entries


def plot_script(runs_dir: Union[str, Path], script_dir: Union[str, Path],
                image_name: str = "curves.png", digest: Optional[str] = None) -> str:
    """gnuplot source plotting every curve CSV under ``runs_dir``.

    Paths are relative to ``script_dir``, where the script is meant to run.
    """
    runs_dir, script_dir = Path(runs_dir), Path(script_dir)
    lines = [f"# config_digest: {digest}"] if digest else []
    lines += [
        "# Render with: gnuplot curves.gp",
        'set datafile separator ","',
        "set key autotitle columnhead",
        'set terminal pngcairo size 1400,1000',
        f'set output "{image_name}"',
        "set multiplot layout 2,2",
    ]
    for file_name, title, ylabel, columns in CURVE_FILES:
        found = sorted(runs_dir.rglob(file_name))
        lines += [f'set title "{title}"', 'set xlabel "epoch"' if ylabel != "reward"
                  else 'set xlabel "step"', f'set ylabel "{ylabel}"']
        lines.append("set logscale y" if ylabel != "reward" else "unset logscale y")
        if not found:
            lines.append('plot 0 title "no data"')
            continue
        plots = []
        for path in found:
            if path.is_relative_to(script_dir):
                rel = path.relative_to(script_dir)
            else:
                rel = path.resolve()
            run = path.parent.name
            plots.append(f'"{rel.as_posix()}" using 1:2 with lines title "{run} {columns[0]}"')
            plots.append(f'"" using 1:3 with lines title "{run} {columns[1]}"')
        lines.append("plot " + ", \\\n     ".join(plots))
    lines += ["unset multiplot", ""]
    return "\n".join(lines)


def write_report_files(report: ComparisonReport, runs_dir: Union[str, Path],
                       out_dir: Union[str, Path], redact_timing: bool = False) -> dict[str, Path]:
    """report.csv, report.txt and curves.gp in ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    text_path = out_dir / "report.txt"
    digest = report.config_digest
    footer = f"config_digest: {digest}\n"
    text_path.write_text(report.render_text(redact_timing) + footer, encoding="utf-8")
    plot_path = out_dir / "curves.gp"
    plot_path.write_text(plot_script(runs_dir, out_dir, digest=digest), encoding="utf-8")
    return {
        "csv": report.write_csv(out_dir / "report.csv", redact_timing),
        "text": text_path,
        "plot": plot_path,
    }
