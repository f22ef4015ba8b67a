"""Metrics, evaluation protocols and comparison reports."""

from .metrics import MetricSet, Protocol, Split, compute_metrics, r2
from .protocols import check_same_scaler, forward_eval, functional_eval, input_space_eval
from .report import (
    ComparisonReport,
    ReportRow,
    build_report,
    collect_runs,
    plot_script,
    read_metrics_csv,
    write_metrics_csv,
    write_report_files,
)

__all__ = [
    "ComparisonReport",
    "MetricSet",
    "Protocol",
    "ReportRow",
    "Split",
    "build_report",
    "check_same_scaler",
    "collect_runs",
    "compute_metrics",
    "forward_eval",
    "functional_eval",
    "input_space_eval",
    "plot_script",
    "r2",
    "read_metrics_csv",
    "write_metrics_csv",
    "write_report_files",
]
