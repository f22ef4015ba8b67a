"""Tests for comparison reports, metrics files and the curve plot script."""

import pytest

from steelinv.errors import ModelFormatError
from steelinv.eval import (
    MetricSet,
    Protocol,
    ReportRow,
    Split,
    build_report,
    collect_runs,
    plot_script,
    read_metrics_csv,
    write_metrics_csv,
    write_report_files,
)
from steelinv.eval.report import BEST_NOTE, POOR_NOTE, REPORT_HEADER
from steelinv.training.base import FitResult, FitStatus, save_fit_record
from steelinv.training.curves import LossCurve
from steelinv.utils.io import read_config_digest, read_csv


def metric(mse, r2=0.9, protocol=Protocol.FUNCTIONAL, split=Split.FRESH, n=10):
    return MetricSet(mse=mse, mae=mse ** 0.5, r2=r2, n=n, protocol=protocol, split=split)


def row(name, mse, **kwargs):
    return ReportRow.from_metrics(name, metric(mse, **kwargs), seed=42, wall_time_s=12.5)


class TestOrdering:
    def test_single_entry(self):
        report = build_report([row("teacher_student", 0.5)])
        assert len(report.rows) == 1

    def test_empty(self):
        with pytest.raises(ValueError):
            build_report([])

    def test_lower_mse_first(self):
        report = build_report([row("td3", 4.84), row("teacher_student", 0.52)])
        assert [r.model_name for r in report.rows] == ["teacher_student", "td3"]

    def test_tie_broken_by_name(self):
        report = build_report([row("td3", 1.0), row("random_forest", 1.0)])
        assert [r.model_name for r in report.rows] == ["random_forest", "td3"]

    def test_functional_before_input_space(self):
        report = build_report([
            row("random_forest", 0.01, protocol=Protocol.INPUT_SPACE, split=Split.TEST),
            row("td3", 9.0),
        ])
        assert report.rows[0].protocol is Protocol.FUNCTIONAL

    def test_fresh_before_test(self):
        report = build_report([row("td3", 0.1, split=Split.TEST), row("td3", 5.0)])
        assert [r.split for r in report.rows] == [Split.FRESH, Split.TEST]


class TestNotes:
    def test_best_and_poor(self):
        report = build_report([
            row("teacher_student", 0.52, r2=0.98),
            row("td3", 4.84, r2=0.85),
            row("random_forest", 620.5, r2=0.08, protocol=Protocol.INPUT_SPACE,
                split=Split.TEST),
        ])
        assert report.best().model_name == "teacher_student"
        assert report.notes(report.rows[0]) == BEST_NOTE
        assert report.notes(report.rows[1]) == ""
        assert report.notes(report.rows[2]) == POOR_NOTE

    def test_no_functional_rows(self):
        report = build_report([row("teacher", 0.3, protocol=Protocol.FORWARD, split=Split.TEST)])
        assert report.best() is None


class TestOutputs:
    def test_csv_redacts_timing(self, tmp_path):
        report = build_report([row("teacher_student", 0.5)])
        header, rows = read_csv(report.write_csv(tmp_path / "r.csv", redact_timing=True))
        assert tuple(header) == REPORT_HEADER
        assert rows[0][6] == "0.0"
        _, rows = read_csv(report.write_csv(tmp_path / "t.csv"))
        assert rows[0][6] == "12.5"

    def test_missing_r2_written_empty(self, tmp_path):
        report = build_report([row("teacher_student", 0.0, r2=None)])
        _, rows = read_csv(report.write_csv(tmp_path / "r.csv"))
        assert rows[0][5] == ""

    def test_text_table(self):
        report = build_report([
            row("teacher_student", 0.52),
            row("td3", 0.1, split=Split.TRAIN),
        ])
        text = report.render_text()
        assert "Teacher-Student" in text
        assert "12.5 s" in text
        assert BEST_NOTE in text
        assert "TD3" not in text
        assert "TD3" in report.render_text(include_train=True)
        assert "12.5 s" not in report.render_text(redact_timing=True)


class TestMetricsFiles:
    def test_round_trip(self, tmp_path):
        entries = [("td3", metric(0.25)), ("random_forest", metric(3.0, r2=None,
                                                                    protocol=Protocol.INPUT_SPACE,
                                                                    split=Split.TEST))]
        path = write_metrics_csv(tmp_path / "metrics.csv", entries, seed=7, digest="abc")
        assert read_config_digest(path) == "abc"
        back = read_metrics_csv(path)
        assert [(name, seed) for name, seed, _ in back] == [("td3", 7), ("random_forest", 7)]
        assert back[1][2].r2 is None
        assert back[0][2] == entries[0][1]

    def test_bad_header(self, tmp_path):
        path = tmp_path / "metrics.csv"
        path.write_text("model,mse\ntd3,1.0\n")
        with pytest.raises(ModelFormatError):
            read_metrics_csv(path)


class TestCollect:
    def make_run(self, root, seed, student_mse):
        run = root / f"seed_{seed}"
        write_metrics_csv(run / "metrics.csv", [
            ("teacher_student", metric(student_mse)),
            ("td3", metric(2.0)),
        ], seed=seed, digest=f"d{seed}")
        save_fit_record(run / "pair.json",
                        FitResult("teacher_student", FitStatus.COMPLETED, seed, 3.0))
        save_fit_record(run / "td3.json", FitResult("td3", FitStatus.COMPLETED, seed, 30.0))
        curve = LossCurve()
        curve.append(1, 0.5, 0.4)
        curve.write_csv(run / "student_curve.csv")
        return run

    def test_collect_attaches_wall_times(self, tmp_path):
        self.make_run(tmp_path, 1, 0.5)
        self.make_run(tmp_path, 2, 0.4)
        rows = collect_runs(tmp_path)
        assert len(rows) == 4
        times = {(r.model_name, r.seed): r.wall_time_s for r in rows}
        assert times[("teacher_student", 1)] == 3.0
        assert times[("td3", 2)] == 30.0
        report = build_report(rows)
        assert report.rows[0].seed == 2
        assert report.config_digest not in ("d1", "d2")

    def test_single_digest_kept(self, tmp_path):
        self.make_run(tmp_path, 1, 0.5)
        assert build_report(collect_runs(tmp_path)).config_digest == "d1"

    def test_plot_script(self, tmp_path):
        self.make_run(tmp_path, 1, 0.5)
        script = plot_script(tmp_path, tmp_path)
        assert "set multiplot layout 2,2" in script
        assert '"seed_1/student_curve.csv"' in script
        assert 'plot 0 title "no data"' in script

    def test_write_report_files(self, tmp_path):
        self.make_run(tmp_path, 1, 0.5)
        report = build_report(collect_runs(tmp_path))
        paths = write_report_files(report, tmp_path, tmp_path / "out", redact_timing=True)
        assert {p.name for p in paths.values()} == {"report.csv", "report.txt", "curves.gp"}
        assert all(p.exists() for p in paths.values())

    def test_report_files_carry_digest(self, tmp_path):
        self.make_run(tmp_path, 1, 0.5)
        report = build_report(collect_runs(tmp_path))
        paths = write_report_files(report, tmp_path, tmp_path / "out")
        assert read_config_digest(paths["plot"]) == "d1"
        assert read_config_digest(paths["csv"]) == "d1"
        assert paths["text"].read_text().splitlines()[-1] == "config_digest: d1"

    def test_plot_script_digest_line(self, tmp_path):
        assert plot_script(tmp_path, tmp_path, digest="abc").startswith("# config_digest: abc\n")
        assert plot_script(tmp_path, tmp_path).startswith("# Render with")
