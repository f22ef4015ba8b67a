"""Tests for the command-line interface."""

import json

import pytest
import yaml
from click.testing import CliRunner
from conftest import FAST_CONFIG

from steelinv import __version__
from steelinv.cli import main
from steelinv.config import SEED_OFFSETS, RunConfig
from steelinv.data.dataset import load_csv, split
from steelinv.eval import input_space_eval, read_metrics_csv
from steelinv.training import load_inverse_model

FAST_TEACHER = ["--epochs", "2", "--set", "teacher.hidden_width=4"]
FAST_STUDENT = ["--epochs", "1", "--set", "student.steps_per_epoch=2",
                "--set", "student.hidden_width=4", "--set", "eval.fresh_targets=20"]
FAST_FOREST = ["--set", "forest.n_trees=3", "--set", "forest.max_depth=3"]


@pytest.fixture
def runner():
    return CliRunner()


@pytest.fixture
def invoke(runner):
    def _invoke(*args):
        return runner.invoke(main, [str(a) for a in args])
    return _invoke


@pytest.fixture
def data_csv(tmp_path, invoke):
    path = tmp_path / "data.csv"
    result = invoke("synth", "--n", 120, "--out", path)
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture
def forest_doc(tmp_path, invoke, data_csv):
    path = tmp_path / "rf.json"
    result = invoke("baseline-rf", "--data", data_csv, "--out", path, *FAST_FOREST)
    assert result.exit_code == 0, result.output
    return path


@pytest.fixture
def teacher_doc(tmp_path, invoke, data_csv):
    path = tmp_path / "teacher.json"
    result = invoke("train-teacher", "--data", data_csv, "--out", path, *FAST_TEACHER)
    assert result.exit_code == 0, result.output
    return path


class TestBasics:
    def test_version(self, invoke):
        result = invoke("--version")
        assert result.exit_code == 0
        assert __version__ in result.output

    def test_help_without_command(self, invoke):
        result = invoke()
        assert result.exit_code == 0
        assert "train-teacher" in result.output

    def test_info(self, invoke):
        result = invoke("info")
        assert result.exit_code == 0
        assert "System Info" in result.output
        assert "Kernel: ordered" in result.output

    def test_logs(self, invoke):
        assert invoke("-v", "witness", "--groups", 3, "--size", 2).exit_code == 0
        assert invoke("logs", "-n", 5).exit_code == 0
        result = invoke("logs", "--clear", 30)
        assert result.exit_code == 0
        assert "Removed 0" in result.output


class TestSynth:
    def test_byte_identical(self, tmp_path, invoke):
        for name in ("a.csv", "b.csv"):
            assert invoke("synth", "--n", 40, "--out", tmp_path / name).exit_code == 0
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
        invoke("synth", "--n", 40, "--seed", 9, "--out", tmp_path / "c.csv")
        assert (tmp_path / "a.csv").read_bytes() != (tmp_path / "c.csv").read_bytes()

    def test_unknown_override(self, tmp_path, invoke):
        result = invoke("synth", "--out", tmp_path / "a.csv", "--set", "synth.rows=3")
        assert result.exit_code == 2
        assert "synth.rows" in result.output

    def test_bad_config_file(self, tmp_path, invoke):
        config = tmp_path / "run.yaml"
        config.write_text("kernel: gpu\n")
        result = invoke("synth", "--out", tmp_path / "a.csv", "--config", config)
        assert result.exit_code == 2

    def test_toml_config_refused(self, tmp_path, invoke):
        config = tmp_path / "run.toml"
        config.write_text("seed = 3\n")
        result = invoke("synth", "--out", tmp_path / "a.csv", "--config", config)
        assert result.exit_code == 2
        assert "TOML is not read" in result.output
        assert "TOML is not read" in " ".join(invoke("synth", "--help").output.split())

    def test_witness(self, invoke):
        result = invoke("witness", "--groups", 5, "--size", 3)
        assert result.exit_code == 0, result.output
        assert "holds: yes" in result.output


class TestModels:
    def test_forest_outputs(self, tmp_path, forest_doc):
        assert (tmp_path / "rf.fit.json").exists()
        assert (tmp_path / "rf_metrics.csv").exists()

    def test_invert(self, invoke, forest_doc):
        result = invoke("invert", "--model", forest_doc, "--hardness", 30, "--hardness", 50)
        assert result.exit_code == 0, result.output
        assert "tempering_temp_C" in result.output

    def test_evaluate_input_space(self, tmp_path, invoke, forest_doc, data_csv):
        out = tmp_path / "eval.csv"
        result = invoke("evaluate", "--model", forest_doc, "--data", data_csv,
                        "--protocol", "input-space", "--out", out)
        assert result.exit_code == 0, result.output
        assert "input_space" in out.read_text()

    @pytest.mark.parametrize("seed", [7, 8, 10])
    def test_evaluate_under_other_seed_uses_model_scaler(self, tmp_path, invoke, forest_doc,
                                                         data_csv, seed):
        out = tmp_path / "eval.csv"
        result = invoke("evaluate", "--model", forest_doc, "--data", data_csv, "--seed", seed,
                        "--protocol", "input-space", "--out", out)
        assert result.exit_code == 0, result.output

        _, test = split(load_csv(data_csv), RunConfig().test_fraction,
                        [seed + SEED_OFFSETS["synth"], 1])
        expected = input_space_eval(load_inverse_model(forest_doc), test)
        [(_, _, metrics)] = read_metrics_csv(out)
        assert metrics.mse == pytest.approx(expected.mse, rel=1e-12)
        assert metrics.n == len(test)

    def test_functional_needs_teacher(self, invoke, forest_doc):
        result = invoke("evaluate", "--model", forest_doc)
        assert result.exit_code == 2
        assert "--teacher" in result.output

    def test_scaler_mismatch(self, invoke, forest_doc, data_csv):
        doc = json.loads(forest_doc.read_text())
        doc["scaler"]["feature_names"][8] = "Chromium"
        forest_doc.write_text(json.dumps(doc))
        result = invoke("evaluate", "--model", forest_doc, "--data", data_csv,
                        "--protocol", "input-space")
        assert result.exit_code == 2
        assert "Cr" in result.output

    def test_missing_column(self, tmp_path, invoke, forest_doc, data_csv):
        lines = data_csv.read_text().splitlines()
        bad = tmp_path / "bad.csv"
        bad.write_text("\n".join(line.replace("Cr,", "Chromium,") for line in lines) + "\n")
        result = invoke("evaluate", "--model", forest_doc, "--data", bad,
                        "--protocol", "input-space")
        assert result.exit_code == 2
        assert "column Cr" in result.output

    def test_teacher_student_flow(self, tmp_path, invoke, teacher_doc, data_csv):
        assert (tmp_path / "teacher.fit.json").exists()
        assert (tmp_path / "teacher_curve.csv").exists()
        pair = tmp_path / "pair.json"
        result = invoke("train-student", "--teacher", teacher_doc, "--out", pair, *FAST_STUDENT)
        assert result.exit_code == 0, result.output
        assert (tmp_path / "student_curve.csv").exists()

        result = invoke("evaluate", "--pair", pair, "--data", data_csv, "--protocol", "all",
                        "--set", "eval.fresh_targets=20")
        assert result.exit_code == 0, result.output
        assert (tmp_path / "pair_metrics.csv").exists()

        result = invoke("invert", "--pair", pair, "--hardness", 40)
        assert result.exit_code == 0, result.output
        assert "teacher(recipe)" in result.output

        result = invoke("report", "--runs", tmp_path, "--redact-timing")
        assert result.exit_code == 0, result.output
        assert (tmp_path / "report.csv").exists()
        assert (tmp_path / "curves.gp").exists()

    def test_td3(self, tmp_path, invoke, teacher_doc):
        out = tmp_path / "td3.json"
        result = invoke("train-td3", "--teacher", teacher_doc, "--out", out, "--steps", 60,
                        "--set", "td3.warmup_steps=20", "--set", "td3.batch_size=8",
                        "--set", "td3.actor_width=4", "--set", "td3.critic_width=4")
        assert result.exit_code == 0, result.output
        assert (tmp_path / "td3_reward.csv").exists()

    def test_report_without_metrics(self, tmp_path, invoke):
        result = invoke("report", "--runs", tmp_path)
        assert result.exit_code == 1


class TestPipeline:
    def run(self, invoke, tmp_path, name):
        config = tmp_path / "run.yaml"
        config.write_text(yaml.safe_dump(FAST_CONFIG))
        out = tmp_path / name
        result = invoke("pipeline", "--config", config, "--out", out, "--redact-timing")
        assert result.exit_code == 0, result.output
        return out

    def test_artifacts(self, tmp_path, invoke):
        out = self.run(invoke, tmp_path, "runs")
        run_dir = out / "seed_7"
        for name in ("run.yaml", "data.csv", "teacher.json", "pair.json", "rf.json", "mlp.json",
                     "td3.json", "metrics.csv", "td3_reward.csv", "pair.fit.json"):
            assert (run_dir / name).exists(), name
        for name in ("report.csv", "report.txt", "curves.gp"):
            assert (out / name).exists(), name

    def test_reruns_are_byte_identical(self, tmp_path, invoke):
        a = self.run(invoke, tmp_path, "a")
        b = self.run(invoke, tmp_path, "b")
        for name in ("seed_7/data.csv", "seed_7/teacher.json", "seed_7/pair.json",
                     "seed_7/rf.json", "seed_7/mlp.json", "seed_7/td3.json",
                     "seed_7/metrics.csv", "report.csv"):
            assert (a / name).read_bytes() == (b / name).read_bytes(), name
