"""Full-budget runs on the default benchmark (5,000 rows, seed 42).

Deselected by default; run with ``pytest -m slow``.
"""

from dataclasses import replace

import pytest

from steelinv.baselines import DirectInverseModel
from steelinv.config import RunConfig
from steelinv.data.sampling import fresh_targets
from steelinv.data.synth import conditional_variance_floor, synth_generate
from steelinv.eval import Split, forward_eval, functional_eval, input_space_eval
from steelinv.pipeline import FRESH_TARGET_OFFSET, make_splits
from steelinv.rl.td3 import Td3Model
from steelinv.training.student import StudentModel
from steelinv.training.teacher import train_teacher

pytestmark = pytest.mark.slow


@pytest.fixture(scope="module")
def benchmark():
    cfg = RunConfig()
    splits = make_splits(synth_generate(cfg.synth), cfg)
    teacher, _ = train_teacher(splits.train, splits.val, cfg.teacher)
    targets = fresh_targets(splits.scaler, cfg.eval.fresh_targets,
                            cfg.seed + FRESH_TARGET_OFFSET)
    return cfg, splits, teacher, targets


@pytest.fixture(scope="module")
def student(benchmark):
    cfg, splits, teacher, _ = benchmark
    model = StudentModel(teacher, splits.scaler, cfg.student)
    model.run(splits.train, splits.val).raise_for_status()
    return model


@pytest.fixture(scope="module")
def td3(benchmark):
    cfg, splits, teacher, _ = benchmark
    model = Td3Model(teacher, splits.scaler, replace(cfg.td3, kernel="blas"))
    model.run(splits.train, splits.val).raise_for_status()
    return model


def test_teacher_quality(benchmark):
    cfg, splits, teacher, _ = benchmark
    assert cfg.teacher.epochs == 500
    metrics = forward_eval(teacher, splits.scaler, splits.test)
    assert metrics.r2 >= 0.97
    assert metrics.mse <= 1.0


def test_student_functional_consistency(benchmark, student):
    cfg, splits, teacher, targets = benchmark
    assert cfg.student.epochs * cfg.student.steps_per_epoch == 15_000
    metrics = functional_eval(student, teacher, targets, splits.scaler)
    assert metrics.n == 1000
    assert metrics.r2 >= 0.95
    assert metrics.mse <= 1.5


def test_functional_beats_input_space(benchmark, student):
    _, splits, teacher, _ = benchmark
    functional = functional_eval(student, teacher, splits.scaler.inverse_targets(
        splits.test.targets), splits.scaler, Split.TEST)
    assert functional.r2 > input_space_eval(student, splits.test).r2


def test_direct_inverse_stalls_at_floor(benchmark):
    cfg, splits, _, _ = benchmark
    model = DirectInverseModel(splits.scaler, cfg.direct)
    model.run(splits.train, splits.val).raise_for_status()

    floor = conditional_variance_floor(cfg.synth)
    assert input_space_eval(model, splits.test).mse >= 0.9 * floor
    curve = model.curve
    assert len(curve) == 1000
    at_100 = curve.train_loss[99]
    assert abs(curve.window_mean(-100) - at_100) <= 0.1 * at_100


def test_student_beats_td3(benchmark, student, td3):
    _, splits, teacher, targets = benchmark
    assert td3.cfg.total_steps == 40_000
    student_mse = functional_eval(student, teacher, targets, splits.scaler).mse
    assert student_mse < functional_eval(td3, teacher, targets, splits.scaler).mse
    assert student.fit_result.wall_time_s < td3.fit_result.wall_time_s
