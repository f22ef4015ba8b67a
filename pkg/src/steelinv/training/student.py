"""Student training against the frozen Teacher.

Each step samples target hardness values ``y``, predicts features
``x = student(y)``, scores them with ``teacher(x)`` and backpropagates
``mse(teacher(x), y)`` through the Teacher's input gradient into the Student.
Only the Student and its optimizer state change.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

import numpy as np

from ..data.dataset import Dataset
from ..data.sampling import sample_targets, target_grid
from ..data.scaler import Scaler
from ..errors import ContractError, FrozenTeacherError, ModelFormatError
from ..nncore.mlp import Mlp, OutputMode, backward, forward, init_mlp, mse
from ..nncore.optim import AdamState, adam_step
from ..nncore.serialize import mlp_from_dict, mlp_to_dict
from ..utils.logging import get_logger
from .base import BaseInverseModel, TrainConfig, check_step, guard_forward
from .curves import LossCurve
from .supervised import ProgressCallback

VALIDATION_GRID_SIZE = 256


def _verify_frozen(teacher: Mlp, expected: str, where: str) -> None:
    if teacher.digest() != expected:
        get_logger().error(f"teacher parameters changed {where}")
        raise FrozenTeacherError(f"teacher parameters changed {where}")


def functional_loss(student: Mlp, teacher: Mlp, targets: np.ndarray) -> float:
    """mse(teacher(student(y)), y) without gradients."""
    return mse(forward(teacher, forward(student, targets)[0])[0], targets)[0]


def train_student(
    teacher: Mlp,
    scaler: Scaler,
    cfg: TrainConfig,
    progress: Optional[ProgressCallback] = None,
    student: Optional[Mlp] = None,
) -> tuple[Mlp, LossCurve]:
    """Train a (1 -> teacher inputs) sigmoid-head Student for ``epochs * steps_per_epoch`` steps."""
    logger = get_logger()
    if teacher.out_width != 1:
        raise ContractError("teacher must have a single output")
    digest = teacher.freeze()

    if student is None:
        student = init_mlp(1, cfg.hidden_width, teacher.in_width, cfg.seed, OutputMode.SIGMOID)
    elif student.in_width != 1 or student.out_width != teacher.in_width:
        raise ContractError("student widths do not match the teacher")

    state = AdamState.for_net(student, lr=cfg.lr)
    stream = np.random.default_rng([cfg.seed, 2])
    grid = target_grid(VALIDATION_GRID_SIZE)
    curve = LossCurve()
    step = 0

    logger.info(f"student: {cfg.epochs} epochs x {cfg.steps_per_epoch} steps, "
                f"batch {cfg.batch_size}")
    for epoch in range(1, cfg.epochs + 1):
        total = 0.0
        for _ in range(cfg.steps_per_epoch):
            y = sample_targets(scaler, cfg.batch_size, stream)
            x_hat, student_cache = forward(student, y)
            y_hat, teacher_cache = guard_forward("student", step,
                                                 lambda: forward(teacher, x_hat))
            loss, grad = mse(y_hat, y)
            teacher_tape = backward(teacher, teacher_cache, grad)
            student_tape = backward(student, student_cache, teacher_tape.input_grad)
            check_step("student", step, loss, teacher_tape, student_tape)
            adam_step(student, student_tape, state)
            total += loss
            step += 1

        _verify_frozen(teacher, digest, f"during student epoch {epoch}")
        if epoch % cfg.eval_every == 0 or epoch == cfg.epochs:
            val_loss = functional_loss(student, teacher, grid)
            check_step("student", step, val_loss)
            curve.append(epoch, total / cfg.steps_per_epoch, val_loss)
            logger.debug(f"student: epoch {epoch} train {total / cfg.steps_per_epoch:.6g} "
                         f"val {val_loss:.6g}")
        if progress:
            progress(f"student epoch {epoch}/{cfg.epochs}", epoch / cfg.epochs)

    _verify_frozen(teacher, digest, "after student training")
    if len(curve):
        logger.info(f"student: final train {curve.final_train:.6g}, val {curve.final_val:.6g}")
    return student, curve


@dataclass(eq=False)
class TrainedPair:
    """Frozen Teacher plus trained Student with their scaler and curves."""
    teacher: Mlp
    student: Mlp
    scaler: Scaler
    teacher_curve: LossCurve
    student_curve: LossCurve
    teacher_param_digest: str
    config: dict[str, Any] = field(default_factory=dict)

    def verify_frozen(self) -> None:
        _verify_frozen(self.teacher, self.teacher_param_digest, "since the teacher was frozen")

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": StudentModel.kind,
            "teacher": mlp_to_dict(self.teacher),
            "student": mlp_to_dict(self.student),
            "scaler": self.scaler.to_dict(),
            "teacher_curve": self.teacher_curve.to_dict(),
            "student_curve": self.student_curve.to_dict(),
            "teacher_param_digest": self.teacher_param_digest,
            "student_param_digest": self.student.digest(),
            "config": self.config,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "TrainedPair":
        if data.get("kind") != StudentModel.kind:
            raise ModelFormatError("not a teacher-student pair document")
        pair = cls(
            teacher=mlp_from_dict(data.get("teacher")),
            student=mlp_from_dict(data.get("student")),
            scaler=Scaler.from_dict(data.get("scaler")),
            teacher_curve=LossCurve.from_dict(data.get("teacher_curve", {})),
            student_curve=LossCurve.from_dict(data.get("student_curve", {})),
            teacher_param_digest=str(data.get("teacher_param_digest")),
            config=data.get("config") or {},
        )
        try:
            pair.verify_frozen()
        except FrozenTeacherError as e:
            raise ModelFormatError(f"teacher digest mismatch: {e}") from e
        pair.teacher.freeze()
        return pair


class StudentModel(BaseInverseModel):
    """Inverse model trained through the frozen Teacher."""

    kind = "student"

    def __init__(self, teacher: Mlp, scaler: Scaler, cfg: Optional[TrainConfig] = None,
                 teacher_curve: Optional[LossCurve] = None):
        cfg = cfg or TrainConfig()
        super().__init__(scaler, seed=cfg.seed)
        self.cfg = cfg
        self.teacher = teacher
        self.teacher_curve = teacher_curve or LossCurve()
        self.teacher_param_digest = teacher.freeze()
        self.student: Optional[Mlp] = None
        self.config: dict[str, Any] = {}

    @property
    def name(self) -> str:
        return "teacher_student"

    @property
    def display_name(self) -> str:
        return "Teacher-Student"

    @property
    def fitted(self) -> bool:
        return self.student is not None

    def fit(self, train: Dataset, val: Dataset) -> None:
        # Targets are sampled, so the datasets are not consumed.
        self.student, self.curve = train_student(
            self.teacher, self.scaler, self.cfg, progress=self.report_progress
        )

    def predict_normalized(self, targets: np.ndarray) -> np.ndarray:
        return forward(self.student, targets)[0]

    @property
    def pair(self) -> TrainedPair:
        if self.student is None:
            raise ContractError("student is not trained")
        return TrainedPair(
            teacher=self.teacher,
            student=self.student,
            scaler=self.scaler,
            teacher_curve=self.teacher_curve,
            student_curve=self.curve or LossCurve(),
            teacher_param_digest=self.teacher_param_digest,
            config=self.config,
        )

    def to_dict(self) -> dict[str, Any]:
        return self.pair.to_dict()

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "StudentModel":
        pair = TrainedPair.from_dict(data)
        model = cls(pair.teacher, pair.scaler, teacher_curve=pair.teacher_curve)
        model.student = pair.student
        model.curve = pair.student_curve
        model.config = pair.config
        return model
