"""Teacher and Student training."""

from .base import (
    BaseInverseModel,
    FitResult,
    FitStatus,
    TrainConfig,
    load_fit_record,
    save_fit_record,
    timed_call,
)
from .curves import LossCurve
from .registry import load_inverse_model, model_kinds
from .student import StudentModel, TrainedPair, functional_loss, train_student
from .supervised import fit_supervised
from .teacher import load_teacher, save_teacher, train_teacher

__all__ = [
    "BaseInverseModel",
    "FitResult",
    "FitStatus",
    "LossCurve",
    "StudentModel",
    "TrainConfig",
    "TrainedPair",
    "fit_supervised",
    "functional_loss",
    "load_fit_record",
    "load_inverse_model",
    "load_teacher",
    "model_kinds",
    "save_fit_record",
    "save_teacher",
    "timed_call",
    "train_student",
    "train_teacher",
]
