"""Base inverse-model class, training config and fit results."""

import math
import time
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from datetime import datetime
from enum import Enum
from pathlib import Path
from typing import Any, Callable, ClassVar, Optional, Union

import numpy as np

from ..data.dataset import Dataset
from ..data.scaler import Scaler
from ..errors import NonFiniteError, NonFiniteLossError, NotFittedError
from ..nncore.mlp import GradientTape
from ..utils.io import read_json, write_json
from ..utils.logging import get_logger
from .curves import LossCurve


@dataclass
class TrainConfig:
    """Budget and optimizer settings for one network training phase.

    ``steps_per_epoch`` only applies to the Student, whose batches are
    sampled targets rather than passes over a dataset.
    """
    epochs: int = 500
    batch_size: int = 64
    lr: float = 1e-3
    seed: int = 0
    eval_every: int = 1
    hidden_width: int = 64
    steps_per_epoch: int = 30

    def __post_init__(self):
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        for name in ("batch_size", "eval_every", "hidden_width", "steps_per_epoch"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.lr <= 0:
            raise ValueError("lr must be positive")


class FitStatus(Enum):
    """Status of a fit."""
    PENDING = "pending"
    TRAINING = "training"
    COMPLETED = "completed"
    FAILED = "failed"


@dataclass
class FitResult:
    """Result of a timed fit."""
    model_name: str
    status: FitStatus
    seed: int = 0
    wall_time_s: float = 0.0
    started_at: Optional[datetime] = None
    finished_at: Optional[datetime] = None
    error_message: Optional[str] = None
    error: Optional[BaseException] = field(default=None, repr=False)

    def to_dict(self) -> dict[str, Any]:
        return {
            "model_name": self.model_name,
            "status": self.status.value,
            "seed": self.seed,
            "wall_time_s": self.wall_time_s,
            "error_message": self.error_message,
        }

    def raise_for_status(self) -> None:
        """Re-raise the error of a failed fit."""
        if self.status is FitStatus.FAILED:
            if self.error is not None:
                raise self.error
            raise RuntimeError(f"{self.model_name}: {self.error_message}")

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "FitResult":
        return cls(
            model_name=data["model_name"],
            status=FitStatus(data["status"]),
            seed=int(data.get("seed", 0)),
            wall_time_s=float(data.get("wall_time_s", 0.0)),
            error_message=data.get("error_message"),
        )


def check_step(phase: str, step: int, loss: float, *tapes: GradientTape) -> None:
    """Abort on a non-finite loss or gradient, naming the first bad layer."""
    if not math.isfinite(loss):
        raise NonFiniteLossError(phase, step, "output", loss)
    for tape in tapes:
        layer = tape.first_non_finite()
        if layer is not None:
            raise NonFiniteLossError(phase, step, layer, float("nan"))


def guard_forward(phase: str, step: int, fn: Callable[[], Any]) -> Any:
    """Run a forward computation, reporting non-finite activations as a loss abort."""
    try:
        return fn()
    except NonFiniteError as e:
        raise NonFiniteLossError(phase, step, "input", float("nan")) from e


def timed_call(model_name: str, seed: int, fn: Callable[[], Any]) -> tuple[Any, FitResult]:
    """Run ``fn`` under a monotonic clock; failures are recorded, not raised.

    Returns ``fn``'s value (None on failure) and the fit record.
    """
    logger = get_logger()
    result = FitResult(
        model_name=model_name,
        status=FitStatus.TRAINING,
        seed=seed,
        started_at=datetime.now(),
    )
    logger.info(f"{model_name}: starting fit (seed {seed})")

    value = None
    start = time.perf_counter()
    try:
        value = fn()
        result.status = FitStatus.COMPLETED
    except Exception as e:
        result.status = FitStatus.FAILED
        result.error_message = str(e)
        result.error = e
        logger.error(f"{model_name}: fit failed - {e}")
    result.wall_time_s = time.perf_counter() - start
    result.finished_at = datetime.now()

    if result.status is FitStatus.COMPLETED:
        logger.info(f"{model_name}: fit completed in {result.wall_time_s:.1f} s")
    return value, result


def fit_sidecar_path(model_path: Union[str, Path]) -> Path:
    """Where a model artifact's fit record lives (timings are kept out of model files)."""
    path = Path(model_path)
    return path.with_name(f"{path.stem}.fit.json")


class BaseInverseModel(ABC):
    """Base class for models that map target hardness to process features.

    Models work in normalized units: ``predict`` takes an (n x 1) matrix of
    targets in [0, 1] and returns (n x n_features) normalized features.
    """

    kind: ClassVar[str] = ""

    def __init__(self, scaler: Scaler, seed: int = 0):
        self.logger = get_logger()
        self.scaler = scaler
        self.seed = seed
        self.curve: Optional[LossCurve] = None
        self.fit_result: Optional[FitResult] = None
        self._progress_callback: Optional[Callable[[str, float], None]] = None

    @property
    @abstractmethod
    def name(self) -> str:
        """Short identifier used in reports and file names."""
        pass

    @property
    @abstractmethod
    def display_name(self) -> str:
        """Human-readable model name."""
        pass

    @property
    @abstractmethod
    def fitted(self) -> bool:
        pass

    @abstractmethod
    def fit(self, train: Dataset, val: Dataset) -> None:
        """Train on normalized data; sets ``self.curve`` where applicable."""
        pass

    @abstractmethod
    def predict_normalized(self, targets: np.ndarray) -> np.ndarray:
        pass

    @abstractmethod
    def to_dict(self) -> dict[str, Any]:
        """Model document without timings."""
        pass

    @classmethod
    @abstractmethod
    def from_dict(cls, data: dict[str, Any]) -> "BaseInverseModel":
        pass

    def predict(self, targets) -> np.ndarray:
        if not self.fitted:
            raise NotFittedError(f"{self.display_name} must be fitted before predicting")
        targets = np.asarray(targets, dtype=np.float64).reshape(-1, 1)
        return self.predict_normalized(targets)

    def predict_raw(self, hardness) -> np.ndarray:
        """Raw-unit feature recipes for raw-unit target hardness values."""
        normalized = self.scaler.transform_targets(np.asarray(hardness, dtype=np.float64))
        return self.scaler.inverse_features(self.predict(normalized))

    def set_progress_callback(self, callback: Callable[[str, float], None]) -> None:
        """Set a callback for progress updates."""
        self._progress_callback = callback

    def report_progress(self, message: str, fraction: float) -> None:
        """Report progress to the callback."""
        if self._progress_callback:
            self._progress_callback(message, fraction)

    def run(self, train: Optional[Dataset], val: Optional[Dataset]) -> FitResult:
        """Fit with wall-clock timing around the training call only."""
        _, result = timed_call(self.name, self.seed, lambda: self.fit(train, val))
        self.fit_result = result
        return result

    def save(self, path: Union[str, Path], config_digest: Optional[str] = None) -> Path:
        """Write the model document and, if fitted through ``run``, its fit record."""
        data = self.to_dict()
        data["config_digest"] = config_digest
        path = write_json(path, data)
        if self.fit_result is not None:
            save_fit_record(path, self.fit_result, config_digest)
        return path


def save_fit_record(model_path: Union[str, Path], result: FitResult,
                    config_digest: Optional[str] = None) -> Path:
    record = result.to_dict()
    record["config_digest"] = config_digest
    return write_json(fit_sidecar_path(model_path), record)


def load_fit_record(model_path: Union[str, Path]) -> Optional[FitResult]:
    sidecar = fit_sidecar_path(model_path)
    if not sidecar.exists():
        return None
    return FitResult.from_dict(read_json(sidecar))
