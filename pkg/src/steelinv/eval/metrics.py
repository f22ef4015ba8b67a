"""Regression metrics in raw units."""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from ..errors import DimensionError, UndefinedVarianceError
from ..utils.logging import get_logger


class Protocol(Enum):
    """What a metric compares."""
    FUNCTIONAL = "functional"
    INPUT_SPACE = "input_space"
    FORWARD = "forward"


class Split(Enum):
    TRAIN = "train"
    TEST = "test"
    FRESH = "fresh"


@dataclass(frozen=True)
class MetricSet:
    """MSE, MAE and R^2 over ``n`` samples.

    ``r2`` is None when every reference column is constant.
    """
    mse: float
    mae: float
    r2: Optional[float]
    n: int
    protocol: Protocol
    split: Split

    def __post_init__(self):
        if not (self.mse >= 0 and self.mae >= 0):
            raise ValueError("mse and mae must be non-negative")
        if self.r2 is not None and self.r2 > 1.0:
            raise ValueError("r2 cannot exceed 1")
        if self.n < 1:
            raise ValueError("n must be positive")


def r2(pred, truth) -> float:
    """Coefficient of determination ``1 - SS_res / SS_tot``."""
    pred = np.asarray(pred, dtype=np.float64).reshape(-1)
    truth = np.asarray(truth, dtype=np.float64).reshape(-1)
    if pred.shape != truth.shape:
        raise DimensionError(f"prediction {pred.shape} and truth {truth.shape} differ")
    if truth.size < 2:
        raise ValueError("r2 needs at least two samples")
    if np.all(truth == truth[0]):
        raise UndefinedVarianceError("truth values are constant")
    residual = truth - pred
    centered = truth - truth.mean()
    return 1.0 - float(np.sum(residual * residual)) / float(np.sum(centered * centered))


def compute_metrics(pred, truth, protocol: Protocol, split: Split) -> MetricSet:
    """Metrics of (n x k) predictions; R^2 is averaged over non-constant columns."""
    pred = np.asarray(pred, dtype=np.float64)
    truth = np.asarray(truth, dtype=np.float64)
    if pred.ndim == 1:
        pred = pred.reshape(-1, 1)
    if truth.ndim == 1:
        truth = truth.reshape(-1, 1)
    if pred.shape != truth.shape:
        raise DimensionError(f"prediction {pred.shape} and truth {truth.shape} differ")
    if pred.shape[0] < 1:
        raise ValueError("no samples to evaluate")

    error = pred - truth
    mse = float(np.mean(error * error))
    mae = float(np.mean(np.abs(error)))

    scores = []
    for j in range(truth.shape[1]):
        try:
            scores.append(r2(pred[:, j], truth[:, j]))
        except (UndefinedVarianceError, ValueError):
            continue
    score: Optional[float] = float(np.mean(scores)) if scores else None
    if score is None:
        get_logger().warning(f"{protocol.value}/{split.value}: r2 undefined (constant truth)")
    elif not math.isfinite(score):
        score = None
    return MetricSet(mse=mse, mae=mae, r2=score, n=pred.shape[0], protocol=protocol, split=split)
