"""Per-epoch loss records."""

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np

from ..errors import ModelFormatError, NonFiniteError
from ..utils.io import read_csv, write_csv

CURVE_HEADER = ("epoch", "train_loss", "val_loss")


@dataclass
class LossCurve:
    """(epoch, train_loss, val_loss) rows in normalized units."""
    epochs: list[int] = field(default_factory=list)
    train_loss: list[float] = field(default_factory=list)
    val_loss: list[float] = field(default_factory=list)

    def append(self, epoch: int, train_loss: float, val_loss: float) -> None:
        if not (math.isfinite(train_loss) and math.isfinite(val_loss)):
            raise NonFiniteError(f"non-finite loss at epoch {epoch}")
        self.epochs.append(int(epoch))
        self.train_loss.append(float(train_loss))
        self.val_loss.append(float(val_loss))

    def __len__(self) -> int:
        return len(self.epochs)

    @property
    def final_train(self) -> Optional[float]:
        return self.train_loss[-1] if self.train_loss else None

    @property
    def final_val(self) -> Optional[float]:
        return self.val_loss[-1] if self.val_loss else None

    def window_mean(self, start: int, stop: Optional[int] = None, which: str = "train") -> float:
        values = self.train_loss if which == "train" else self.val_loss
        return float(np.mean(values[start:stop]))

    def rows(self) -> list[tuple[int, float, float]]:
        return list(zip(self.epochs, self.train_loss, self.val_loss))

    def to_dict(self) -> dict[str, Any]:
        return {"epochs": self.epochs, "train_loss": self.train_loss, "val_loss": self.val_loss}

    @classmethod
    def from_dict(cls, data: Any) -> "LossCurve":
        try:
            curve = cls()
            for epoch, train, val in zip(data["epochs"], data["train_loss"], data["val_loss"]):
                curve.append(epoch, train, val)
            return curve
        except (KeyError, TypeError, NonFiniteError) as e:
            raise ModelFormatError(f"malformed loss curve: {e}") from e

    def write_csv(self, path: Union[str, Path], config_digest: Optional[str] = None) -> Path:
        return write_csv(path, CURVE_HEADER, self.rows(), config_digest)

    @classmethod
    def read_csv(cls, path: Union[str, Path]) -> "LossCurve":
        header, rows = read_csv(path)
        if tuple(header) != CURVE_HEADER:
            raise ModelFormatError(f"{path}: expected header {','.join(CURVE_HEADER)}")
        curve = cls()
        for epoch, train, val in rows:
            curve.append(int(epoch), float(train), float(val))
        return curve
