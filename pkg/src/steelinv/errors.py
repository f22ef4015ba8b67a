"""Exception types raised across steelinv."""

from typing import Optional


class SteelInvError(Exception):
    """Base class for all steelinv errors."""


class DimensionError(SteelInvError, ValueError):
    """Matrix shapes do not line up."""


class NonFiniteError(SteelInvError, ValueError):
    """A matrix contains NaN or Inf."""


class ContractError(SteelInvError):
    """A pre-condition of an operation was violated."""


class NonFiniteLossError(SteelInvError, FloatingPointError):
    """Training produced a non-finite loss or gradient."""

    def __init__(self, phase: str, step: int, layer: str, value: float):
        self.phase = phase
        self.step = step
        self.layer = layer
        self.value = value
        super().__init__(
            f"{phase}: non-finite value {value!r} at step {step} (layer {layer})"
        )


class FrozenTeacherError(SteelInvError):
    """The frozen teacher's parameters changed during a training loop."""


class IngestionError(SteelInvError):
    """A dataset file could not be ingested."""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.row = row
        self.column = column
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(f"{message}{suffix}")


class ScalerError(SteelInvError):
    """A scaler is unfitted or does not match the data it is applied to."""

    def __init__(self, message: str, column: Optional[str] = None):
        self.column = column
        if column is not None and column not in message:
            message = f"{message} (column {column})"
        super().__init__(message)


class NotFittedError(SteelInvError):
    """A model was used for prediction before it was fitted."""


class UndefinedVarianceError(SteelInvError, ValueError):
    """The reference values have zero variance."""


class ModelFormatError(SteelInvError):
    """A persisted model document is malformed."""


class ConfigError(SteelInvError):
    """A run configuration is invalid."""

    def __init__(self, message: str, key: Optional[str] = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)
