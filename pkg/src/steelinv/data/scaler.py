"""Per-column min-max scaling to [0, 1].

A column whose min equals its max maps to the constant 0.5, and maps back to
its single observed value.
"""

from dataclasses import dataclass
from typing import Any, Optional, Union, overload

import numpy as np

from ..errors import ModelFormatError, ScalerError
from ..utils.digest import config_digest
from .dataset import Dataset
from .schema import FeatureSchema

DEGENERATE_VALUE = 0.5


@dataclass(eq=False)
class Scaler:
    """Feature and target min/max, fitted on a training split."""
    feature_names: tuple[str, ...] = ()
    target_name: str = ""
    feature_min: Optional[np.ndarray] = None
    feature_max: Optional[np.ndarray] = None
    target_min: Optional[float] = None
    target_max: Optional[float] = None

    def __post_init__(self):
        if self.feature_min is not None:
            self.feature_min = np.asarray(self.feature_min, dtype=np.float64)
            self.feature_max = np.asarray(self.feature_max, dtype=np.float64)
            if self.feature_min.shape != (len(self.feature_names),) or \
                    self.feature_max.shape != self.feature_min.shape:
                raise ScalerError("min/max arrays do not match the feature names")
            bad = np.flatnonzero(self.feature_max < self.feature_min)
            if bad.size:
                raise ScalerError("max below min", column=self.feature_names[bad[0]])
        if self.target_min is not None and self.target_max is not None:
            self.target_min = float(self.target_min)
            self.target_max = float(self.target_max)
            if self.target_max < self.target_min:
                raise ScalerError("max below min", column=self.target_name)

    @property
    def fitted(self) -> bool:
        return self.feature_min is not None and self.target_min is not None

    @property
    def n_features(self) -> int:
        return len(self.feature_names)

    def _require_fitted(self) -> None:
        if not self.fitted:
            raise ScalerError("scaler is not fitted")

    def check_schema(self, schema: FeatureSchema) -> None:
        """Raise ``ScalerError`` naming the first column that disagrees."""
        self._require_fitted()
        if len(schema.features) != self.n_features:
            missing = [n for n in self.feature_names if n not in schema.features]
            missing += [n for n in schema.features if n not in self.feature_names]
            raise ScalerError(
                f"scaler has {self.n_features} feature columns, data has {len(schema.features)}",
                column=missing[0] if missing else None,
            )
        for ours, theirs in zip(self.feature_names, schema.features):
            if ours.lower() != theirs.lower():
                raise ScalerError(f"column mismatch: scaler has {ours!r}, data has {theirs!r}",
                                  column=theirs)
        if self.target_name.lower() != schema.target.lower():
            raise ScalerError(
                f"target mismatch: scaler has {self.target_name!r}, data has {schema.target!r}",
                column=schema.target,
            )

    def _check_width(self, x: np.ndarray) -> None:
        if x.ndim != 2 or x.shape[1] != self.n_features:
            raise ScalerError(f"expected {self.n_features} feature columns, got shape {x.shape}")

    def transform_features(self, x) -> np.ndarray:
        self._require_fitted()
        x = np.asarray(x, dtype=np.float64)
        self._check_width(x)
        span = self.feature_max - self.feature_min
        degenerate = span == 0
        safe = np.where(degenerate, 1.0, span)
        return np.where(degenerate, DEGENERATE_VALUE, (x - self.feature_min) / safe)

    def inverse_features(self, x) -> np.ndarray:
        self._require_fitted()
        x = np.asarray(x, dtype=np.float64)
        self._check_width(x)
        span = self.feature_max - self.feature_min
        return np.where(span == 0, self.feature_min, x * span + self.feature_min)

    def transform_targets(self, y) -> np.ndarray:
        self._require_fitted()
        y = np.asarray(y, dtype=np.float64)
        span = self.target_max - self.target_min
        if span == 0:
            return np.full_like(y, DEGENERATE_VALUE)
        return (y - self.target_min) / span

    def inverse_targets(self, y) -> np.ndarray:
        self._require_fitted()
        y = np.asarray(y, dtype=np.float64)
        span = self.target_max - self.target_min
        if span == 0:
            return np.full_like(y, self.target_min)
        return y * span + self.target_min

    def to_dict(self) -> dict[str, Any]:
        self._require_fitted()
        return {
            "feature_names": list(self.feature_names),
            "target_name": self.target_name,
            "feature_min": self.feature_min.tolist(),
            "feature_max": self.feature_max.tolist(),
            "target_min": self.target_min,
            "target_max": self.target_max,
        }

    @classmethod
    def from_dict(cls, data: Any) -> "Scaler":
        try:
            return cls(
                feature_names=tuple(data["feature_names"]),
                target_name=data["target_name"],
                feature_min=np.array(data["feature_min"], dtype=np.float64),
                feature_max=np.array(data["feature_max"], dtype=np.float64),
                target_min=data["target_min"],
                target_max=data["target_max"],
            )
        except (KeyError, TypeError, ValueError) as e:
            raise ModelFormatError(f"malformed scaler: {e}") from e

    def digest(self) -> str:
        return config_digest(self.to_dict())


def fit_scaler(train: Dataset) -> Scaler:
    """Fit min/max per column on raw training data."""
    if train.normalized:
        raise ScalerError("fit the scaler on raw data, not normalized data")
    return Scaler(
        feature_names=train.schema.features,
        target_name=train.schema.target,
        feature_min=train.features.min(axis=0),
        feature_max=train.features.max(axis=0),
        target_min=float(train.targets.min()),
        target_max=float(train.targets.max()),
    )


@overload
def transform(data: Dataset, scaler: Scaler) -> Dataset: ...
@overload
def transform(data: np.ndarray, scaler: Scaler) -> np.ndarray: ...


def transform(data: Union[Dataset, np.ndarray], scaler: Scaler):
    """Normalize a raw Dataset, or a raw feature matrix."""
    if isinstance(data, Dataset):
        if data.normalized:
            raise ScalerError("dataset is already normalized")
        scaler.check_schema(data.schema)
        return Dataset(
            features=scaler.transform_features(data.features),
            targets=scaler.transform_targets(data.targets),
            schema=data.schema,
            normalized=True,
        )
    return scaler.transform_features(data)


@overload
def inverse_transform(data: Dataset, scaler: Scaler) -> Dataset: ...
@overload
def inverse_transform(data: np.ndarray, scaler: Scaler) -> np.ndarray: ...


def inverse_transform(data: Union[Dataset, np.ndarray], scaler: Scaler):
    """Map a normalized Dataset or feature matrix back to raw units."""
    if isinstance(data, Dataset):
        if not data.normalized:
            raise ScalerError("dataset is not normalized")
        scaler.check_schema(data.schema)
        return Dataset(
            features=scaler.inverse_features(data.features),
            targets=scaler.inverse_targets(data.targets),
            schema=data.schema,
            normalized=False,
        )
    return scaler.inverse_features(data)
