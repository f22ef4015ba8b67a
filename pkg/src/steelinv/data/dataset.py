"""Tabular dataset container, CSV ingestion and seeded splits."""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from ..errors import DimensionError, IngestionError
from ..utils.io import iter_data_lines, write_csv as _write_rows
from ..utils.logging import get_logger
from .schema import COMPOSITION_NAMES, STEEL_SCHEMA, TARGET_RANGE, FeatureSchema


@dataclass(eq=False)
class Dataset:
    """Features (N x n_features) and targets (N) under one schema."""
    features: np.ndarray
    targets: np.ndarray
    schema: FeatureSchema = field(default=STEEL_SCHEMA)
    normalized: bool = False

    def __post_init__(self):
        self.features = np.asarray(self.features, dtype=np.float64)
        self.targets = np.asarray(self.targets, dtype=np.float64).reshape(-1)
        if self.features.ndim != 2 or self.features.shape[1] != self.schema.n_features:
            raise DimensionError(
                f"features must be N x {self.schema.n_features}, got {self.features.shape}"
            )
        if self.features.shape[0] != self.targets.shape[0]:
            raise DimensionError("features and targets have different row counts")
        if len(self) < 1:
            raise IngestionError("empty dataset")
        if not (np.all(np.isfinite(self.features)) and np.all(np.isfinite(self.targets))):
            raise IngestionError("dataset contains non-finite values")
        if not self.normalized:
            self._check_raw_ranges()

    def _check_raw_ranges(self) -> None:
        for j, name in enumerate(self.schema.features):
            column = self.features[:, j]
            if name in COMPOSITION_NAMES:
                bad = np.flatnonzero(column < 0)
            elif name == "tempering_time_s":
                bad = np.flatnonzero(column <= 0)
            else:
                continue
            if bad.size:
                raise IngestionError(f"value {float(column[bad[0]]):g} out of range",
                                     row=int(bad[0]) + 1, column=name)
        low, high = TARGET_RANGE
        bad = np.flatnonzero((self.targets < low) | (self.targets > high))
        if bad.size:
            raise IngestionError(
                f"value {float(self.targets[bad[0]]):g} outside [{low:g}, {high:g}]",
                row=int(bad[0]) + 1, column=self.schema.target,
            )

    def __len__(self) -> int:
        return int(self.targets.shape[0])

    @property
    def target_matrix(self) -> np.ndarray:
        """Targets as an (N x 1) matrix."""
        return self.targets.reshape(-1, 1)

    def subset(self, indices) -> "Dataset":
        indices = np.asarray(indices, dtype=np.intp)
        return Dataset(
            features=self.features[indices],
            targets=self.targets[indices],
            schema=self.schema,
            normalized=self.normalized,
        )


def load_csv(path: Union[str, Path], schema: FeatureSchema = STEEL_SCHEMA) -> Dataset:
    """Read a raw dataset; header names match case-insensitively, any order."""
    logger = get_logger()
    path = Path(path)
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(iter_data_lines(f))
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise IngestionError(f"{path}: missing header row") from None

        lookup = {name.lower(): i for i, name in enumerate(header)}
        positions = []
        for name in schema.columns:
            if name.lower() not in lookup:
                raise IngestionError("missing column", column=name)
            positions.append(lookup[name.lower()])
        extra = [h for h in header if h.lower() not in {c.lower() for c in schema.columns}]
        if extra:
            logger.warning(f"{path.name}: ignoring extra columns {extra}")

        rows = []
        for row_number, cells in enumerate(reader, start=1):
            if not cells or all(not c.strip() for c in cells):
                continue
            if len(cells) != len(header):
                raise IngestionError(
                    f"expected {len(header)} cells, found {len(cells)}", row=row_number
                )
            values = []
            for name, pos in zip(schema.columns, positions):
                cell = cells[pos].strip()
                try:
                    value = float(cell)
                except ValueError:
                    raise IngestionError(f"non-numeric value {cell!r}", row=row_number,
                                         column=name) from None
                if not math.isfinite(value):
                    raise IngestionError(f"non-finite value {cell!r}", row=row_number,
                                         column=name)
                values.append(value)
            rows.append(values)

    if not rows:
        raise IngestionError("empty dataset")

    table = np.array(rows, dtype=np.float64)
    dataset = Dataset(features=table[:, :-1], targets=table[:, -1], schema=schema)
    logger.info(f"Loaded {len(dataset)} rows from {path}")
    return dataset


def write_csv(dataset: Dataset, path: Union[str, Path],
              config_digest: Optional[str] = None) -> Path:
    """Write a dataset in the ingestion layout (header + one sample per row)."""
    rows = (
        [float(v) for v in features] + [float(target)]
        for features, target in zip(dataset.features, dataset.targets)
    )
    return _write_rows(path, dataset.schema.columns, rows, config_digest)


def split(dataset: Dataset, test_fraction: float,
          seed: Union[int, Sequence[int]]) -> tuple[Dataset, Dataset]:
    """Seeded shuffle, then partition into (train, test)."""
    if not 0.0 < test_fraction < 1.0:
        raise ValueError(f"test_fraction must lie in (0, 1), got {test_fraction}")
    n = len(dataset)
    if n < 2:
        raise ValueError("need at least 2 rows to split")
    n_test = min(n - 1, max(1, int(math.floor(n * test_fraction + 0.5))))
    order = np.random.default_rng(seed).permutation(n)
    return dataset.subset(order[n_test:]), dataset.subset(order[:n_test])
