"""Synthetic tempered-steel data that is many-to-one by construction.

Hardness depends on tempering temperature ``T`` (deg C) and time ``t`` (s)
only through the tempering parameter

    P = (T + 273.15) * (20 + log10 t) / 1000

so any two (T, t) pairs with equal P and equal composition get the same
hardness:

    HRC = clip(65 - 28 * (P - P_MIN) / (P_MAX - P_MIN)
               + sum_i c_i * (x_i - mid_i) + noise, 20, 65)

``P_MIN``/``P_MAX`` are the parameter at the corners of the sampling box and
``mid_i`` is the midpoint of element ``i``'s range, so the map is fixed and
does not depend on the sample.
"""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .dataset import Dataset
from .scaler import Scaler
from .schema import COMPOSITION_NAMES, STEEL_SCHEMA

TEMPERATURE_RANGE_C = (200.0, 700.0)
LOG10_TIME_RANGE = (3.0, 5.0)
HARDNESS_CLIP = (20.0, 65.0)
HARDNESS_BASE = 65.0
HARDNESS_DROP = 28.0

# Weight-percent sampling ranges per element.
DEFAULT_COMPOSITION_RANGES: dict[str, tuple[float, float]] = {
    "C": (0.10, 0.60),
    "Mn": (0.30, 1.50),
    "P": (0.005, 0.040),
    "S": (0.005, 0.040),
    "Si": (0.10, 0.50),
    "Ni": (0.00, 2.00),
    "Cr": (0.00, 1.50),
    "Mo": (0.00, 0.50),
    "V": (0.00, 0.20),
    "Al": (0.00, 0.05),
    "Cu": (0.00, 0.50),
}

# HRC per weight-percent deviation from the range midpoint.
COMPOSITION_COEFFICIENTS: dict[str, float] = {
    "C": 20.0,
    "Mn": 2.0,
    "P": 15.0,
    "S": -10.0,
    "Si": 1.5,
    "Ni": 0.8,
    "Cr": 1.8,
    "Mo": 4.0,
    "V": 6.0,
    "Al": -2.0,
    "Cu": 0.5,
}


def tempering_parameter(temperature_c, time_s):
    """Hollomon-Jaffe style parameter (C = 20), in thousands."""
    return (np.asarray(temperature_c) + 273.15) * (20.0 + np.log10(time_s)) / 1000.0


def iso_parameter_time(parameter, temperature_c):
    """Tempering time that gives ``parameter`` at ``temperature_c``."""
    return 10.0 ** (1000.0 * np.asarray(parameter) / (np.asarray(temperature_c) + 273.15) - 20.0)


P_MIN = float(tempering_parameter(TEMPERATURE_RANGE_C[0], 10.0 ** LOG10_TIME_RANGE[0]))
P_MAX = float(tempering_parameter(TEMPERATURE_RANGE_C[1], 10.0 ** LOG10_TIME_RANGE[1]))


@dataclass
class SynthConfig:
    """Synthetic generator settings."""
    n_samples: int = 5000
    seed: int = 42
    noise_std: float = 0.5
    composition_ranges: dict[str, tuple[float, float]] = field(
        default_factory=lambda: dict(DEFAULT_COMPOSITION_RANGES)
    )

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be at least 1")
        if self.noise_std < 0:
            raise ValueError("noise_std must be non-negative")
        missing = [name for name in COMPOSITION_NAMES if name not in self.composition_ranges]
        if missing:
            raise ValueError(f"composition_ranges lacks {missing}")
        for name, (low, high) in self.composition_ranges.items():
            if low < 0 or high < low:
                raise ValueError(f"bad range for {name}: ({low}, {high})")

    def _bounds(self) -> tuple[np.ndarray, np.ndarray]:
        low = np.array([self.composition_ranges[n][0] for n in COMPOSITION_NAMES])
        high = np.array([self.composition_ranges[n][1] for n in COMPOSITION_NAMES])
        return low, high


def hardness_from_parameter(parameter, composition: np.ndarray, cfg: SynthConfig,
                            noise=0.0) -> np.ndarray:
    """Noise-free map (plus optional noise) from (P, composition) to HRC."""
    low, high = cfg._bounds()
    coefficients = np.array([COMPOSITION_COEFFICIENTS[n] for n in COMPOSITION_NAMES])
    shift = (np.atleast_2d(composition) - (low + high) / 2.0) @ coefficients
    base = HARDNESS_BASE - HARDNESS_DROP * (np.asarray(parameter) - P_MIN) / (P_MAX - P_MIN)
    return np.clip(base + shift + noise, *HARDNESS_CLIP)


def _draw_composition(rng: np.random.Generator, cfg: SynthConfig, n: int) -> np.ndarray:
    low, high = cfg._bounds()
    return rng.uniform(low, high, size=(n, len(COMPOSITION_NAMES)))


def synth_generate(cfg: SynthConfig) -> Dataset:
    """Draw ``cfg.n_samples`` rows; bit-identical per seed."""
    rng = np.random.default_rng(cfg.seed)
    n = cfg.n_samples
    temperature = rng.uniform(*TEMPERATURE_RANGE_C, size=n)
    time_s = 10.0 ** rng.uniform(*LOG10_TIME_RANGE, size=n)
    composition = _draw_composition(rng, cfg, n)
    noise = rng.standard_normal(n) * cfg.noise_std

    parameter = tempering_parameter(temperature, time_s)
    hardness = hardness_from_parameter(parameter, composition, cfg, noise)
    features = np.column_stack([time_s, temperature, composition])
    return Dataset(features=features, targets=hardness, schema=STEEL_SCHEMA)


def synth_witness(cfg: SynthConfig, n_groups: int = 50,
                  group_size: int = 4) -> tuple[Dataset, np.ndarray]:
    """Groups of noiseless rows sharing (P, composition) with distinct (T, t).

    Returns the dataset and the group id of each row.
    """
    if group_size < 2:
        raise ValueError("group_size must be at least 2")
    rng = np.random.default_rng(cfg.seed)
    features, targets, groups = [], [], []
    t_low, t_high = TEMPERATURE_RANGE_C
    for g in range(n_groups):
        anchor_t = rng.uniform(t_low, t_high)
        anchor_time = 10.0 ** rng.uniform(*LOG10_TIME_RANGE)
        parameter = float(tempering_parameter(anchor_t, anchor_time))
        composition = _draw_composition(rng, cfg, 1)[0]
        hardness = float(hardness_from_parameter(parameter, composition, cfg)[0])

        # Temperatures at which P is reachable inside the time range.
        feasible_low = max(t_low, 1000.0 * parameter / (20.0 + LOG10_TIME_RANGE[1]) - 273.15)
        feasible_high = min(t_high, 1000.0 * parameter / (20.0 + LOG10_TIME_RANGE[0]) - 273.15)
        temperatures = np.sort(rng.uniform(feasible_low, feasible_high, size=group_size))
        for temperature in temperatures:
            time_s = float(iso_parameter_time(parameter, temperature))
            features.append(np.concatenate([[time_s, temperature], composition]))
            targets.append(hardness)
            groups.append(g)
    dataset = Dataset(features=np.array(features), targets=np.array(targets),
                      schema=STEEL_SCHEMA)
    return dataset, np.array(groups)


@dataclass
class WitnessSummary:
    """Outcome of the many-to-one check on grouped rows."""
    n_groups: int
    max_hardness_variance: float
    min_process_spread: float

    @property
    def holds(self) -> bool:
        return self.max_hardness_variance == 0.0 and self.min_process_spread > 0.0


def many_to_one_witness(dataset: Dataset, groups: np.ndarray) -> WitnessSummary:
    """Per group: hardness variance (about the first row, so exact) and (T, t) spread."""
    max_var, min_spread = 0.0, np.inf
    labels = np.unique(groups)
    for g in labels:
        rows = np.flatnonzero(groups == g)
        hardness = dataset.targets[rows]
        max_var = max(max_var, float(np.mean((hardness - hardness[0]) ** 2)))
        process = dataset.features[rows][:, :2]
        spread = float(np.min(np.ptp(process, axis=0)))
        min_spread = min(min_spread, spread)
    return WitnessSummary(n_groups=len(labels), max_hardness_variance=max_var,
                          min_process_spread=float(min_spread))


def conditional_variance_floor(cfg: SynthConfig, n_samples: int = 200_000, n_bins: int = 400,
                               scaler: Optional[Scaler] = None) -> float:
    """Estimate E[Var(X | Y)] averaged over the 13 features.

    Uses a large noiseless sample cut into equal-count hardness bins (tied
    hardness values always share a bin). Raw units unless ``scaler`` is given.
    """
    sample = synth_generate(SynthConfig(n_samples=n_samples, seed=cfg.seed, noise_std=0.0,
                                        composition_ranges=cfg.composition_ranges))
    x = sample.features if scaler is None else scaler.transform_features(sample.features)
    order = np.argsort(sample.targets, kind="stable")
    y_sorted = sample.targets[order]
    x_sorted = x[order]

    bins = (np.arange(n_samples) * n_bins) // n_samples
    _, first, inverse = np.unique(y_sorted, return_index=True, return_inverse=True)
    bins = bins[first][inverse]

    total = 0.0
    for b in np.unique(bins):
        members = x_sorted[bins == b]
        total += members.shape[0] * float(np.mean(np.var(members, axis=0)))
    return total / n_samples
