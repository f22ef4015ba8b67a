"""Random target hardness batches in normalized units."""

import numpy as np

from ..errors import ScalerError
from .scaler import Scaler


def sample_targets(scaler: Scaler, batch: int, stream: np.random.Generator) -> np.ndarray:
    """Uniform draws over the normalized training target range [0, 1], shape (batch x 1)."""
    if not scaler.fitted:
        raise ScalerError("scaler is not fitted")
    return stream.uniform(0.0, 1.0, size=(batch, 1))


def fresh_targets(scaler: Scaler, n: int, seed: int) -> np.ndarray:
    """``n`` raw-unit targets drawn uniformly over the training range."""
    stream = np.random.default_rng(seed)
    return scaler.inverse_targets(sample_targets(scaler, n, stream)[:, 0])


def target_grid(n: int = 256) -> np.ndarray:
    """Evenly spaced normalized targets, (n x 1)."""
    return np.linspace(0.0, 1.0, n).reshape(-1, 1)
