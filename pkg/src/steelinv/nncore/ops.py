"""Matrix primitives shared by the network code.

A ``Matrix`` is a 2-D C-ordered float64 ``numpy`` array whose first axis is
the batch. Two product kernels exist:

``ordered``
    Each dot product accumulates left to right over the inner index in a
    single accumulator. Row ``i`` of a product never depends on other rows,
    so a stacked batch gives bit-identical results to per-row evaluation.
    This is the default.
``blas``
    Delegates to ``numpy.matmul``. Much faster for large batches, and
    repeatable run-to-run on one machine, but not batch-consistent.
"""

import math
from contextlib import contextmanager
from typing import Iterator

import numpy as np
from scipy.special import expit

from ..errors import DimensionError, NonFiniteError

KERNELS = ("ordered", "blas")

_kernel = "ordered"

# Largest float64 below 1.0; keeps logistic outputs inside the open interval.
_SIGMOID_HIGH = float(np.nextafter(1.0, 0.0))
_SIGMOID_LOW = float(np.finfo(np.float64).tiny)


def set_kernel(name: str) -> None:
    global _kernel
    if name not in KERNELS:
        raise ValueError(f"unknown kernel {name!r}; expected one of {KERNELS}")
    _kernel = name


def get_kernel() -> str:
    return _kernel


@contextmanager
def use_kernel(name: str) -> Iterator[None]:
    previous = get_kernel()
    set_kernel(name)
    try:
        yield
    finally:
        set_kernel(previous)


def as_matrix(values, name: str = "matrix") -> np.ndarray:
    """Coerce to a finite 2-D float64 array; 1-D input becomes a single row."""
    arr = np.array(values, dtype=np.float64, order="C", copy=True)
    if arr.ndim == 1:
        arr = arr.reshape(1, -1)
    if arr.ndim != 2:
        raise DimensionError(f"{name}: expected 2 dimensions, got {arr.ndim}")
    check_finite(arr, name)
    return arr


def check_finite(arr: np.ndarray, name: str = "matrix") -> None:
    if not np.all(np.isfinite(arr)):
        bad = np.argwhere(~np.isfinite(arr))[0]
        raise NonFiniteError(f"{name}: non-finite entry at index {tuple(int(i) for i in bad)}")


def matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Matrix product ``a @ b`` under the active kernel."""
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise DimensionError(f"cannot multiply {a.shape} by {b.shape}")
    if _kernel == "blas":
        return a @ b
    inner = a.shape[1]
    if inner == 0:
        return np.zeros((a.shape[0], b.shape[1]))
    out = a[:, 0:1] * b[0:1, :]
    for k in range(1, inner):
        out += a[:, k:k + 1] * b[k:k + 1, :]
    return out


def column_sums(a: np.ndarray) -> np.ndarray:
    """Sum over the batch axis."""
    return a.sum(axis=0)


def batch_outer(delta: np.ndarray, inputs: np.ndarray) -> np.ndarray:
    """``delta.T @ inputs``: per-row outer products summed over the batch.

    Gradient reductions mix rows anyway, so both kernels use numpy here.
    """
    if delta.shape[0] != inputs.shape[0]:
        raise DimensionError(f"batch sizes differ: {delta.shape} vs {inputs.shape}")
    return delta.T @ inputs


def elu(x: float) -> float:
    """ELU with alpha fixed to 1."""
    return x if x > 0 else math.expm1(x)


def elu_array(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0, x, np.expm1(np.minimum(x, 0.0)))


def elu_derivative(x: np.ndarray) -> np.ndarray:
    return np.where(x > 0, 1.0, np.exp(np.minimum(x, 0.0)))


def sigmoid(x: np.ndarray) -> np.ndarray:
    return np.clip(expit(x), _SIGMOID_LOW, _SIGMOID_HIGH)
