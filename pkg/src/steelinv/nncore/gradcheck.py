"""Central finite-difference check of ``backward``."""

from enum import Enum
from typing import Callable, Optional, Union

import numpy as np

from .mlp import Mlp, backward, forward, mse
from .ops import as_matrix


class LossKind(Enum):
    MSE = "mse"  # mean squared error against a target (zeros by default)
    SUM = "sum"  # plain sum of outputs


def _loss_fn(kind: LossKind, target: np.ndarray) -> Callable[[np.ndarray], tuple[float, np.ndarray]]:
    if kind is LossKind.MSE:
        return lambda y: mse(y, target)
    return lambda y: (float(np.sum(y)), np.ones_like(y))


def relative_error(analytic: float, numeric: float) -> float:
    return abs(analytic - numeric) / max(abs(analytic), abs(numeric), 1e-8)


def grad_check(
    net: Mlp,
    x,
    loss_kind: Union[LossKind, str] = LossKind.MSE,
    target: Optional[np.ndarray] = None,
    step: float = 1e-5,
) -> float:
    """Max relative error between analytic and numeric gradients.

    Covers every parameter entry and every input entry. Parameters are
    perturbed in place and restored exactly afterwards.
    """
    kind = LossKind(loss_kind)
    x = as_matrix(x, "input")
    if target is None:
        target = np.zeros((x.shape[0], net.out_width))
    loss_of = _loss_fn(kind, np.asarray(target, dtype=np.float64))

    y, cache = forward(net, x)
    _, dL_dy = loss_of(y)
    tape = backward(net, cache, dL_dy)

    def numeric(arr: np.ndarray, idx: tuple) -> float:
        original = arr[idx]
        arr[idx] = original + step
        plus = loss_of(forward(net, x)[0])[0]
        arr[idx] = original - step
        minus = loss_of(forward(net, x)[0])[0]
        arr[idx] = original
        return (plus - minus) / (2.0 * step)

    worst = 0.0
    for param, grad in zip(net.parameters(), tape.grads):
        for idx in np.ndindex(param.shape):
            worst = max(worst, relative_error(grad[idx], numeric(param, idx)))
    for idx in np.ndindex(x.shape):
        worst = max(worst, relative_error(tape.input_grad[idx], numeric(x, idx)))
    return worst
