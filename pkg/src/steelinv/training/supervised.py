"""Minibatch MSE training shared by the Teacher and the direct-inverse baseline."""

from typing import Callable, Optional

import numpy as np

from ..nncore.mlp import Mlp, backward, forward, mse
from ..nncore.optim import AdamState, adam_step
from ..utils.logging import get_logger
from .base import TrainConfig, check_step, guard_forward
from .curves import LossCurve

ProgressCallback = Callable[[str, float], None]


def fit_supervised(
    net: Mlp,
    x_train: np.ndarray,
    y_train: np.ndarray,
    x_val: np.ndarray,
    y_val: np.ndarray,
    cfg: TrainConfig,
    phase: str,
    progress: Optional[ProgressCallback] = None,
) -> LossCurve:
    """Adam over shuffled epochs; updates ``net`` in place and returns its curve.

    The train loss of an epoch is the sample-weighted mean of its batch losses.
    """
    logger = get_logger()
    state = AdamState.for_net(net, lr=cfg.lr)
    shuffle = np.random.default_rng([cfg.seed, 1])
    curve = LossCurve()
    n = x_train.shape[0]
    step = 0

    logger.info(f"{phase}: {cfg.epochs} epochs over {n} rows, batch {cfg.batch_size}")
    for epoch in range(1, cfg.epochs + 1):
        order = shuffle.permutation(n)
        total = 0.0
        for start in range(0, n, cfg.batch_size):
            rows = order[start:start + cfg.batch_size]
            y_hat, cache = guard_forward(phase, step, lambda: forward(net, x_train[rows]))
            loss, grad = mse(y_hat, y_train[rows])
            tape = backward(net, cache, grad)
            check_step(phase, step, loss, tape)
            adam_step(net, tape, state)
            total += loss * rows.size
            step += 1

        if epoch % cfg.eval_every == 0 or epoch == cfg.epochs:
            val_loss, _ = mse(guard_forward(phase, step, lambda: forward(net, x_val)[0]), y_val)
            check_step(phase, step, val_loss)
            curve.append(epoch, total / n, val_loss)
            logger.debug(f"{phase}: epoch {epoch} train {total / n:.6g} val {val_loss:.6g}")
        if progress:
            progress(f"{phase} epoch {epoch}/{cfg.epochs}", epoch / cfg.epochs)

    if len(curve):
        logger.info(f"{phase}: final train {curve.final_train:.6g}, val {curve.final_val:.6g}")
    return curve
