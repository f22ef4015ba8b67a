"""Adam optimizer with bias correction."""

from dataclasses import dataclass, field

import numpy as np

from ..errors import DimensionError, FrozenTeacherError
from .mlp import GradientTape, Mlp


@dataclass
class AdamState:
    """Moment accumulators mirroring one network's parameters."""
    m: list[np.ndarray]
    v: list[np.ndarray]
    lr: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    step_count: int = field(default=0)

    @classmethod
    def for_net(cls, net: Mlp, lr: float = 1e-3, beta1: float = 0.9,
                beta2: float = 0.999, epsilon: float = 1e-8) -> "AdamState":
        if lr <= 0:
            raise ValueError("learning rate must be positive")
        params = net.parameters()
        return cls(
            m=[np.zeros_like(p) for p in params],
            v=[np.zeros_like(p) for p in params],
            lr=lr,
            beta1=beta1,
            beta2=beta2,
            epsilon=epsilon,
        )


def adam_step(net: Mlp, tape: GradientTape, state: AdamState) -> None:
    """Apply one Adam update to ``net`` in place and advance ``state``."""
    if net.frozen:
        raise FrozenTeacherError("refusing to update a frozen network")
    params = net.parameters()
    if len(tape.grads) != len(params) or len(state.m) != len(params):
        raise DimensionError("gradient tape does not mirror the network parameters")
    for p, g, m in zip(params, tape.grads, state.m):
        if g.shape != p.shape or m.shape != p.shape:
            raise DimensionError(f"gradient shape {g.shape} does not match parameter {p.shape}")

    state.step_count += 1
    t = state.step_count
    b1, b2 = state.beta1, state.beta2
    correction1 = 1.0 - b1 ** t
    correction2 = 1.0 - b2 ** t
    for p, g, m, v in zip(params, tape.grads, state.m, state.v):
        m *= b1
        m += (1.0 - b1) * g
        v *= b2
        v += (1.0 - b2) * (g * g)
        m_hat = m / correction1
        v_hat = v / correction2
        p -= state.lr * m_hat / (np.sqrt(v_hat) + state.epsilon)
    net.version += 1
