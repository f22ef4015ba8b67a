"""Single-step environment around the frozen Teacher.

The state is a normalized target hardness, the action a vector in [-1, 1]
per feature. Actions map affinely onto the normalized feature box [0, 1] and
the reward is the negative squared error of the Teacher's prediction.
Every episode ends after one step.
"""

from typing import Optional

import numpy as np

from ..data.scaler import Scaler
from ..errors import ContractError, DimensionError, FrozenTeacherError, ScalerError
from ..nncore.mlp import Mlp, forward
from ..utils.logging import get_logger


def action_to_features(action: np.ndarray) -> np.ndarray:
    return (np.asarray(action, dtype=np.float64) + 1.0) / 2.0


def features_to_action(features: np.ndarray) -> np.ndarray:
    return 2.0 * np.asarray(features, dtype=np.float64) - 1.0


def env_step(teacher: Mlp, scaler: Scaler, state, action) -> np.ndarray:
    """Rewards ``-(teacher((a + 1) / 2) - y)^2`` for a batch of states and actions.

    ``state`` is (n,) or (n x 1); ``action`` is (n x n_features). Returns (n,).
    """
    if not scaler.fitted:
        raise ScalerError("scaler is not fitted")
    action = np.atleast_2d(np.asarray(action, dtype=np.float64))
    state = np.asarray(state, dtype=np.float64).reshape(-1)
    if action.shape != (state.shape[0], teacher.in_width):
        raise DimensionError(
            f"expected {state.shape[0]} actions of width {teacher.in_width}, got {action.shape}"
        )
    if np.any(np.abs(action) > 1.0):
        raise ContractError("actions must lie in [-1, 1]")
    predicted = forward(teacher, action_to_features(action))[0][:, 0]
    return -((predicted - state) ** 2)


class InverseEnv:
    """Samples a target on ``reset``; ``step`` scores an action and resets."""

    state_dim = 1

    def __init__(self, teacher: Mlp, scaler: Scaler, seed=0):
        self.teacher = teacher
        self.scaler = scaler
        self.teacher_param_digest = teacher.freeze()
        self._stream = np.random.default_rng(seed)
        self.state: Optional[float] = None
        self.logger = get_logger()

    @property
    def action_dim(self) -> int:
        return self.teacher.in_width

    def reset(self) -> float:
        self.state = float(self._stream.uniform(0.0, 1.0))
        return self.state

    def step(self, action) -> tuple[float, float, bool]:
        """Returns (reward, next_state, terminal)."""
        if self.state is None:
            raise ContractError("reset() must be called before step()")
        reward = float(env_step(self.teacher, self.scaler, [self.state], [action])[0])
        return reward, self.reset(), True

    def verify_frozen(self, where: str) -> None:
        if self.teacher.digest() != self.teacher_param_digest:
            self.logger.error(f"teacher parameters changed {where}")
            raise FrozenTeacherError(f"teacher parameters changed {where}")
