"""Replay storage for one-step transitions."""

from dataclasses import dataclass

import numpy as np

from ..errors import ContractError, DimensionError, NonFiniteError


@dataclass(frozen=True, eq=False)
class Transition:
    state: float
    action: np.ndarray
    reward: float
    next_state: float
    terminal: bool = True

    def __post_init__(self):
        action = np.asarray(self.action, dtype=np.float64)
        if action.ndim != 1:
            raise DimensionError("action must be a vector")
        if not np.all(np.isfinite(action)) or not np.isfinite(self.reward):
            raise NonFiniteError("transition holds a non-finite value")
        if np.any(np.abs(action) > 1.0):
            raise ContractError("actions must lie in [-1, 1]")
        object.__setattr__(self, "action", action)


@dataclass(eq=False)
class TransitionBatch:
    """Column views of sampled transitions, each (batch x k)."""
    states: np.ndarray
    actions: np.ndarray
    rewards: np.ndarray
    next_states: np.ndarray
    terminals: np.ndarray

    def __len__(self) -> int:
        return self.states.shape[0]


class ReplayBuffer:
    """Fixed-capacity ring buffer with a seeded uniform sampler."""

    def __init__(self, capacity: int, action_dim: int, seed=0):
        if capacity < 1 or action_dim < 1:
            raise ValueError("capacity and action_dim must be positive")
        self.capacity = capacity
        self.action_dim = action_dim
        self._states = np.zeros((capacity, 1))
        self._actions = np.zeros((capacity, action_dim))
        self._rewards = np.zeros((capacity, 1))
        self._next_states = np.zeros((capacity, 1))
        self._terminals = np.zeros((capacity, 1))
        self._cursor = 0
        self._size = 0
        self._stream = np.random.default_rng(seed)

    def __len__(self) -> int:
        return self._size

    def add(self, transition: Transition) -> None:
        if transition.action.shape != (self.action_dim,):
            raise DimensionError(
                f"action width {transition.action.shape} does not match buffer ({self.action_dim},)"
            )
        i = self._cursor
        self._states[i, 0] = transition.state
        self._actions[i] = transition.action
        self._rewards[i, 0] = transition.reward
        self._next_states[i, 0] = transition.next_state
        self._terminals[i, 0] = 1.0 if transition.terminal else 0.0
        self._cursor = (i + 1) % self.capacity
        self._size = min(self._size + 1, self.capacity)

    def sample(self, batch: int) -> TransitionBatch:
        if batch < 1:
            raise ValueError("batch must be positive")
        if self._size < batch:
            raise ContractError(f"buffer holds {self._size} transitions, batch needs {batch}")
        rows = self._stream.integers(0, self._size, size=batch)
        return TransitionBatch(
            states=self._states[rows],
            actions=self._actions[rows],
            rewards=self._rewards[rows],
            next_states=self._next_states[rows],
            terminals=self._terminals[rows],
        )
