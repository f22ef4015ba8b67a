"""TD3 agent trained against the frozen Teacher.

Twin critics score (state, action) pairs, target networks trail the live ones
by Polyak averaging, target actions are smoothed with clipped Gaussian noise,
and the actor is updated every ``policy_delay`` critic steps. Episodes are one
step long, so the terminal mask removes the bootstrap term and the critic
target equals the reward.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable, Optional, Union

import numpy as np

from ..data.dataset import Dataset
from ..data.scaler import Scaler
from ..errors import ContractError, ModelFormatError
from ..nncore.mlp import Mlp, OutputMode, backward, forward, init_mlp, mse
from ..nncore.ops import KERNELS, use_kernel
from ..nncore.optim import AdamState, adam_step
from ..nncore.serialize import mlp_from_dict, mlp_to_dict
from ..training.base import BaseInverseModel, check_step, guard_forward
from ..utils.io import read_csv, write_csv
from ..utils.logging import get_logger
from .buffer import ReplayBuffer, Transition, TransitionBatch
from .env import InverseEnv, action_to_features

REWARD_HEADER = ("step", "raw_reward", "smoothed_reward")
FROZEN_CHECK_EVERY = 1000


@dataclass
class Td3Config:
    total_steps: int = 40_000
    warmup_steps: int = 1_000
    batch_size: int = 256
    buffer_size: int = 100_000
    actor_lr: float = 1e-3
    critic_lr: float = 1e-3
    tau: float = 0.005
    gamma: float = 0.99
    policy_delay: int = 2
    exploration_noise_std: float = 0.1
    target_noise_std: float = 0.2
    target_noise_clip: float = 0.5
    actor_width: int = 64
    critic_width: int = 128
    smoothing_window: int = 100
    # "blas" is the faster opt-in for full 40k-step runs.
    kernel: str = "ordered"
    seed: int = 0

    def __post_init__(self):
        for name in ("total_steps", "batch_size", "buffer_size", "policy_delay",
                     "actor_width", "critic_width", "smoothing_window"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.warmup_steps < 0:
            raise ValueError("warmup_steps must be non-negative")
        if not 0.0 < self.tau <= 1.0:
            raise ValueError("tau must lie in (0, 1]")
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("gamma must lie in [0, 1]")
        if self.actor_lr <= 0 or self.critic_lr <= 0:
            raise ValueError("learning rates must be positive")
        if min(self.exploration_noise_std, self.target_noise_std, self.target_noise_clip) < 0:
            raise ValueError("noise scales must be non-negative")
        if self.kernel not in KERNELS:
            raise ValueError(f"kernel must be one of {KERNELS}")


@dataclass
class RewardCurve:
    """Per-step rewards with a trailing-mean smoothing."""
    steps: list[int] = field(default_factory=list)
    rewards: list[float] = field(default_factory=list)
    window: int = 100

    def append(self, step: int, reward: float) -> None:
        self.steps.append(int(step))
        self.rewards.append(float(reward))

    def __len__(self) -> int:
        return len(self.steps)

    def smoothed(self) -> np.ndarray:
        values = np.asarray(self.rewards, dtype=np.float64)
        if values.size == 0:
            return values
        totals = np.concatenate([[0.0], np.cumsum(values)])
        stop = np.arange(1, values.size + 1)
        start = np.maximum(stop - self.window, 0)
        return (totals[stop] - totals[start]) / (stop - start)

    def mean_last(self, n: int) -> float:
        return float(np.mean(self.rewards[-n:]))

    def write_csv(self, path: Union[str, Path], config_digest: Optional[str] = None) -> Path:
        rows = zip(self.steps, self.rewards, self.smoothed().tolist())
        return write_csv(path, REWARD_HEADER, rows, config_digest)

    @classmethod
    def read_csv(cls, path: Union[str, Path], window: int = 100) -> "RewardCurve":
        header, rows = read_csv(path)
        if tuple(header) != REWARD_HEADER:
            raise ModelFormatError(f"{path}: unexpected reward curve header {header}")
        curve = cls(window=window)
        for row in rows:
            curve.append(int(float(row[0])), float(row[1]))
        return curve


def actor_actions(actor: Mlp, states: np.ndarray) -> tuple[np.ndarray, Any]:
    """Bounded actions ``2 * sigmoid_head - 1`` and the actor's forward cache."""
    y, cache = forward(actor, states)
    return 2.0 * y - 1.0, cache


class Td3Agent:
    """Actor, twin critics, their targets and optimizer states."""

    def __init__(self, state_dim: int, action_dim: int, cfg: Td3Config):
        self.cfg = cfg
        self.action_dim = action_dim
        init_seeds = np.random.SeedSequence(cfg.seed).generate_state(3)
        self.actor = init_mlp(state_dim, cfg.actor_width, action_dim, int(init_seeds[0]),
                              OutputMode.SIGMOID)
        self.critics = [
            init_mlp(state_dim + action_dim, cfg.critic_width, 1, int(s), OutputMode.LINEAR)
            for s in init_seeds[1:]
        ]
        self.actor_target = self.actor.copy()
        self.critic_targets = [c.copy() for c in self.critics]
        self.actor_state = AdamState.for_net(self.actor, lr=cfg.actor_lr)
        self.critic_states = [AdamState.for_net(c, lr=cfg.critic_lr) for c in self.critics]
        self.noise = np.random.default_rng([cfg.seed, 3])
        self.critic_updates = 0

    def act(self, state: float) -> np.ndarray:
        return actor_actions(self.actor, [[state]])[0][0]

    def explore(self, state: float) -> np.ndarray:
        noise = self.noise.normal(0.0, self.cfg.exploration_noise_std, size=self.action_dim)
        return np.clip(self.act(state) + noise, -1.0, 1.0)

    def random_action(self) -> np.ndarray:
        return self.noise.uniform(-1.0, 1.0, size=self.action_dim)

    def critic_targets_for(self, batch: TransitionBatch) -> np.ndarray:
        """``r + gamma * (1 - d) * min(Q1', Q2')(s', smoothed pi'(s'))``."""
        next_actions, _ = actor_actions(self.actor_target, batch.next_states)
        noise = np.clip(
            self.noise.normal(0.0, self.cfg.target_noise_std, size=next_actions.shape),
            -self.cfg.target_noise_clip, self.cfg.target_noise_clip,
        )
        next_actions = np.clip(next_actions + noise, -1.0, 1.0)
        q_input = np.hstack([batch.next_states, next_actions])
        q_next = np.minimum(forward(self.critic_targets[0], q_input)[0],
                            forward(self.critic_targets[1], q_input)[0])
        return batch.rewards + self.cfg.gamma * (1.0 - batch.terminals) * q_next

    def train_step(self, batch: TransitionBatch, step: int) -> tuple[float, Optional[float]]:
        """One critic update, plus an actor and target update every ``policy_delay``.

        Returns (critic loss, actor loss or None).
        """
        targets = self.critic_targets_for(batch)
        q_input = np.hstack([batch.states, batch.actions])
        critic_loss = 0.0
        for critic, state in zip(self.critics, self.critic_states):
            q, cache = guard_forward("td3", step, lambda: forward(critic, q_input))
            loss, grad = mse(q, targets)
            tape = backward(critic, cache, grad)
            check_step("td3", step, loss, tape)
            adam_step(critic, tape, state)
            critic_loss += loss
        self.critic_updates += 1

        if self.critic_updates % self.cfg.policy_delay:
            return critic_loss, None

        actions, actor_cache = actor_actions(self.actor, batch.states)
        q, critic_cache = forward(self.critics[0], np.hstack([batch.states, actions]))
        n = q.shape[0]
        actor_loss = -float(np.mean(q))
        critic_tape = backward(self.critics[0], critic_cache, np.full_like(q, -1.0 / n))
        # d action / d head output is 2 for the scaled sigmoid.
        actor_tape = backward(self.actor, actor_cache, 2.0 * critic_tape.input_grad[:, 1:])
        check_step("td3", step, actor_loss, actor_tape)
        adam_step(self.actor, actor_tape, self.actor_state)

        self.actor_target.soft_update_from(self.actor, self.cfg.tau)
        for target, live in zip(self.critic_targets, self.critics):
            target.soft_update_from(live, self.cfg.tau)
        return critic_loss, actor_loss


ProgressCallback = Callable[[str, float], None]


def td3_train(
    teacher: Mlp,
    scaler: Scaler,
    cfg: Td3Config,
    progress: Optional[ProgressCallback] = None,
) -> tuple[Mlp, RewardCurve]:
    """Train a TD3 actor (1 -> teacher inputs) for ``cfg.total_steps`` environment steps."""
    logger = get_logger()
    env = InverseEnv(teacher, scaler, seed=[cfg.seed, 5])
    agent = Td3Agent(env.state_dim, env.action_dim, cfg)
    buffer = ReplayBuffer(cfg.buffer_size, env.action_dim, seed=[cfg.seed, 4])
    curve = RewardCurve(window=cfg.smoothing_window)

    logger.info(f"td3: {cfg.total_steps} steps, warmup {cfg.warmup_steps}, "
                f"batch {cfg.batch_size}, kernel {cfg.kernel}")
    with use_kernel(cfg.kernel):
        state = env.reset()
        for step in range(cfg.total_steps):
            if step < cfg.warmup_steps:
                action = agent.random_action()
            else:
                action = agent.explore(state)
            reward, next_state, terminal = env.step(action)
            buffer.add(Transition(state, action, reward, next_state, terminal))
            curve.append(step, reward)
            state = next_state

            if step >= cfg.warmup_steps and len(buffer) >= cfg.batch_size:
                critic_loss, _ = agent.train_step(buffer.sample(cfg.batch_size), step)
                if step % FROZEN_CHECK_EVERY == 0:
                    logger.debug(f"td3: step {step} critic loss {critic_loss:.6g} "
                                 f"smoothed reward {curve.smoothed()[-1]:.6g}")

            if (step + 1) % FROZEN_CHECK_EVERY == 0:
                env.verify_frozen(f"during td3 step {step}")
                if progress:
                    progress(f"td3 step {step + 1}/{cfg.total_steps}",
                             (step + 1) / cfg.total_steps)

    env.verify_frozen("after td3 training")
    logger.info(f"td3: mean reward over last {cfg.smoothing_window} steps "
                f"{curve.mean_last(cfg.smoothing_window):.6g}")
    return agent.actor, curve


class Td3Model(BaseInverseModel):
    """Inverse model whose recipes come from the TD3 actor."""

    kind = "td3"

    def __init__(self, teacher: Optional[Mlp], scaler: Scaler, cfg: Optional[Td3Config] = None):
        cfg = cfg or Td3Config()
        super().__init__(scaler, seed=cfg.seed)
        self.cfg = cfg
        self.teacher = teacher
        self.actor: Optional[Mlp] = None
        self.reward_curve: Optional[RewardCurve] = None

    @property
    def name(self) -> str:
        return "td3"

    @property
    def display_name(self) -> str:
        return "TD3 (RL)"

    @property
    def fitted(self) -> bool:
        return self.actor is not None

    def fit(self, train: Dataset, val: Dataset) -> None:
        # Targets come from the environment, so the datasets are not consumed.
        if self.teacher is None:
            raise ContractError("td3 needs a teacher to train against")
        self.actor, self.reward_curve = td3_train(self.teacher, self.scaler, self.cfg,
                                                  self.report_progress)

    def predict_normalized(self, targets: np.ndarray) -> np.ndarray:
        return action_to_features(actor_actions(self.actor, targets)[0])

    def to_dict(self) -> dict[str, Any]:
        if self.actor is None:
            raise ContractError("td3 actor is not trained")
        return {
            "kind": self.kind,
            "model": mlp_to_dict(self.actor),
            "scaler": self.scaler.to_dict(),
            "seed": self.cfg.seed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "Td3Model":
        if data.get("kind") != cls.kind:
            raise ModelFormatError("not a td3 document")
        model = cls(None, Scaler.from_dict(data.get("scaler")),
                    Td3Config(seed=int(data.get("seed", 0))))
        model.actor = mlp_from_dict(data.get("model"))
        if model.actor.output_mode is not OutputMode.SIGMOID:
            raise ModelFormatError("td3 actor must have a bounded head")
        return model
