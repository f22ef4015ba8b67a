"""TD3 comparison agent against the frozen Teacher."""

from .buffer import ReplayBuffer, Transition, TransitionBatch
from .env import InverseEnv, action_to_features, env_step, features_to_action
from .td3 import RewardCurve, Td3Agent, Td3Config, Td3Model, td3_train

__all__ = [
    "InverseEnv",
    "ReplayBuffer",
    "RewardCurve",
    "Td3Agent",
    "Td3Config",
    "Td3Model",
    "Transition",
    "TransitionBatch",
    "action_to_features",
    "env_step",
    "features_to_action",
    "td3_train",
]
