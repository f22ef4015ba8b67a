"""Deterministic dense-network core."""

from .gradcheck import LossKind, grad_check
from .mlp import (
    ForwardCache,
    GradientTape,
    LinearLayer,
    Mlp,
    OutputMode,
    backward,
    forward,
    init_mlp,
    mse,
)
from .ops import elu, get_kernel, set_kernel, use_kernel
from .optim import AdamState, adam_step
from .serialize import mlp_from_dict, mlp_to_dict

__all__ = [
    "AdamState",
    "ForwardCache",
    "GradientTape",
    "LinearLayer",
    "LossKind",
    "Mlp",
    "OutputMode",
    "adam_step",
    "backward",
    "elu",
    "forward",
    "get_kernel",
    "grad_check",
    "init_mlp",
    "mlp_from_dict",
    "mlp_to_dict",
    "mse",
    "set_kernel",
    "use_kernel",
]
