"""Supervised training of the forward surrogate (features -> hardness)."""

from pathlib import Path
from typing import Any, Optional, Union

from ..data.dataset import Dataset
from ..data.scaler import Scaler
from ..errors import ContractError, ModelFormatError
from ..nncore.mlp import Mlp, OutputMode, init_mlp
from ..nncore.serialize import mlp_from_dict, mlp_to_dict
from ..utils.io import read_json, write_json
from .base import TrainConfig
from .curves import LossCurve
from .supervised import ProgressCallback, fit_supervised


def _require_normalized(*datasets: Dataset) -> None:
    for ds in datasets:
        if not ds.normalized:
            raise ContractError("training expects normalized datasets")


def train_teacher(
    train: Dataset,
    val: Dataset,
    cfg: TrainConfig,
    progress: Optional[ProgressCallback] = None,
) -> tuple[Mlp, LossCurve]:
    """Fit an (n_features -> 1) linear-head network on normalized data."""
    _require_normalized(train, val)
    net = init_mlp(train.schema.n_features, cfg.hidden_width, 1, cfg.seed, OutputMode.LINEAR)
    curve = fit_supervised(
        net, train.features, train.target_matrix, val.features, val.target_matrix,
        cfg, "teacher", progress,
    )
    return net, curve


def save_teacher(path: Union[str, Path], teacher: Mlp, scaler: Scaler, curve: LossCurve,
                 config: dict[str, Any], config_digest: str) -> Path:
    """Teacher document: network, scaler, curve and the producing config."""
    return write_json(path, {
        "kind": "teacher",
        "model": mlp_to_dict(teacher),
        "scaler": scaler.to_dict(),
        "curve": curve.to_dict(),
        "teacher_param_digest": teacher.digest(),
        "config": config,
        "config_digest": config_digest,
    })


def load_teacher(path: Union[str, Path]) -> tuple[Mlp, Scaler, dict[str, Any]]:
    """Returns (network, scaler, whole document)."""
    data = read_json(path)
    if not isinstance(data, dict) or data.get("kind") != "teacher":
        raise ModelFormatError(f"{path}: not a teacher document")
    teacher = mlp_from_dict(data.get("model"))
    if teacher.digest() != data.get("teacher_param_digest"):
        raise ModelFormatError(f"{path}: parameter digest does not match the stored network")
    return teacher, Scaler.from_dict(data.get("scaler")), data
