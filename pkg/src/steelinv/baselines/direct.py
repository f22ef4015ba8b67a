"""Direct-inverse MLP: plain supervised regression from hardness to features."""

from dataclasses import replace
from typing import Any, Optional

import numpy as np

from ..data.dataset import Dataset
from ..data.scaler import Scaler
from ..errors import ContractError, ModelFormatError
from ..nncore.mlp import Mlp, OutputMode, forward, init_mlp
from ..nncore.serialize import mlp_from_dict, mlp_to_dict
from ..training.base import BaseInverseModel, TrainConfig
from ..training.curves import LossCurve
from ..training.supervised import ProgressCallback, fit_supervised

DEFAULT_EPOCHS = 1000


def default_direct_config(seed: int = 0) -> TrainConfig:
    return TrainConfig(epochs=DEFAULT_EPOCHS, seed=seed)


def train_direct_inverse(
    train: Dataset,
    val: Dataset,
    cfg: TrainConfig,
    progress: Optional[ProgressCallback] = None,
) -> tuple[Mlp, LossCurve]:
    """Fit a (1 -> n_features) linear-head network on the inverted dataset."""
    if not (train.normalized and val.normalized):
        raise ContractError("training expects normalized datasets")
    net = init_mlp(1, cfg.hidden_width, train.schema.n_features, cfg.seed, OutputMode.LINEAR)
    curve = fit_supervised(
        net, train.target_matrix, train.features, val.target_matrix, val.features,
        cfg, "direct", progress,
    )
    return net, curve


class DirectInverseModel(BaseInverseModel):
    """MLP baseline trained on (hardness -> features) pairs."""

    kind = "direct_inverse"

    def __init__(self, scaler: Scaler, cfg: Optional[TrainConfig] = None):
        cfg = cfg or default_direct_config()
        super().__init__(scaler, seed=cfg.seed)
        self.cfg = cfg
        self.net: Optional[Mlp] = None

    @property
    def name(self) -> str:
        return "mlp_baseline"

    @property
    def display_name(self) -> str:
        return "MLP (baseline)"

    @property
    def fitted(self) -> bool:
        return self.net is not None

    def fit(self, train: Dataset, val: Dataset) -> None:
        self.net, self.curve = train_direct_inverse(train, val, self.cfg, self.report_progress)

    def predict_normalized(self, targets: np.ndarray) -> np.ndarray:
        return forward(self.net, targets)[0]

    def to_dict(self) -> dict[str, Any]:
        if self.net is None:
            raise ContractError("direct-inverse network is not trained")
        return {
            "kind": self.kind,
            "model": mlp_to_dict(self.net),
            "scaler": self.scaler.to_dict(),
            "curve": (self.curve or LossCurve()).to_dict(),
            "seed": self.cfg.seed,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DirectInverseModel":
        if data.get("kind") != cls.kind:
            raise ModelFormatError("not a direct-inverse document")
        cfg = replace(default_direct_config(), seed=int(data.get("seed", 0)))
        model = cls(Scaler.from_dict(data.get("scaler")), cfg)
        model.net = mlp_from_dict(data.get("model"))
        model.curve = LossCurve.from_dict(data.get("curve", {}))
        return model
