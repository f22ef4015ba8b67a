"""Evaluation protocols.

``functional``
    Push predicted recipes through the Teacher and compare its hardness to
    the requested target.
``input_space``
    Compare predicted recipes to the dataset rows' recipes.
``forward``
    Teacher quality: compare the Teacher's hardness to the dataset targets.

All metrics are computed after mapping back to raw units.
"""

from typing import Optional

import numpy as np

from ..data.dataset import Dataset
from ..data.scaler import Scaler, inverse_transform
from ..errors import ScalerError
from ..nncore.mlp import Mlp, forward
from ..training.base import BaseInverseModel
from .metrics import MetricSet, Protocol, Split, compute_metrics


def _raw(data: Dataset, scaler: Scaler) -> Dataset:
    scaler.check_schema(data.schema)
    return inverse_transform(data, scaler) if data.normalized else data


def check_same_scaler(model: BaseInverseModel, scaler: Scaler) -> None:
    if model.scaler.digest() != scaler.digest():
        for i, name in enumerate(scaler.feature_names):
            if i >= model.scaler.n_features or model.scaler.feature_names[i] != name or \
                    model.scaler.feature_min[i] != scaler.feature_min[i] or \
                    model.scaler.feature_max[i] != scaler.feature_max[i]:
                raise ScalerError("inverse model and teacher use different scalers", column=name)
        raise ScalerError("inverse model and teacher use different scalers",
                          column=scaler.target_name)


def functional_eval(
    model: BaseInverseModel,
    teacher: Mlp,
    targets,
    scaler: Optional[Scaler] = None,
    split: Split = Split.FRESH,
) -> MetricSet:
    """Metrics of ``teacher(model(y))`` against raw targets ``y``.

    ``scaler`` is the Teacher's scaler; it must equal the model's.
    """
    scaler = scaler or model.scaler
    check_same_scaler(model, scaler)
    targets = np.asarray(targets, dtype=np.float64).reshape(-1)
    recipes = model.predict(scaler.transform_targets(targets))
    achieved = scaler.inverse_targets(forward(teacher, recipes)[0][:, 0])
    return compute_metrics(achieved, targets, Protocol.FUNCTIONAL, split)


def input_space_eval(model: BaseInverseModel, data: Dataset,
                     split: Split = Split.TEST) -> MetricSet:
    """Metrics of predicted recipes against the dataset's recipes (raw units)."""
    raw = _raw(data, model.scaler)
    return compute_metrics(model.predict_raw(raw.targets), raw.features,
                           Protocol.INPUT_SPACE, split)


def forward_eval(teacher: Mlp, scaler: Scaler, data: Dataset,
                 split: Split = Split.TEST) -> MetricSet:
    """Metrics of the Teacher's hardness against dataset targets (raw units)."""
    raw = _raw(data, scaler)
    predicted = forward(teacher, scaler.transform_features(raw.features))[0][:, 0]
    return compute_metrics(scaler.inverse_targets(predicted), raw.targets,
                           Protocol.FORWARD, split)
