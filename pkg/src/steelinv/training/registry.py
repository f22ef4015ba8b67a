"""Reload any inverse model from its JSON document."""

from pathlib import Path
from typing import Union

from ..errors import ModelFormatError
from ..utils.io import read_json
from .base import BaseInverseModel, load_fit_record


def _model_classes() -> dict[str, type[BaseInverseModel]]:
    # Baselines and rl import this package, so their classes are looked up lazily.
    from ..baselines.direct import DirectInverseModel
    from ..baselines.forest import ForestModel
    from ..rl.td3 import Td3Model
    from .student import StudentModel

    return {cls.kind: cls for cls in (StudentModel, DirectInverseModel, ForestModel, Td3Model)}


def model_kinds() -> list[str]:
    return sorted(_model_classes())


def load_inverse_model(path: Union[str, Path]) -> BaseInverseModel:
    """Dispatch on the document's ``kind``; attaches the fit record if present."""
    data = read_json(path)
    if not isinstance(data, dict):
        raise ModelFormatError(f"{path}: expected a JSON object")
    kind = data.get("kind")
    classes = _model_classes()
    if kind not in classes:
        raise ModelFormatError(f"{path}: unknown model kind {kind!r}")
    model = classes[kind].from_dict(data)
    model.fit_result = load_fit_record(path)
    return model
