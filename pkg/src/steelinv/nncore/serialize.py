"""JSON model format.

    {"schema_version": 1, "widths": [in, hidden, out], "output_mode": "linear",
     "layers": [{"weight": [[...]], "bias": [...]}, ...]}

Layers are listed input projection first, then the three hidden blocks, then
the head.
"""

from typing import Any

import numpy as np

from ..errors import DimensionError, ModelFormatError
from .mlp import N_HIDDEN, LinearLayer, Mlp, OutputMode

SCHEMA_VERSION = 1


def mlp_to_dict(net: Mlp) -> dict[str, Any]:
    return {
        "schema_version": SCHEMA_VERSION,
        "widths": list(net.widths),
        "output_mode": net.output_mode.value,
        "layers": [
            {"weight": layer.weight.tolist(), "bias": layer.bias.tolist()}
            for _, layer in net.layers()
        ],
    }


def _layer_from_dict(data: Any, shape: tuple[int, int], where: str) -> LinearLayer:
    if not isinstance(data, dict) or "weight" not in data or "bias" not in data:
        raise ModelFormatError(f"{where}: expected an object with weight and bias")
    try:
        weight = np.array(data["weight"], dtype=np.float64)
        bias = np.array(data["bias"], dtype=np.float64)
    except (TypeError, ValueError) as e:
        raise ModelFormatError(f"{where}: non-numeric values ({e})") from e
    if weight.shape != shape or bias.shape != (shape[0],):
        raise ModelFormatError(
            f"{where}: expected weight {shape} and bias ({shape[0]},), "
            f"got {weight.shape} and {bias.shape}"
        )
    if not (np.all(np.isfinite(weight)) and np.all(np.isfinite(bias))):
        raise ModelFormatError(f"{where}: non-finite parameter")
    return LinearLayer(weight, bias)


def mlp_from_dict(data: Any) -> Mlp:
    """Rebuild a network, validating version, shapes and finiteness."""
    if not isinstance(data, dict):
        raise ModelFormatError("model document must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ModelFormatError(f"unsupported schema_version {data.get('schema_version')!r}")
    widths = data.get("widths")
    if (not isinstance(widths, list) or len(widths) != 3
            or not all(isinstance(w, int) and w > 0 for w in widths)):
        raise ModelFormatError(f"widths must be three positive integers, got {widths!r}")
    try:
        mode = OutputMode(data.get("output_mode"))
    except ValueError as e:
        raise ModelFormatError(f"unknown output_mode {data.get('output_mode')!r}") from e
    layers = data.get("layers")
    if not isinstance(layers, list) or len(layers) != N_HIDDEN + 2:
        raise ModelFormatError(f"expected {N_HIDDEN + 2} layers")

    n_in, h, n_out = widths
    shapes = [(h, n_in)] + [(h, h)] * N_HIDDEN + [(n_out, h)]
    built = [_layer_from_dict(layer, shape, f"layers[{i}]")
             for i, (layer, shape) in enumerate(zip(layers, shapes))]
    try:
        return Mlp(input_proj=built[0], hidden=built[1:-1], head=built[-1], output_mode=mode)
    except DimensionError as e:
        raise ModelFormatError(str(e)) from e
