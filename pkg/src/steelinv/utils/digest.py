"""Checksums for parameters and configurations."""

import hashlib
import json
from typing import Any, Iterable

import numpy as np


def array_digest(arrays: Iterable[np.ndarray]) -> str:
    """SHA-256 over shapes and raw float64 bytes, in iteration order."""
    h = hashlib.sha256()
    for arr in arrays:
        a = np.ascontiguousarray(arr, dtype=np.float64)
        h.update(repr(a.shape).encode("ascii"))
        h.update(a.tobytes())
    return h.hexdigest()


def canonical_json(data: Any) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"))


def config_digest(data: Any) -> str:
    """Digest of a JSON-serializable configuration tree."""
    return hashlib.sha256(canonical_json(data).encode("utf-8")).hexdigest()
