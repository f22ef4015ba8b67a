"""Artifact reading and writing.

JSON floats are written by ``json`` with ``repr``, which is the shortest
decimal that round-trips. CSV artifacts carry the producing config digest as
a leading ``#`` comment line.
"""

import csv
import json
from pathlib import Path
from typing import Any, Iterable, Optional, Sequence, Union

from ..errors import ModelFormatError

PathLike = Union[str, Path]


def format_float(value: float) -> str:
    return repr(float(value))


def write_json(path: PathLike, data: Any) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(data, f, indent=2, allow_nan=False)
        f.write("\n")
    return path


def read_json(path: PathLike) -> Any:
    path = Path(path)
    try:
        with open(path, "r", encoding="utf-8") as f:
            return json.load(f)
    except json.JSONDecodeError as e:
        raise ModelFormatError(f"{path}: invalid JSON ({e})") from e


def write_csv(
    path: PathLike,
    header: Sequence[str],
    rows: Iterable[Sequence[Any]],
    config_digest: Optional[str] = None,
) -> Path:
    """Write rows; floats are rendered with ``format_float``."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        if config_digest:
            f.write(f"# config_digest: {config_digest}\n")
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, float) else v for v in row])
    return path


def iter_data_lines(f) -> Iterable[str]:
    """Yield lines of an open text file, skipping ``#`` comment lines."""
    for line in f:
        if line.lstrip().startswith("#"):
            continue
        yield line


def read_csv(path: PathLike) -> tuple[list[str], list[list[str]]]:
    """Read a comment-prefixed CSV into (header, rows of strings)."""
    with open(path, "r", encoding="utf-8", newline="") as f:
        reader = csv.reader(iter_data_lines(f))
        try:
            header = next(reader)
        except StopIteration:
            return [], []
        return [h.strip() for h in header], [row for row in reader if row]


def read_config_digest(path: PathLike) -> Optional[str]:
    with open(path, "r", encoding="utf-8") as f:
        first = f.readline()
    if first.startswith("# config_digest:"):
        return first.split(":", 1)[1].strip()
    return None
