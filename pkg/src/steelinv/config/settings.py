"""Run configuration: one YAML document with a section per module.

Precedence, lowest first: dataclass defaults, the config file, ``--set``
overrides, dedicated CLI flags. The master ``seed`` derives every sub-seed.
"""

from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Iterable, Optional, Union

import yaml

from ..baselines.direct import DEFAULT_EPOCHS as DIRECT_EPOCHS
from ..baselines.forest import ForestParams
from ..data.synth import SynthConfig
from ..errors import ConfigError
from ..nncore.ops import KERNELS
from ..rl.td3 import Td3Config
from ..training.base import TrainConfig
from ..utils.digest import config_digest

SEED_OFFSETS = {
    "teacher": 1,
    "student": 2,
    "forest": 3,
    "direct": 4,
    "td3": 5,
    "synth": 6,
}

CONFIG_FILENAME = "run.yaml"


@dataclass
class EvalConfig:
    """Evaluation settings."""
    fresh_targets: int = 1000

    def __post_init__(self):
        if self.fresh_targets < 2:
            raise ValueError("fresh_targets must be at least 2")


@dataclass
class RunConfig:
    """Everything one experiment run needs."""
    seed: int = 42
    kernel: str = "ordered"
    threads: int = 1
    test_fraction: float = 0.2
    val_fraction: float = 0.1
    output_dir: str = "runs"
    synth: SynthConfig = field(default_factory=SynthConfig)
    teacher: TrainConfig = field(default_factory=TrainConfig)
    student: TrainConfig = field(default_factory=TrainConfig)
    direct: TrainConfig = field(default_factory=lambda: TrainConfig(epochs=DIRECT_EPOCHS))
    forest: ForestParams = field(default_factory=ForestParams)
    td3: Td3Config = field(default_factory=Td3Config)
    eval: EvalConfig = field(default_factory=EvalConfig)

    def __post_init__(self):
        if self.kernel not in KERNELS:
            raise ConfigError(f"must be one of {', '.join(KERNELS)}", key="kernel")
        if self.threads < 1:
            raise ConfigError("must be positive", key="threads")
        for key in ("test_fraction", "val_fraction"):
            if not 0.0 < getattr(self, key) < 1.0:
                raise ConfigError("must lie in (0, 1)", key=key)
        self.derive_seeds()

    def derive_seeds(self) -> None:
        """Overwrite every section's seed from the master seed."""
        for section, offset in SEED_OFFSETS.items():
            setattr(self, section, replace(getattr(self, section), seed=self.seed + offset))

    def to_dict(self) -> dict[str, Any]:
        data = asdict(self)
        data["synth"]["composition_ranges"] = {
            k: list(v) for k, v in self.synth.composition_ranges.items()
        }
        return data

    def artifact_dict(self) -> dict[str, Any]:
        """The config as embedded in artifacts; the output directory is left out."""
        data = self.to_dict()
        data.pop("output_dir", None)
        return data

    @property
    def digest(self) -> str:
        return config_digest(self.artifact_dict())


_SECTIONS = ("synth", "teacher", "student", "direct", "forest", "td3", "eval")


def _coerce(value: Any, default: Any, key: str) -> Any:
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"expected true/false, got {value!r}", key=key)
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"expected an integer, got {value!r}", key=key)
        return value
    if isinstance(default, float):
        if isinstance(value, str):
            # PyYAML reads exponents without a dot (1e-3) as strings.
            try:
                value = float(value)
            except ValueError:
                pass
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"expected a number, got {value!r}", key=key)
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"expected a string, got {value!r}", key=key)
        return value
    return value


def _composition_ranges(value: Any, key: str) -> dict[str, tuple[float, float]]:
    if not isinstance(value, dict):
        raise ConfigError("expected a mapping of element to [low, high]", key=key)
    defaults = SynthConfig().composition_ranges
    ranges = dict(defaults)
    for name, bounds in value.items():
        if name not in defaults:
            raise ConfigError("unknown element", key=f"{key}.{name}")
        if not isinstance(bounds, (list, tuple)) or len(bounds) != 2:
            raise ConfigError("expected [low, high]", key=f"{key}.{name}")
        ranges[name] = (_coerce(bounds[0], 0.0, f"{key}.{name}"),
                        _coerce(bounds[1], 0.0, f"{key}.{name}"))
    return ranges


def _build_section(name: str, data: Any) -> Any:
    if not isinstance(data, dict):
        raise ConfigError("expected a mapping", key=name)
    template = getattr(RunConfig(), name)
    known = {f.name for f in fields(template)}
    values = {}
    for key, value in data.items():
        dotted = f"{name}.{key}"
        if key not in known:
            raise ConfigError("unknown key", key=dotted)
        if key == "composition_ranges":
            values[key] = _composition_ranges(value, dotted)
        else:
            values[key] = _coerce(value, getattr(template, key), dotted)
    try:
        return replace(template, **values)
    except ValueError as e:
        raise ConfigError(str(e), key=name) from e


def run_config_from_dict(data: Optional[dict[str, Any]]) -> RunConfig:
    """Build and validate a RunConfig; unknown or mistyped keys raise ``ConfigError``."""
    data = data or {}
    if not isinstance(data, dict):
        raise ConfigError("config document must be a mapping")
    template = RunConfig()
    top_level = {f.name for f in fields(RunConfig)}
    values: dict[str, Any] = {}
    for key, value in data.items():
        if key not in top_level:
            raise ConfigError("unknown key", key=key)
        if key in _SECTIONS:
            values[key] = _build_section(key, value)
        else:
            values[key] = _coerce(value, getattr(template, key), key)
    return RunConfig(**values)


def _set_dotted(tree: dict[str, Any], dotted: str, value: Any) -> None:
    parts = dotted.split(".")
    node = tree
    for part in parts[:-1]:
        child = node.setdefault(part, {})
        if not isinstance(child, dict):
            raise ConfigError("cannot set a key below a scalar", key=dotted)
        node = child
    node[parts[-1]] = value


def parse_override(text: str) -> tuple[str, Any]:
    """``section.key=value``; the value is parsed as a YAML scalar."""
    key, sep, raw = text.partition("=")
    key = key.strip()
    if not sep or not key:
        raise ConfigError(f"override {text!r} is not of the form key=value")
    try:
        return key, yaml.safe_load(raw)
    except yaml.YAMLError as e:
        raise ConfigError(f"cannot parse value {raw!r}", key=key) from e


def read_config_file(path: Union[str, Path]) -> dict[str, Any]:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    if path.suffix.lower() == ".toml":
        raise ConfigError(f"{path}: run configs are YAML, TOML is not read")
    try:
        with open(path, "r") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as e:
        raise ConfigError(f"{path}: invalid YAML ({e})") from e
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: config document must be a mapping")
    return data


def load_run_config(
    path: Optional[Union[str, Path]] = None,
    overrides: Iterable[str] = (),
    **flags: Any,
) -> RunConfig:
    """Resolve a RunConfig from file, ``--set`` overrides and flags (``None`` flags are skipped)."""
    data = read_config_file(path) if path else {}
    for text in overrides:
        key, value = parse_override(text)
        _set_dotted(data, key, value)
    for key, value in flags.items():
        if value is not None:
            _set_dotted(data, key, value)
    return run_config_from_dict(data)


def save_run_config(config: RunConfig, path: Union[str, Path]) -> Path:
    """Write the resolved config as YAML."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        yaml.safe_dump(config.to_dict(), f, default_flow_style=False, sort_keys=False)
    return path
