"""Run configuration."""

from .settings import (
    CONFIG_FILENAME,
    SEED_OFFSETS,
    EvalConfig,
    RunConfig,
    load_run_config,
    parse_override,
    run_config_from_dict,
    save_run_config,
)

__all__ = [
    "CONFIG_FILENAME",
    "EvalConfig",
    "RunConfig",
    "SEED_OFFSETS",
    "load_run_config",
    "parse_override",
    "run_config_from_dict",
    "save_run_config",
]
