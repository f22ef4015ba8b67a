"""Shared fixtures: hand-built toy networks, a small synthetic dataset and a fast config."""

import numpy as np
import pytest

from steelinv.config.settings import RunConfig, run_config_from_dict
from steelinv.data.scaler import Scaler
from steelinv.data.synth import SynthConfig, synth_generate
from steelinv.nncore.mlp import N_HIDDEN, LinearLayer, Mlp, OutputMode
from steelinv.nncore.ops import set_kernel
from steelinv.pipeline import make_splits


def identity_net(in_width: int = 1, pick: int = 0) -> Mlp:
    """Width-1 net returning input column ``pick`` unchanged (zero hidden blocks)."""
    proj = np.zeros((1, in_width))
    proj[0, pick] = 1.0
    return Mlp(
        input_proj=LinearLayer(proj, np.zeros(1)),
        hidden=[LinearLayer(np.zeros((1, 1)), np.zeros(1)) for _ in range(N_HIDDEN)],
        head=LinearLayer(np.ones((1, 1)), np.zeros(1)),
        output_mode=OutputMode.LINEAR,
    )


def unit_scaler(n_features: int = 1) -> Scaler:
    """Scaler whose raw and normalized units coincide on [0, 1]."""
    return Scaler(
        feature_names=tuple(f"x{i}" for i in range(n_features)),
        target_name="y",
        feature_min=np.zeros(n_features),
        feature_max=np.ones(n_features),
        target_min=0.0,
        target_max=1.0,
    )


FAST_CONFIG = {
    "seed": 7,
    "synth": {"n_samples": 240},
    "teacher": {"epochs": 4, "hidden_width": 8, "batch_size": 32},
    "student": {"epochs": 2, "steps_per_epoch": 5, "hidden_width": 8, "batch_size": 16},
    "direct": {"epochs": 3, "hidden_width": 8, "batch_size": 32},
    "forest": {"n_trees": 4, "max_depth": 4},
    "td3": {
        "total_steps": 120,
        "warmup_steps": 40,
        "batch_size": 16,
        "buffer_size": 500,
        "actor_width": 8,
        "critic_width": 8,
        "smoothing_window": 10,
    },
    "eval": {"fresh_targets": 50},
}


@pytest.fixture(autouse=True)
def _default_kernel():
    set_kernel("ordered")
    yield
    set_kernel("ordered")


@pytest.fixture(autouse=True)
def _log_dir(tmp_path, monkeypatch):
    """Keep log files out of the home directory."""
    from steelinv.utils import logging as log_utils

    monkeypatch.setattr(log_utils, "_log_directory", tmp_path / "logs")
    monkeypatch.setenv("STEELINV_LOG_DIR", str(tmp_path / "logs"))
    yield
    logger = log_utils.get_logger()
    for handler in list(logger.handlers):
        handler.close()
        logger.removeHandler(handler)


@pytest.fixture
def fast_config() -> RunConfig:
    return run_config_from_dict(FAST_CONFIG)


@pytest.fixture
def raw_data():
    return synth_generate(SynthConfig(n_samples=200, seed=3))


@pytest.fixture
def splits(raw_data, fast_config):
    return make_splits(raw_data, fast_config)


@pytest.fixture
def toy_teacher() -> Mlp:
    return identity_net()


@pytest.fixture
def toy_scaler() -> Scaler:
    return unit_scaler()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
