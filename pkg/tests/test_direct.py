"""Tests for the direct-inverse MLP baseline."""

import numpy as np
import pytest

from steelinv.baselines import DirectInverseModel, train_direct_inverse
from steelinv.baselines.direct import DEFAULT_EPOCHS, default_direct_config
from steelinv.data.dataset import Dataset
from steelinv.data.schema import FeatureSchema
from steelinv.errors import ContractError
from steelinv.nncore import OutputMode, init_mlp
from steelinv.training import TrainConfig, load_inverse_model


def test_default_budget():
    assert default_direct_config(seed=3).epochs == DEFAULT_EPOCHS == 1000


def test_zero_epochs_returns_initialization(splits):
    cfg = TrainConfig(epochs=0, hidden_width=8, seed=6)
    net, curve = train_direct_inverse(splits.train, splits.val, cfg)
    assert net.digest() == init_mlp(1, 8, 13, 6, OutputMode.LINEAR).digest()
    assert len(curve) == 0


def test_requires_normalized(raw_data):
    with pytest.raises(ContractError):
        train_direct_inverse(raw_data, raw_data, TrainConfig(epochs=1))


def test_curve_per_epoch(splits):
    _, curve = train_direct_inverse(splits.train, splits.val,
                                    TrainConfig(epochs=4, hidden_width=8))
    assert curve.epochs == [1, 2, 3, 4]


def test_model_round_trip(tmp_path, splits):
    model = DirectInverseModel(splits.scaler, TrainConfig(epochs=2, hidden_width=8, seed=1))
    model.run(splits.train, splits.val).raise_for_status()
    targets = np.linspace(0.0, 1.0, 5)

    loaded = load_inverse_model(model.save(tmp_path / "mlp.json"))
    assert isinstance(loaded, DirectInverseModel)
    assert loaded.seed == 1
    np.testing.assert_array_equal(loaded.predict(targets), model.predict(targets))
    assert loaded.curve.rows() == model.curve.rows()



def test_learns_monotone_toy():
    schema = FeatureSchema(features=("x",), target="y")
    x = np.linspace(0.0, 1.0, 64)
    train = Dataset(x.reshape(-1, 1), x, schema=schema, normalized=True)
    held = np.linspace(0.01, 0.99, 17)
    val = Dataset(held.reshape(-1, 1), held, schema=schema, normalized=True)

    cfg = TrainConfig(epochs=300, batch_size=16, lr=1e-2, hidden_width=16, seed=2)
    net, curve = train_direct_inverse(train, val, cfg)
    assert curve.final_val < 5e-3
    np.testing.assert_allclose(net(held.reshape(-1, 1)).ravel(), held, atol=0.1)
