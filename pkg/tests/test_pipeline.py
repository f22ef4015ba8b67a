"""Tests for split construction, per-run evaluation and full runs."""

import numpy as np
from conftest import identity_net

from steelinv.baselines import ForestModel, ForestParams
from steelinv.eval import Protocol, Split, read_metrics_csv
from steelinv.pipeline import evaluate_models, make_splits, run_experiment, run_pipeline
from steelinv.training import load_fit_record, load_inverse_model


def test_split_sizes(raw_data, fast_config):
    splits = make_splits(raw_data, fast_config)
    assert (len(splits.test), len(splits.val), len(splits.train)) == (40, 16, 144)


def test_splits_normalized_on_train(splits):
    assert splits.train.features.min() == 0.0
    assert splits.train.features.max() == 1.0
    assert splits.scaler.n_features == 13


def test_splits_disjoint(raw_data, fast_config):
    splits = make_splits(raw_data, fast_config)
    rows = [
        {tuple(r) for r in splits.scaler.inverse_features(part.features).round(9)}
        for part in (splits.train, splits.val, splits.test)
    ]
    assert not (rows[0] & rows[1]) and not (rows[0] & rows[2]) and not (rows[1] & rows[2])


def test_splits_seeded(raw_data, fast_config):
    a = make_splits(raw_data, fast_config)
    b = make_splits(raw_data, fast_config)
    assert np.array_equal(a.test.features, b.test.features)


def test_evaluate_models_entries(splits, fast_config):
    forest = ForestModel(splits.scaler, ForestParams(n_trees=2, max_depth=3, seed=0))
    forest.fit(splits.train, splits.val)
    entries = evaluate_models([forest], identity_net(13, pick=0), splits, fast_config)

    keys = [(name, m.protocol, m.split) for name, m in entries]
    assert keys[:2] == [("teacher", Protocol.FORWARD, Split.TRAIN),
                        ("teacher", Protocol.FORWARD, Split.TEST)]
    assert len(keys) == 2 + 5
    assert ("random_forest", Protocol.FUNCTIONAL, Split.FRESH) in keys
    assert ("random_forest", Protocol.INPUT_SPACE, Split.TEST) in keys
    fresh = dict(((n, m.split), m) for n, m in entries if m.protocol is Protocol.FUNCTIONAL)
    assert fresh[("random_forest", Split.FRESH)].n == fast_config.eval.fresh_targets


def test_run_experiment(tmp_path, fast_config):
    artifacts = run_experiment(fast_config, tmp_path / "seed_7")
    names = {name for name, _, _ in read_metrics_csv(artifacts.metrics_path)}
    assert names == {"teacher", "teacher_student", "random_forest", "mlp_baseline", "td3"}
    assert artifacts.config_digest == fast_config.digest

    pair = load_inverse_model(tmp_path / "seed_7" / "pair.json")
    assert pair.name == "teacher_student"
    assert load_fit_record(tmp_path / "seed_7" / "pair.json").wall_time_s >= 0.0
    assert "wall_time_s" not in (tmp_path / "seed_7" / "pair.json").read_text()


def test_run_pipeline_two_seeds(tmp_path, fast_config):
    report = run_pipeline(fast_config, [1, 2], tmp_path, redact_timing=True)
    assert {r.seed for r in report.rows} == {1, 2}
    assert (tmp_path / "seed_1" / "metrics.csv").exists()
    assert (tmp_path / "report.csv").exists()
    assert report.best() is not None
