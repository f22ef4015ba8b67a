"""Tests for run configuration loading, overrides and seed derivation."""

import pytest
import yaml

from steelinv.config import (
    SEED_OFFSETS,
    RunConfig,
    load_run_config,
    parse_override,
    run_config_from_dict,
    save_run_config,
)
from steelinv.errors import ConfigError


class TestDefaults:
    def test_values(self):
        cfg = RunConfig()
        assert (cfg.seed, cfg.kernel, cfg.threads) == (42, "ordered", 1)
        assert cfg.direct.epochs == 1000
        assert cfg.eval.fresh_targets == 1000

    def test_seeds_derived_from_master(self):
        cfg = RunConfig(seed=10)
        for section, offset in SEED_OFFSETS.items():
            assert getattr(cfg, section).seed == 10 + offset

    def test_section_seed_is_not_settable(self):
        cfg = run_config_from_dict({"seed": 5, "teacher": {"seed": 999}})
        assert cfg.teacher.seed == 6

    def test_offsets_distinct(self):
        assert len(set(SEED_OFFSETS.values())) == len(SEED_OFFSETS)


class TestValidation:
    def test_unknown_section_key(self):
        with pytest.raises(ConfigError, match="teacher.epoch"):
            run_config_from_dict({"teacher": {"epoch": 3}})

    def test_unknown_top_level_key(self):
        with pytest.raises(ConfigError) as e:
            run_config_from_dict({"sed": 1})
        assert e.value.key == "sed"

    @pytest.mark.parametrize("data, key", [
        ({"teacher": {"epochs": "many"}}, "teacher.epochs"),
        ({"teacher": {"epochs": 2.5}}, "teacher.epochs"),
        ({"td3": {"tau": "fast"}}, "td3.tau"),
        ({"forest": {"bootstrap": 1}}, "forest.bootstrap"),
        ({"seed": True}, "seed"),
    ])
    def test_wrong_types(self, data, key):
        with pytest.raises(ConfigError) as e:
            run_config_from_dict(data)
        assert e.value.key == key

    def test_section_must_be_mapping(self):
        with pytest.raises(ConfigError, match="td3"):
            run_config_from_dict({"td3": 5})

    def test_section_value_rules(self):
        with pytest.raises(ConfigError, match="teacher"):
            run_config_from_dict({"teacher": {"lr": -1.0}})

    @pytest.mark.parametrize("value", [0.0, 1.0, 1.5])
    def test_bad_fractions(self, value):
        with pytest.raises(ConfigError, match="test_fraction"):
            run_config_from_dict({"test_fraction": value})

    def test_bad_kernel(self):
        with pytest.raises(ConfigError, match="kernel"):
            RunConfig(kernel="gpu")

    def test_unknown_element_range(self):
        with pytest.raises(ConfigError, match="synth.composition_ranges.Xx"):
            run_config_from_dict({"synth": {"composition_ranges": {"Xx": [0, 1]}}})


class TestCoercion:
    def test_exponent_string(self):
        # YAML 1.1 reads 1e-3 as a string
        cfg = run_config_from_dict(yaml.safe_load("teacher:\n  lr: 1e-3\n"))
        assert cfg.teacher.lr == 0.001

    def test_int_for_float(self):
        assert run_config_from_dict({"synth": {"noise_std": 1}}).synth.noise_std == 1.0

    def test_partial_ranges_keep_defaults(self):
        cfg = run_config_from_dict({"synth": {"composition_ranges": {"C": [0.2, 0.4]}}})
        assert cfg.synth.composition_ranges["C"] == (0.2, 0.4)
        assert len(cfg.synth.composition_ranges) == len(RunConfig().synth.composition_ranges)


class TestOverrides:
    def test_parse(self):
        assert parse_override("td3.total_steps=500") == ("td3.total_steps", 500)
        assert parse_override("kernel = blas") == ("kernel", "blas")

    @pytest.mark.parametrize("text", ["teacher.epochs", "=3"])
    def test_parse_malformed(self, text):
        with pytest.raises(ConfigError):
            parse_override(text)

    def test_precedence(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("seed: 1\nteacher:\n  epochs: 10\n  lr: 0.01\n")
        cfg = load_run_config(path, ["teacher.epochs=20", "seed=2"], seed=3)
        assert cfg.teacher.epochs == 20
        assert cfg.teacher.lr == 0.01
        assert cfg.seed == 3
        assert cfg.teacher.seed == 4

    def test_none_flags_skipped(self):
        assert load_run_config(None, [], seed=None, kernel=None).seed == 42

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="does not exist"):
            load_run_config(tmp_path / "nope.yaml")

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text("teacher: [1, 2\n")
        with pytest.raises(ConfigError, match="invalid YAML"):
            load_run_config(path)

    def test_toml_rejected(self, tmp_path):
        path = tmp_path / "run.toml"
        path.write_text("seed = 3\n")
        with pytest.raises(ConfigError, match="TOML is not read"):
            load_run_config(path)

    def test_override_below_scalar(self):
        with pytest.raises(ConfigError):
            load_run_config(None, ["seed=1", "seed.x=2"])


class TestPersistence:
    def test_save_load_round_trip(self, tmp_path, fast_config):
        cfg = fast_config
        loaded = load_run_config(save_run_config(cfg, tmp_path / "run.yaml"))
        assert loaded.digest == cfg.digest
        assert loaded.to_dict() == cfg.to_dict()

    def test_digest_ignores_output_dir(self):
        a = RunConfig(output_dir="a")
        b = RunConfig(output_dir="b")
        assert a.digest == b.digest
        assert RunConfig(seed=1).digest != a.digest
