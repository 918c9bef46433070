"""Tests for configuration management."""

import pytest
import yaml

from polidna.config import (
    create_example_config,
    find_config_file,
    load_config,
    load_yaml_file,
    merge_cli_config,
    parse_regularization,
    save_config_file,
    validate_config,
)
from polidna.models import DnaConfig
from polidna.utils import ConfigError


def _csv_config(**overrides) -> DnaConfig:
    config = DnaConfig(votes="votes.csv", voters="voters.csv", bills="bills.csv")
    return config.merge_cli_args(**overrides)


class TestLoadYamlFile:
    """Test YAML file loading."""

    def test_load_valid_yaml(self, tmp_path):
        """Test loading valid YAML file."""
        config_file = tmp_path / "config.yaml"
        config_data = {"reduction": {"method": "spca", "k": 3}}
        config_file.write_text(yaml.dump(config_data))

        assert load_yaml_file(config_file) == config_data

    def test_load_empty_yaml(self, tmp_path):
        """Test loading empty YAML file."""
        config_file = tmp_path / "config.yaml"
        config_file.write_text("")

        assert load_yaml_file(config_file) == {}

    def test_load_invalid_yaml(self, tmp_path):
        """Test loading invalid YAML file."""
        config_file = tmp_path / "config.yaml"
        config_file.write_text("reduction: [unclosed")

        with pytest.raises(ConfigError, match="Invalid YAML"):
            load_yaml_file(config_file)

    def test_load_nonexistent_file(self, tmp_path):
        """Test loading non-existent file."""
        with pytest.raises(ConfigError, match="Config file not found"):
            load_yaml_file(tmp_path / "nonexistent.yaml")

    def test_load_non_dict_yaml(self, tmp_path):
        """Test loading YAML that is not a mapping."""
        config_file = tmp_path / "config.yaml"
        config_file.write_text("- pca\n- spca\n")

        with pytest.raises(ConfigError, match="must contain a YAML object"):
            load_yaml_file(config_file)


class TestFindConfigFile:
    """Test config file finding logic."""

    def test_explicit_path_exists(self, tmp_path):
        """Test explicit path that exists."""
        config_file = tmp_path / "custom.yaml"
        config_file.write_text("reduction: {k: 2}")

        assert find_config_file(str(config_file)) == config_file

    def test_explicit_path_not_exists(self, tmp_path):
        """Test explicit path that doesn't exist."""
        with pytest.raises(ConfigError, match="Specified config file not found"):
            find_config_file(str(tmp_path / "nonexistent.yaml"))

    def test_no_config_files(self, monkeypatch, tmp_path):
        """Test when no config files exist."""
        monkeypatch.setattr(
            "polidna.config.CONFIG_FILES",
            [tmp_path / ".polidna.yaml", tmp_path / "config.yaml"],
        )

        assert find_config_file() is None

    def test_first_config_file_wins(self, monkeypatch, tmp_path):
        """Test that the local file takes precedence over the home file."""
        local = tmp_path / ".polidna.yaml"
        home = tmp_path / "config.yaml"
        local.write_text("reduction: {k: 2}")
        home.write_text("reduction: {k: 3}")

        monkeypatch.setattr("polidna.config.CONFIG_FILES", [local, home])

        assert find_config_file() == local


class TestLoadConfig:
    """Test configuration loading."""

    def test_load_with_explicit_path(self, tmp_path):
        """Test loading every section from an explicit path."""
        config_file = tmp_path / "custom.yaml"
        config_file.write_text(
            yaml.dump(
                {
                    "input": {"json": "senate.json"},
                    "reduction": {"method": "spca", "k": 10, "p": 50, "restarts": 3},
                    "gmm": {"regularization": 0.01, "uniform_priors": True, "merge_small_into": "Misto"},
                    "map": {"order": "M5S, PD, PdL"},
                    "outliers": {"k": 5, "p": 20},
                    "output": {"outdir": "runs"},
                }
            )
        )

        config, files_used = load_config(str(config_file))
        assert config.json == "senate.json"
        assert (config.method, config.k, config.p, config.restarts) == ("spca", 10, 50, 3)
        assert config.regularization == 0.01
        assert config.uniform_priors is True
        assert config.merge_small_into == "Misto"
        assert config.map_order == ["M5S", "PD", "PdL"]
        assert (config.outlier_k, config.outlier_p) == (5, 20)
        assert config.outdir == "runs"
        assert files_used == [str(config_file)]

    def test_load_with_default_location(self, monkeypatch, tmp_path):
        """Test loading config from default location."""
        config_file = tmp_path / ".polidna.yaml"
        config_file.write_text(yaml.dump({"reduction": {"k": 4}}))

        monkeypatch.setattr("polidna.config.CONFIG_FILES", [config_file])

        config, files_used = load_config()
        assert config.k == 4
        assert config.method == "pca"
        assert files_used == [str(config_file)]

    def test_load_no_config_file(self, monkeypatch, tmp_path):
        """Test loading when no config file exists."""
        monkeypatch.setattr("polidna.config.CONFIG_FILES", [tmp_path / "nonexistent.yaml"])

        config, files_used = load_config()
        assert config == DnaConfig()
        assert files_used == []

    def test_empty_section(self, tmp_path):
        """Test that a section with only comments counts as empty."""
        config_file = tmp_path / "c.yaml"
        config_file.write_text("map:\n  # order: [A, B]\nreduction:\n  k: 3\n")

        config, _ = load_config(str(config_file))
        assert config.map_order is None
        assert config.k == 3

    def test_unknown_section(self, tmp_path):
        """Test that misspelled sections are reported."""
        config_file = tmp_path / "c.yaml"
        config_file.write_text("reductions:\n  k: 3\n")

        with pytest.raises(ConfigError, match="unknown config section"):
            load_config(str(config_file))

    def test_invalid_default_file_is_an_error(self, monkeypatch, tmp_path):
        """Test that a broken default config is not silently skipped."""
        config_file = tmp_path / ".polidna.yaml"
        config_file.write_text("reduction: [unclosed")
        monkeypatch.setattr("polidna.config.CONFIG_FILES", [config_file])

        with pytest.raises(ConfigError):
            load_config()


class TestParseRegularization:
    """Test the lambda policy."""

    @pytest.mark.parametrize("value", ["auto", "AUTO", " auto "])
    def test_auto(self, value):
        """Test the automatic policy spellings."""
        assert parse_regularization(value) == "auto"

    @pytest.mark.parametrize("value,expected", [("0", 0.0), ("1e-4", 1e-4), (0.5, 0.5), (2, 2.0)])
    def test_numbers(self, value, expected):
        """Test fixed values."""
        assert parse_regularization(value) == expected

    @pytest.mark.parametrize("value", ["-1", "big", True])
    def test_invalid(self, value):
        """Test rejected values."""
        with pytest.raises(ConfigError):
            parse_regularization(value)


class TestValidateConfig:
    """Test configuration validation."""

    def test_valid_config(self):
        """Test validation of valid config."""
        validate_config(_csv_config())

    def test_json_input_is_enough(self):
        """Test the single-file form."""
        validate_config(DnaConfig(json="senate.json"))

    def test_invalid_method(self):
        """Test an unknown reduction."""
        with pytest.raises(ConfigError, match="method must be one of"):
            validate_config(_csv_config(method="ica"))

    @pytest.mark.parametrize("name", ["k", "p", "outlier_k", "outlier_p"])
    def test_non_positive_integers(self, name):
        """Test k, p and the outlier settings."""
        with pytest.raises(ConfigError, match=f"{name} must be a positive integer"):
            validate_config(_csv_config(**{name: 0}))

    def test_boolean_is_not_an_integer(self):
        """Test that YAML true is not accepted as k."""
        with pytest.raises(ConfigError):
            validate_config(_csv_config(k=True))

    def test_negative_restarts(self):
        """Test restarts below zero."""
        with pytest.raises(ConfigError, match="restarts"):
            validate_config(_csv_config(restarts=-1))

    def test_bad_regularization(self):
        """Test a lambda that is neither auto nor a number."""
        with pytest.raises(ConfigError, match="regularization"):
            validate_config(_csv_config(regularization="shrink"))

    def test_empty_outdir(self):
        """Test empty output directory."""
        with pytest.raises(ConfigError, match="outdir cannot be empty"):
            validate_config(_csv_config(outdir=""))

    def test_repeated_map_order(self):
        """Test a map order naming a group twice."""
        with pytest.raises(ConfigError, match="repeats"):
            validate_config(_csv_config(map_order=["A", "A"]))

    def test_missing_input(self):
        """Test that some dataset is required."""
        with pytest.raises(ConfigError, match="give json"):
            validate_config(DnaConfig(votes="votes.csv"))

    def test_input_optional_when_not_required(self):
        """Test commands that generate their own data."""
        validate_config(DnaConfig(), require_input=False)

    def test_mixed_input(self):
        """Test JSON and CSV together."""
        with pytest.raises(ConfigError, match="not both"):
            validate_config(_csv_config(json="senate.json"))


class TestMergeCliConfig:
    """Test CLI config merging."""

    def test_merge_all_options(self):
        """Test merging all CLI options."""
        merged = merge_cli_config(
            _csv_config(),
            cli_json="senate.json",
            cli_method="spca",
            cli_k=10,
            cli_p=50,
            cli_restarts=2,
            cli_regularization="0.01",
            cli_uniform_priors=True,
            cli_merge_small_into="Other",
            cli_map_order=["B", "A"],
            cli_outlier_k=4,
            cli_outlier_p=8,
            cli_outdir="./custom",
        )

        assert merged.json == "senate.json"
        assert merged.votes is None and merged.voters is None and merged.bills is None
        assert (merged.method, merged.k, merged.p, merged.restarts) == ("spca", 10, 50, 2)
        assert merged.regularization == 0.01
        assert merged.uniform_priors is True
        assert merged.merge_small_into == "Other"
        assert merged.map_order == ["B", "A"]
        assert (merged.outlier_k, merged.outlier_p) == (4, 8)
        assert merged.outdir == "./custom"

    def test_merge_partial_options(self):
        """Test that unset flags keep the file values."""
        base = _csv_config(k=5, regularization=0.1)
        merged = merge_cli_config(base, cli_p=7)

        assert merged.k == 5
        assert merged.p == 7
        assert merged.regularization == 0.1
        assert merged.votes == "votes.csv"

    def test_merge_no_options(self):
        """Test merging with no CLI options."""
        base = _csv_config()
        assert merge_cli_config(base) == base

    def test_cli_csv_replaces_file_json(self):
        """Test that CSV flags clear a JSON input from the file."""
        merged = merge_cli_config(DnaConfig(json="senate.json"), cli_votes="v.csv", cli_voters="p.csv", cli_bills="b.csv")

        assert merged.json is None
        assert merged.votes == "v.csv"

    def test_merge_does_not_mutate_base(self):
        """Test that the file config is left untouched."""
        base = DnaConfig(json="senate.json")
        merge_cli_config(base, cli_votes="v.csv")

        assert base.json == "senate.json"


class TestExampleConfig:
    """Test the generated example config."""

    def test_example_loads_and_validates(self, tmp_path):
        """Test that init-config output is a usable config."""
        path = tmp_path / "nested" / ".polidna.yaml"
        save_config_file(path)

        config, _ = load_config(str(path))
        validate_config(config)
        assert config.method == "pca"
        assert config.outlier_p == 50
        assert config.map_order is None

    def test_example_mentions_every_section(self):
        """Test the sections of the example."""
        text = create_example_config()
        for section in ("input:", "reduction:", "gmm:", "map:", "outliers:", "output:"):
            assert section in text
