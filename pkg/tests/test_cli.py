"""Tests for the command-line interface."""

import json

import pytest
from typer.testing import CliRunner

from polidna import __version__
from polidna.cli import build_app

from .conftest import write_csv

runner = CliRunner()


@pytest.fixture(autouse=True)
def isolated(monkeypatch, tmp_path):
    """Keep user and working-directory config files out of the tests."""
    monkeypatch.chdir(tmp_path)
    monkeypatch.setattr("polidna.config.CONFIG_FILES", [tmp_path / ".polidna.yaml"])


def _input_args(dataset_dir):
    return [
        "--votes",
        str(dataset_dir / "votes.csv"),
        "--voters",
        str(dataset_dir / "voters.csv"),
        "--bills",
        str(dataset_dir / "bills.csv"),
    ]


def invoke(*args):
    return runner.invoke(build_app(), [str(a) for a in args])


class TestGlobalOptions:
    """Test options that apply to every command."""

    def test_version(self):
        """Test --version."""
        result = invoke("--version")

        assert result.exit_code == 0
        assert __version__ in result.output

    def test_help_lists_commands(self):
        """Test the top-level help."""
        result = invoke("--help")

        assert result.exit_code == 0
        for command in ("fit", "dna", "map", "outliers", "components", "sweep", "synth", "init-config"):
            assert command in result.output


class TestFit:
    """Test the fit command."""

    def test_writes_artifacts(self, dataset_dir, tmp_path):
        """Test a successful run."""
        result = invoke("fit", *_input_args(dataset_dir), "-o", tmp_path / "run")

        assert result.exit_code == 0, result.output
        assert (tmp_path / "run" / "map.svg").exists()
        assert json.loads((tmp_path / "run" / "manifest.json").read_text())["command"] == "fit"

    def test_dump_standardized_path(self, dataset_dir, tmp_path):
        """Test that --dump-standardized takes a CSV path."""
        result = invoke(
            "fit", *_input_args(dataset_dir), "-o", tmp_path / "run", "--dump-standardized", tmp_path / "x.csv"
        )

        assert result.exit_code == 0, result.output
        assert (tmp_path / "x.csv").read_text().startswith("voter_id,")
        assert not (tmp_path / "run" / "standardized.csv").exists()

    def test_k_too_large_exits_3(self, dataset_dir, tmp_path):
        """Test that numerical failures map to exit code 3."""
        result = invoke("-q", "fit", *_input_args(dataset_dir), "--k", 100, "-o", tmp_path / "run")

        assert result.exit_code == 3
        assert not (tmp_path / "run").exists()

    def test_missing_file_exits_2(self, dataset_dir, tmp_path):
        """Test that input failures map to exit code 2."""
        result = invoke(
            "fit",
            "--votes",
            tmp_path / "missing.csv",
            "--voters",
            dataset_dir / "voters.csv",
            "--bills",
            dataset_dir / "bills.csv",
        )
        assert result.exit_code == 2

    def test_malformed_vote_exits_2(self, dataset_dir, tmp_path):
        """Test a bad vote string."""
        write_csv(dataset_dir / "votes.csv", "voter_id,bill_id,vote\nv0001,b0001,Maybe\n")

        result = invoke("fit", *_input_args(dataset_dir), "-o", tmp_path / "run")
        assert result.exit_code == 2

    def test_no_input_exits_2(self):
        """Test running without a dataset."""
        assert invoke("fit").exit_code == 2

    def test_bad_lambda_exits_2(self, dataset_dir, tmp_path):
        """Test an invalid regularization flag."""
        result = invoke("fit", *_input_args(dataset_dir), "--lambda", "lots", "-o", tmp_path / "run")
        assert result.exit_code == 2

    def test_config_file_supplies_input(self, dataset_dir, tmp_path):
        """Test that the default config file is read."""
        (tmp_path / ".polidna.yaml").write_text(
            "input:\n"
            f"  votes: {dataset_dir / 'votes.csv'}\n"
            f"  voters: {dataset_dir / 'voters.csv'}\n"
            f"  bills: {dataset_dir / 'bills.csv'}\n"
            "reduction:\n  method: spca\n  k: 2\n  p: 5\n"
            f"output:\n  outdir: {tmp_path / 'from-config'}\n"
        )

        result = invoke("fit")

        assert result.exit_code == 0, result.output
        manifest = json.loads((tmp_path / "from-config" / "manifest.json").read_text())
        assert manifest["parameters"]["method"] == "spca"
        assert manifest["config_paths_used"] == [str(tmp_path / ".polidna.yaml")]


class TestOtherCommands:
    """Test dna, map, outliers, components and sweep."""

    def test_dna(self, dataset_dir):
        """Test the DNA table for one voter."""
        result = invoke("dna", *_input_args(dataset_dir), "--voter", "v0001", "--top", 2)

        assert result.exit_code == 0, result.output
        assert "v0001" in result.output

    def test_dna_unknown_voter(self, dataset_dir):
        """Test that an unknown voter is an input error."""
        assert invoke("dna", *_input_args(dataset_dir), "--voter", "v9999").exit_code == 2

    def test_map(self, dataset_dir, tmp_path):
        """Test the SVG map."""
        result = invoke("map", *_input_args(dataset_dir), "--map", tmp_path / "map.svg")

        assert result.exit_code == 0, result.output
        assert (tmp_path / "map.svg").read_text().lstrip().startswith("<?xml")

    def test_outliers(self, dataset_dir, tmp_path):
        """Test the outlier table and report."""
        result = invoke(
            "outliers", *_input_args(dataset_dir), "--k", 3, "--p", 8, "--report", tmp_path / "out.json"
        )

        assert result.exit_code == 0, result.output
        assert json.loads((tmp_path / "out.json").read_text())["p"] == 8

    def test_components_to_stdout(self, dataset_dir):
        """Test that components print as CSV."""
        result = invoke("components", *_input_args(dataset_dir))

        assert result.exit_code == 0, result.output
        assert result.stdout.startswith("bill_id,pc1,pc2")

    def test_sweep(self, dataset_dir, tmp_path):
        """Test the sweep table and CSV."""
        result = invoke("sweep", *_input_args(dataset_dir), "--ks", "1,2", "--ps", "4", "--out", tmp_path / "s.csv")

        assert result.exit_code == 0, result.output
        assert (tmp_path / "s.csv").exists()

    def test_sweep_bad_list(self, dataset_dir):
        """Test a non-integer list."""
        assert invoke("sweep", *_input_args(dataset_dir), "--ks", "two").exit_code == 2


class TestSynthAndInit:
    """Test dataset generation and config scaffolding."""

    def test_synth_then_fit(self, tmp_path):
        """Test that generated data feeds straight into fit."""
        result = invoke(
            "synth", "--groups", 3, "--sizes", 6, "--bills", 20, "--outliers", 1, "--seed", 3, "--out", tmp_path / "d"
        )
        assert result.exit_code == 0, result.output

        fit = invoke("fit", *_input_args(tmp_path / "d"), "-o", tmp_path / "run")
        assert fit.exit_code == 0, fit.output

    def test_synth_invalid_cohesion(self, tmp_path):
        """Test an out-of-range cohesion."""
        result = invoke("synth", "--groups", 2, "--cohesion", "0.2", "--out", tmp_path / "d")
        assert result.exit_code == 2

    def test_init_config(self, tmp_path):
        """Test writing and refusing to overwrite the example config."""
        assert invoke("init-config").exit_code == 0
        assert (tmp_path / ".polidna.yaml").exists()

        assert invoke("init-config").exit_code == 2
