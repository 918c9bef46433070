"""Tests for the application entry points."""

import json

import numpy as np
import pandas as pd
import pytest

from polidna import __version__
from polidna.app import (
    resolve_config,
    run_components,
    run_dna,
    run_map,
    run_outliers,
    run_pipeline,
    run_sweep,
    run_synth,
)
from polidna.ingest import parse_dataset
from polidna.mapping import read_map_csv
from polidna.utils import ConfigError, InvalidParameter, KTooLarge, VoterNotFound

ARTIFACTS = ["components.csv", "dna.csv", "manifest.json", "map.csv", "map.svg", "model.json"]


class TestResolveConfig:
    """Test config resolution from file plus flags."""

    def test_flags_only(self, monkeypatch, tmp_path, dataset_dir):
        """Test resolution without any config file."""
        monkeypatch.setattr("polidna.config.CONFIG_FILES", [tmp_path / "none.yaml"])

        config, used = resolve_config(
            cli_votes=str(dataset_dir / "votes.csv"),
            cli_voters=str(dataset_dir / "voters.csv"),
            cli_bills=str(dataset_dir / "bills.csv"),
            cli_k=3,
        )
        assert config.k == 3
        assert used == []

    def test_missing_input(self, monkeypatch, tmp_path):
        """Test that a dataset is required."""
        monkeypatch.setattr("polidna.config.CONFIG_FILES", [tmp_path / "none.yaml"])

        with pytest.raises(ConfigError):
            resolve_config()


class TestRunPipeline:
    """Test the full pipeline."""

    def test_in_memory_result(self, dataset_config, blocs):
        """Test that every product is present and consistent."""
        result = run_pipeline(dataset_config)

        assert result.artifacts == []
        assert len(result.dna) == blocs.dataset.n_voters
        assert result.layout.groups == ("G1", "G2", "G3")
        assert 0.0 < result.expressed_variance <= 1.0
        for vector in result.dna:
            assert vector.weights.sum() == pytest.approx(1.0)
        assert result.get_dna("v0001") is result.dna[0]
        assert result.get_dna("nobody") is None

    def test_artifacts(self, dataset_config, tmp_path):
        """Test the published artifact set and the manifest."""
        result = run_pipeline(dataset_config, output_dir=tmp_path / "run")

        assert sorted(p.name for p in result.artifacts) == ARTIFACTS
        manifest = json.loads((tmp_path / "run" / "manifest.json").read_text())
        assert manifest["command"] == "fit"
        assert manifest["version"] == __version__
        assert manifest["artifacts"] == ARTIFACTS
        assert manifest["parameters"]["method"] == "pca"
        assert manifest["parameters"]["regularization_policy"] == "auto"
        assert set(manifest["input_digests"]) == {"votes", "voters", "bills"}
        assert "output" not in manifest["config"]
        assert manifest["results"]["expressed_variance"] == pytest.approx(result.expressed_variance)

        dna = pd.read_csv(tmp_path / "run" / "dna.csv")
        assert list(dna.columns) == ["voter_id", "nominal_group", "G1", "G2", "G3"]
        np.testing.assert_allclose(dna[["G1", "G2", "G3"]].sum(axis=1), 1.0, atol=1e-5)

    def test_dump_standardized(self, dataset_config, tmp_path):
        """Test that the standardized matrix goes to its own path, outside the artifact set."""
        path = tmp_path / "dumps" / "x.csv"
        path.parent.mkdir()
        result = run_pipeline(dataset_config, output_dir=tmp_path / "run", standardized_path=path)

        assert result.artifacts[-1] == path
        frame = pd.read_csv(path, index_col="voter_id")
        assert frame.shape == result.matrix.shape
        assert list(frame.index) == list(result.matrix.row_ids)
        assert sorted(p.name for p in (tmp_path / "run").iterdir()) == ARTIFACTS

    def test_dump_standardized_without_outdir(self, dataset_config, tmp_path):
        """Test the dump on an in-memory run."""
        result = run_pipeline(dataset_config, standardized_path=tmp_path / "x.csv")

        assert result.artifacts == [tmp_path / "x.csv"]
        assert (tmp_path / "x.csv").read_text().startswith("voter_id,")

    def test_runs_are_byte_identical(self, dataset_config, tmp_path):
        """Test that re-running into another directory reproduces every byte."""
        run_pipeline(dataset_config, output_dir=tmp_path / "a")
        run_pipeline(dataset_config, output_dir=tmp_path / "b")

        for name in ARTIFACTS:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes(), name

    def test_sparse_method(self, dataset_config, tmp_path):
        """Test the sparse reduction end to end."""
        config = dataset_config.merge_cli_args(method="spca", k=2, p=5)
        result = run_pipeline(config, output_dir=tmp_path / "run")

        assert result.basis.kind == "sparse"
        assert all(s.size <= 5 for s in result.basis.supports)
        components = (tmp_path / "run" / "components.csv").read_text().splitlines()
        assert components[0] == "component,bill_id,loading,date,description"

    def test_k_too_large_leaves_no_artifacts(self, dataset_config, tmp_path):
        """Test that a failed run publishes nothing."""
        with pytest.raises(KTooLarge):
            run_pipeline(dataset_config.merge_cli_args(k=100), output_dir=tmp_path / "run")

        assert not (tmp_path / "run").exists()
        assert list(tmp_path.glob(".polidna-staging-*")) == []

    def test_map_order(self, dataset_config):
        """Test a custom polygon order."""
        result = run_pipeline(dataset_config.merge_cli_args(map_order=["G3", "G1", "G2"]))
        assert result.layout.groups == ("G3", "G1", "G2")


class TestCommands:
    """Test the per-command entry points."""

    def test_run_dna(self, dataset_config, tmp_path):
        """Test readouts and dumps."""
        result, readouts = run_dna(
            dataset_config,
            voters=["v0001", "v0009"],
            top=2,
            dump_dna_path=tmp_path / "dna.csv",
            dump_model_path=tmp_path / "model.json",
        )

        assert list(readouts) == ["v0001", "v0009"]
        assert all(len(readout) == 2 for readout in readouts.values())
        assert (tmp_path / "dna.csv").exists()
        assert json.loads((tmp_path / "model.json").read_text())["groups"] == ["G1", "G2", "G3"]

    def test_run_dna_unknown_voter(self, dataset_config):
        """Test a voter that is not in the dataset."""
        with pytest.raises(VoterNotFound):
            run_dna(dataset_config, voters=["v9999"])

    def test_run_map_csv(self, dataset_config, tmp_path):
        """Test the map in CSV form, format taken from the suffix."""
        result = run_map(dataset_config, tmp_path / "maps" / "map.csv")

        points = read_map_csv(tmp_path / "maps" / "map.csv")
        assert len(points) == len(result.points)

    def test_run_map_unknown_format(self, dataset_config, tmp_path):
        """Test an unsupported suffix."""
        with pytest.raises(InvalidParameter):
            run_map(dataset_config, tmp_path / "map.png")

    def test_run_outliers(self, dataset_config, tmp_path):
        """Test the outlier report file."""
        config = dataset_config.merge_cli_args(outlier_k=3, outlier_p=8)
        run = run_outliers(config, report_path=tmp_path / "outliers.json")

        report = json.loads((tmp_path / "outliers.json").read_text())
        assert report["k"] == 3
        assert report["p"] == 8
        assert len(report["components"]) == 3
        assert len(report["outliers"]) == len(run.report)
        assert report["dna_method"] == "PCA, k=2"

    def test_run_components(self, dataset_config, tmp_path):
        """Test the dense components CSV."""
        basis, text = run_components(dataset_config, tmp_path / "components.csv")

        assert basis.k == 2
        assert text.splitlines()[0] == "bill_id,pc1,pc2"
        assert (tmp_path / "components.csv").read_text() == text

    def test_run_sweep(self, dataset_config, tmp_path):
        """Test the E-Var table."""
        rows = run_sweep(dataset_config, [1, 2], [4], tmp_path / "sweep.csv")

        assert len(rows) == 4
        frame = pd.read_csv(tmp_path / "sweep.csv")
        assert list(frame.columns) == ["method", "k", "p", "expressed_variance"]
        assert frame["p"].isna().sum() == 2


class TestRunSynth:
    """Test dataset generation to disk."""

    def test_csv_dataset_and_manifest(self, tmp_path):
        """Test that the written dataset parses back and names its plants."""
        run = run_synth(tmp_path / "data", 3, [6, 6, 6], 20, 0.9, 2, 7)

        assert sorted(p.name for p in run.artifacts) == ["bills.csv", "manifest.json", "voters.csv", "votes.csv"]
        assert parse_dataset(tmp_path / "data", "csv") == run.blocs.dataset
        manifest = json.loads((tmp_path / "data" / "manifest.json").read_text())
        assert manifest["parameters"]["seed"] == 7
        assert manifest["planted"] == [
            {"voter_id": "v0006", "votes_with": "G2"},
            {"voter_id": "v0012", "votes_with": "G3"},
        ]

    def test_json_dataset(self, tmp_path):
        """Test the single-file form."""
        run = run_synth(tmp_path / "data", 2, [4, 4], 10, 0.8, 0, 1, format="json")

        assert parse_dataset(tmp_path / "data" / "dataset.json", "json") == run.blocs.dataset

    def test_unknown_format(self, tmp_path):
        """Test that nothing is left behind on a bad format."""
        with pytest.raises(InvalidParameter):
            run_synth(tmp_path / "data", 2, [4, 4], 10, 0.8, 0, 1, format="xml")

        assert list(tmp_path.iterdir()) == []
