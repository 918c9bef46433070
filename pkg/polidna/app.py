"""Application module for polidna: one entry point per sub-command."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path

import pandas as pd
from rich.console import Console

from . import __version__
from .config import load_config, merge_cli_config, validate_config
from .constants import BILLS_FILE, DATASET_JSON_FILE, MANIFEST_FILE, SWEEP_FILE, VOTERS_FILE, VOTES_FILE
from .core import PipelineExecutor, prepare_dataset, reduce
from .gmm import dna_readout, dump_dna, dump_model, find_dna
from .ingest import write_dataset
from .mapping import map_caption, render_map
from .models import ComponentBasis, DnaConfig, ExecutionContext, OutlierEntry, PipelineResult
from .outliers import OutlierAnalysis, outlier_analysis, outlier_report
from .pca import components_to_csv
from .preprocess import encode, standardize
from .spca import SweepRow, evar_sweep
from .synth import SyntheticBlocs, gen_blocs
from .utils import ArtifactStage, InvalidParameter, dumps_json, save_json_safely, save_text_safely

logger = logging.getLogger(__name__)


@dataclass
class OutlierRun:
    """Outlier analysis joined with DNA from the main pipeline."""

    analysis: OutlierAnalysis
    report: list[OutlierEntry]
    pipeline: PipelineResult

    def to_dict(self) -> dict:
        data = self.analysis.to_dict()
        data["dna_method"] = self.pipeline.basis.describe()
        data["outliers"] = [entry.to_dict() for entry in self.report]
        return data


@dataclass
class SynthRun:
    blocs: SyntheticBlocs
    artifacts: list[Path] = field(default_factory=list)


def resolve_config(
    config_path: str | None = None, require_input: bool = True, **cli_overrides
) -> tuple[DnaConfig, list[str]]:
    """Load the config file, apply ``cli_*`` overrides and validate."""
    config, config_files_used = load_config(config_path)
    config = merge_cli_config(config, **cli_overrides)
    validate_config(config, require_input=require_input)
    return config, config_files_used


def run_pipeline(
    config: DnaConfig,
    command: str = "fit",
    config_paths_used: list[str] | None = None,
    output_dir: str | Path | None = None,
    standardized_path: str | Path | None = None,
    quiet: bool = True,
    console: Console | None = None,
) -> PipelineResult:
    """Ingest, reduce, fit and map; with ``output_dir`` also publish the artifact set.

    ``standardized_path`` additionally receives the standardized vote matrix as CSV.

    Returns:
        PipelineResult with every intermediate product and the run manifest
    """
    context = ExecutionContext(
        config=config,
        command=command,
        config_paths_used=config_paths_used or [],
        output_dir=Path(output_dir) if output_dir is not None else None,
        standardized_path=Path(standardized_path) if standardized_path is not None else None,
        quiet=quiet,
    )
    executor = PipelineExecutor(context, console)
    result = executor.execute()
    executor.print_summary()
    return result


def run_dna(
    config: DnaConfig,
    voters: list[str] | None = None,
    top: int | None = None,
    dump_dna_path: str | Path | None = None,
    dump_model_path: str | Path | None = None,
) -> tuple[PipelineResult, dict[str, list[tuple[str, float]]]]:
    """DNA readouts for the requested voters (all voters when none are named)."""
    result = run_pipeline(config, command="dna")
    wanted = voters or [vector.voter_id for vector in result.dna]
    readouts = {voter_id: dna_readout(find_dna(result.dna, voter_id), top) for voter_id in wanted}
    if dump_dna_path is not None:
        dump_dna(result.dna, result.nominal, Path(dump_dna_path))
    if dump_model_path is not None:
        dump_model(result.model, Path(dump_model_path))
    return result, readouts


def run_map(config: DnaConfig, out: str | Path, format: str | None = None) -> PipelineResult:
    """Render the political map alone; the format follows the file suffix unless given."""
    out = Path(out)
    format = format or (out.suffix.lstrip(".").lower() or "svg")
    if format not in ("svg", "csv"):
        raise InvalidParameter(f"map: unknown format '{format}' (expected svg or csv)")
    result = run_pipeline(config, command="map")
    caption = map_caption(result.basis.describe(), result.expressed_variance)
    out.parent.mkdir(parents=True, exist_ok=True)
    render_map(result.points, result.layout, out, format, caption)
    result.artifacts = [out]
    return result


def run_outliers(
    config: DnaConfig,
    report_path: str | Path | None = None,
) -> OutlierRun:
    """Sparse PCA of the transposed vote matrix, joined with each outlier's DNA."""
    pipeline = run_pipeline(config, command="outliers")
    analysis = outlier_analysis(
        pipeline.dataset, config.outlier_k, config.outlier_p, restarts=config.restarts
    )
    report = outlier_report(analysis.profiles, pipeline.dna)
    run = OutlierRun(analysis=analysis, report=report, pipeline=pipeline)
    if report_path is not None:
        report_path = Path(report_path)
        report_path.parent.mkdir(parents=True, exist_ok=True)
        save_json_safely(run.to_dict(), report_path)
    return run


def run_components(config: DnaConfig, out: str | Path | None = None) -> tuple[ComponentBasis, str]:
    """Principal directions over bills; dense as a matrix, sparse as per-component listings."""
    dataset, _, _ = prepare_dataset(config)
    matrix = standardize(encode(dataset))
    basis = reduce(matrix, config)
    text = components_to_csv(basis, matrix.col_ids, dataset.bills)
    if out is not None:
        out = Path(out)
        out.parent.mkdir(parents=True, exist_ok=True)
        save_text_safely(text, out)
    return basis, text


def run_sweep(
    config: DnaConfig,
    ks: list[int],
    ps: list[int],
    out: str | Path | None = None,
) -> list[SweepRow]:
    """E-Var of dense and sparse PCA over a grid of k and p."""
    dataset, _, _ = prepare_dataset(config)
    matrix = standardize(encode(dataset))
    rows = evar_sweep(matrix, ks, ps, restarts=config.restarts)
    if out is not None:
        out = Path(out)
        if out.is_dir():
            out = out / SWEEP_FILE
        out.parent.mkdir(parents=True, exist_ok=True)
        frame = pd.DataFrame(
            [(row.method, row.k, row.p, row.expressed_variance) for row in rows],
            columns=["method", "k", "p", "expressed_variance"],
        )
        frame["p"] = frame["p"].astype("Int64")
        save_text_safely(frame.to_csv(index=False, float_format="%.12g", lineterminator="\n"), out)
    return rows


def run_synth(
    out: str | Path,
    n_groups: int,
    sizes: list[int],
    n_bills: int,
    cohesion: float | list[float],
    n_outliers: int,
    seed: int,
    format: str = "csv",
) -> SynthRun:
    """Generate a bloc dataset into ``out`` together with a manifest naming the plants."""
    blocs = gen_blocs(n_groups, sizes, n_bills, cohesion, n_outliers, seed)
    stage = ArtifactStage(Path(out))
    try:
        if format == "json":
            write_dataset(blocs.dataset, stage.file(DATASET_JSON_FILE), "json")
        elif format == "csv":
            for name in (VOTERS_FILE, BILLS_FILE, VOTES_FILE):
                stage.file(name)
            write_dataset(blocs.dataset, stage.path, "csv")
        else:
            raise InvalidParameter(f"synth: unknown format '{format}' (expected csv or json)")
        manifest = {
            "command": "synth",
            "version": __version__,
            "generator": "numpy Philox, SeedSequence([seed, bill, attempt])",
            "parameters": {
                "groups": n_groups,
                "sizes": list(sizes),
                "bills": n_bills,
                "cohesion": cohesion,
                "outliers": n_outliers,
                "seed": seed,
                "format": format,
            },
            "planted": [
                {"voter_id": voter_id, "votes_with": group}
                for voter_id, group in sorted(blocs.planted.items())
            ],
        }
        save_text_safely(dumps_json(manifest), stage.file(MANIFEST_FILE))
    except BaseException:
        stage.discard()
        raise
    return SynthRun(blocs=blocs, artifacts=stage.publish())
