"""Core execution engine for polidna: ingest, reduce, fit, map and write the artifact set."""

from __future__ import annotations

import logging
from pathlib import Path

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

from . import __version__
from .config import parse_regularization
from .constants import (
    COMPONENTS_FILE,
    DNA_FILE,
    MANIFEST_FILE,
    MAP_CSV_FILE,
    MAP_SVG_FILE,
    MODEL_FILE,
)
from .gmm import dna_all, dump_dna, dump_model, gmm_fit
from .ingest import clean_dataset_report, group_assignment, merge_small_groups, parse_csv_files, parse_json_file
from .mapping import layout_groups, map_caption, map_points, render_map
from .models import (
    CleaningReport,
    ComponentBasis,
    DnaConfig,
    ExecutionContext,
    PipelineResult,
    RunManifest,
    StandardizedMatrix,
    VoteDataset,
)
from .pca import components_to_csv, expressed_variance, pca_fit, project
from .preprocess import dump_standardized, encode, standardize
from .spca import spca_fit
from .utils import ArtifactStage, ConfigError, format_percent, save_json_safely, save_text_safely, sha256_file

logger = logging.getLogger(__name__)


def input_paths(config: DnaConfig) -> dict[str, Path]:
    """Input files named by the config, keyed by role."""
    if config.json:
        return {"json": Path(config.json)}
    if config.votes and config.voters and config.bills:
        return {"votes": Path(config.votes), "voters": Path(config.voters), "bills": Path(config.bills)}
    raise ConfigError("input: give json, or all of votes, voters and bills")


def load_dataset(config: DnaConfig) -> tuple[VoteDataset, dict[str, str]]:
    """Parse the configured input; returns the dataset and the SHA-256 of every input file."""
    paths = input_paths(config)
    if "json" in paths:
        dataset = parse_json_file(paths["json"])
    else:
        dataset = parse_csv_files(paths["votes"], paths["voters"], paths["bills"])
    digests = {role: sha256_file(path) for role, path in paths.items()}
    return dataset, digests


def prepare_dataset(config: DnaConfig) -> tuple[VoteDataset, CleaningReport, dict[str, str]]:
    """Load, clean, and fold small groups when configured."""
    dataset, digests = load_dataset(config)
    report = clean_dataset_report(dataset)
    dataset = report.dataset
    if config.merge_small_into:
        dataset = merge_small_groups(dataset, config.merge_small_into)
    logger.info(
        "dataset: %d voters, %d bills, %d groups after cleaning",
        dataset.n_voters,
        dataset.n_bills,
        len(dataset.groups),
    )
    return dataset, report, digests


def reduce(matrix: StandardizedMatrix, config: DnaConfig) -> ComponentBasis:
    """Dense or sparse principal directions, as configured."""
    if config.method == "spca":
        return spca_fit(matrix, config.k, config.p, restarts=config.restarts)
    return pca_fit(matrix, config.k)


class PipelineExecutor:
    """Runs the full inference procedure and publishes its artifacts together."""

    def __init__(self, context: ExecutionContext, console: Console | None = None):
        self.context = context
        self.console = console or Console()
        self.result: PipelineResult | None = None

    def execute(self) -> PipelineResult:
        config = self.context.config
        dataset, report, digests = prepare_dataset(config)

        matrix = standardize(encode(dataset))
        basis = reduce(matrix, config)
        evar = expressed_variance(matrix, basis)
        projected = project(matrix, basis)

        model = gmm_fit(
            projected,
            group_assignment(dataset),
            regularization=parse_regularization(config.regularization),
            uniform_priors=config.uniform_priors,
        )
        dna = dna_all(model, projected)

        layout = layout_groups(dataset.groups, config.map_order)
        nominal = {voter.voter_id: voter.group for voter in dataset.voters}
        points = map_points(layout, dna, nominal)

        manifest = self._build_manifest(report, digests, basis, model.regularization, evar, layout.groups)
        self.result = PipelineResult(
            dataset=dataset,
            cleaning=report,
            matrix=matrix,
            basis=basis,
            projected=projected,
            model=model,
            dna=dna,
            layout=layout,
            points=points,
            expressed_variance=evar,
            manifest=manifest,
        )
        standardized_path = self.context.standardized_path
        if standardized_path is not None:
            dump_standardized(matrix, standardized_path)
        if self.context.output_dir is not None:
            self.result.artifacts = self._save_artifacts(self.result)
        if standardized_path is not None:
            self.result.artifacts.append(standardized_path)
        return self.result

    def _build_manifest(
        self,
        report: CleaningReport,
        digests: dict[str, str],
        basis: ComponentBasis,
        regularization: float,
        evar: float,
        map_order: tuple[str, ...],
    ) -> RunManifest:
        config = self.context.config
        resolved = config.to_dict()
        # identical runs into different directories must produce identical manifests
        resolved.pop("output", None)
        return RunManifest(
            command=self.context.command,
            version=__version__,
            config=resolved,
            input_digests=digests,
            config_paths_used=list(self.context.config_paths_used),
            cleaning=report.to_dict(),
            parameters={
                "method": config.method,
                "k": config.k,
                "p": config.p if config.method == "spca" else None,
                "restarts": config.restarts if config.method == "spca" else None,
                "regularization_policy": config.regularization,
                "regularization": regularization,
                "uniform_priors": config.uniform_priors,
                "merge_small_into": config.merge_small_into,
                "map_order": list(map_order),
            },
            results={
                "expressed_variance": evar,
                "singular_values": basis.singular_values.tolist(),
                "converged": list(basis.converged),
                "voters": report.dataset.n_voters,
                "bills": report.dataset.n_bills,
            },
        )

    def _save_artifacts(self, result: PipelineResult) -> list[Path]:
        """Stage every artifact, then move the complete set into the output directory."""
        assert self.context.output_dir is not None
        stage = ArtifactStage(self.context.output_dir)
        try:
            nominal = result.nominal
            dump_dna(result.dna, nominal, stage.file(DNA_FILE))
            dump_model(result.model, stage.file(MODEL_FILE))
            caption = map_caption(result.basis.describe(), result.expressed_variance)
            render_map(result.points, result.layout, stage.file(MAP_SVG_FILE), "svg", caption)
            render_map(result.points, result.layout, stage.file(MAP_CSV_FILE), "csv")
            save_text_safely(
                components_to_csv(result.basis, result.matrix.col_ids, result.dataset.bills),
                stage.file(COMPONENTS_FILE),
            )
            manifest_path = stage.file(MANIFEST_FILE)
            result.manifest.artifacts = sorted(stage.files)
            save_json_safely(result.manifest.to_dict(), manifest_path)
        except BaseException:
            stage.discard()
            raise
        return stage.publish()

    def print_summary(self) -> None:
        """Print execution summary."""
        if self.context.quiet or self.result is None:
            return
        result = self.result

        table = Table(show_header=False, box=None, pad_edge=False)
        table.add_column(style="bold")
        table.add_column()
        table.add_row("Voters", str(result.dataset.n_voters))
        table.add_row("Bills", str(result.dataset.n_bills))
        table.add_row("Groups", ", ".join(result.dataset.groups))
        table.add_row("Reduction", result.basis.describe())
        table.add_row("E-Var", format_percent(result.expressed_variance))
        table.add_row("Regularization", f"{result.model.regularization:g}")
        if self.context.output_dir is not None:
            table.add_row("Artifacts", str(self.context.output_dir))

        self.console.print(Panel(table, title="Political DNA", style="green"))
