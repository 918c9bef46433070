"""Command-line interface for polidna."""

import logging
import sys
from pathlib import Path

import typer
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from . import __version__
from .app import (
    resolve_config,
    run_components,
    run_dna,
    run_map,
    run_outliers,
    run_pipeline,
    run_sweep,
    run_synth,
)
from .config import save_config_file
from .constants import (
    BILLS_HELP,
    CLI_DESCRIPTION,
    COMPONENTS_OUT_HELP,
    CONFIG_FILES,
    CONFIG_HELP,
    DUMP_DNA_HELP,
    DUMP_MODEL_HELP,
    DUMP_STANDARDIZED_HELP,
    EXIT_FAILURE,
    EXIT_OK,
    INIT_CONFIG_HELP,
    JSON_HELP,
    K_HELP,
    KS_HELP,
    LAMBDA_HELP,
    MAP_FORMAT_HELP,
    MAP_ORDER_HELP,
    MAP_OUT_HELP,
    MERGE_SMALL_HELP,
    OUTDIR_HELP,
    OUTLIER_K_HELP,
    OUTLIER_P_HELP,
    P_HELP,
    PS_HELP,
    QUIET_HELP,
    REDUCE_HELP,
    REPORT_HELP,
    RESTARTS_HELP,
    SUCCESS_ARTIFACTS,
    SWEEP_OUT_HELP,
    SYNTH_BILLS_HELP,
    SYNTH_COHESION_HELP,
    SYNTH_FORMAT_HELP,
    SYNTH_GROUPS_HELP,
    SYNTH_OUT_HELP,
    SYNTH_OUTLIERS_HELP,
    SYNTH_SEED_HELP,
    SYNTH_SIZES_HELP,
    TOP_HELP,
    UNIFORM_PRIORS_HELP,
    VERBOSE_HELP,
    VERSION_HELP,
    VOTER_HELP,
    VOTERS_HELP,
    VOTES_HELP,
)
from .utils import (
    ConfigError,
    InputError,
    InvalidParameter,
    NumericalError,
    PolidnaError,
    format_percent,
    parse_csv_list,
    parse_int_list,
)

console = Console()
err_console = Console(stderr=True)

# Options shared by every command that reads a dataset
CONFIG_OPTION = typer.Option(None, "-c", "--config", help=CONFIG_HELP)
VOTES_OPTION = typer.Option(None, "--votes", help=VOTES_HELP)
VOTERS_OPTION = typer.Option(None, "--voters", help=VOTERS_HELP)
BILLS_OPTION = typer.Option(None, "--bills", help=BILLS_HELP)
JSON_OPTION = typer.Option(None, "--json", help=JSON_HELP)
REDUCE_OPTION = typer.Option(None, "--reduce", help=REDUCE_HELP)
K_OPTION = typer.Option(None, "--k", help=K_HELP)
P_OPTION = typer.Option(None, "--p", help=P_HELP)
RESTARTS_OPTION = typer.Option(None, "--restarts", help=RESTARTS_HELP)
LAMBDA_OPTION = typer.Option(None, "--lambda", help=LAMBDA_HELP)
UNIFORM_PRIORS_OPTION = typer.Option(None, "--uniform-priors/--frequency-priors", help=UNIFORM_PRIORS_HELP)
MERGE_SMALL_OPTION = typer.Option(None, "--merge-small-into", help=MERGE_SMALL_HELP)
MAP_ORDER_OPTION = typer.Option(None, "--map-order", help=MAP_ORDER_HELP)


def version_callback(value: bool):
    """Show version and exit."""
    if value:
        console.print(f"polidna {__version__}")
        raise typer.Exit()


def configure_logging(verbose: bool, quiet: bool) -> None:
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.WARNING
    logging.basicConfig(
        level=level,
        format="%(message)s",
        handlers=[RichHandler(console=err_console, show_time=False, show_path=False)],
        force=True,
    )


def report_error(error: BaseException, quiet: bool) -> int:
    """Print an error the way the user should see it and return the exit code."""
    if isinstance(error, ConfigError):
        err_console.print(f"[red]Configuration error:[/red] {error}")
    elif isinstance(error, InputError):
        err_console.print(f"[red]Input error:[/red] {error}")
    elif isinstance(error, NumericalError):
        err_console.print(f"[red]Numerical error:[/red] {type(error).__name__}: {error}")
    else:
        err_console.print(f"[red]Unexpected error:[/red] {error}")
        if not quiet:
            import traceback

            err_console.print(f"[dim]{traceback.format_exc()}[/dim]")
    if isinstance(error, PolidnaError):
        return error.exit_code
    return EXIT_FAILURE


def _quiet(ctx: typer.Context) -> bool:
    return bool(ctx.obj and ctx.obj.get("quiet"))


def _config(config_path, votes, voters, bills, json_path, **overrides):
    return resolve_config(
        config_path,
        cli_votes=votes,
        cli_voters=voters,
        cli_bills=bills,
        cli_json=json_path,
        **overrides,
    )


def main(
    ctx: typer.Context,
    verbose: bool = typer.Option(False, "-v", "--verbose", help=VERBOSE_HELP),
    quiet: bool = typer.Option(False, "-q", "--quiet", help=QUIET_HELP),
    version: bool = typer.Option(
        False, "--version", callback=version_callback, is_eager=True, help=VERSION_HELP
    ),
) -> None:
    configure_logging(verbose, quiet)
    ctx.obj = {"quiet": quiet, "verbose": verbose}


def fit(
    ctx: typer.Context,
    config_path: str | None = CONFIG_OPTION,
    votes: str | None = VOTES_OPTION,
    voters: str | None = VOTERS_OPTION,
    bills: str | None = BILLS_OPTION,
    json_path: str | None = JSON_OPTION,
    method: str | None = REDUCE_OPTION,
    k: int | None = K_OPTION,
    p: int | None = P_OPTION,
    restarts: int | None = RESTARTS_OPTION,
    regularization: str | None = LAMBDA_OPTION,
    uniform_priors: bool | None = UNIFORM_PRIORS_OPTION,
    merge_small_into: str | None = MERGE_SMALL_OPTION,
    map_order: str | None = MAP_ORDER_OPTION,
    outdir: str | None = typer.Option(None, "-o", "--outdir", help=OUTDIR_HELP),
    dump_standardized: str | None = typer.Option(None, "--dump-standardized", help=DUMP_STANDARDIZED_HELP),
) -> None:
    """Run the whole pipeline and write DNA, model, map, components and manifest."""
    quiet = _quiet(ctx)
    try:
        config, files_used = _config(
            config_path,
            votes,
            voters,
            bills,
            json_path,
            cli_method=method,
            cli_k=k,
            cli_p=p,
            cli_restarts=restarts,
            cli_regularization=regularization,
            cli_uniform_priors=uniform_priors,
            cli_merge_small_into=merge_small_into,
            cli_map_order=parse_csv_list(map_order),
            cli_outdir=outdir,
        )
        run_pipeline(
            config,
            command="fit",
            config_paths_used=files_used,
            output_dir=config.outdir,
            standardized_path=dump_standardized,
            quiet=quiet,
            console=console,
        )
        if not quiet:
            console.print(SUCCESS_ARTIFACTS.format(path=config.outdir))
        exit_code = EXIT_OK
    except Exception as e:
        exit_code = report_error(e, quiet)
    sys.exit(exit_code)


def dna(
    ctx: typer.Context,
    config_path: str | None = CONFIG_OPTION,
    votes: str | None = VOTES_OPTION,
    voters: str | None = VOTERS_OPTION,
    bills: str | None = BILLS_OPTION,
    json_path: str | None = JSON_OPTION,
    method: str | None = REDUCE_OPTION,
    k: int | None = K_OPTION,
    p: int | None = P_OPTION,
    restarts: int | None = RESTARTS_OPTION,
    regularization: str | None = LAMBDA_OPTION,
    uniform_priors: bool | None = UNIFORM_PRIORS_OPTION,
    merge_small_into: str | None = MERGE_SMALL_OPTION,
    voter: list[str] | None = typer.Option(None, "--voter", help=VOTER_HELP),
    top: int | None = typer.Option(None, "--top", help=TOP_HELP),
    dump_dna: str | None = typer.Option(None, "--dump-dna", help=DUMP_DNA_HELP),
    dump_model: str | None = typer.Option(None, "--dump-model", help=DUMP_MODEL_HELP),
) -> None:
    """Print the DNA of selected voters; optionally dump all DNA and the model."""
    quiet = _quiet(ctx)
    try:
        config, _ = _config(
            config_path,
            votes,
            voters,
            bills,
            json_path,
            cli_method=method,
            cli_k=k,
            cli_p=p,
            cli_restarts=restarts,
            cli_regularization=regularization,
            cli_uniform_priors=uniform_priors,
            cli_merge_small_into=merge_small_into,
        )
        result, readouts = run_dna(
            config, voters=voter, top=top, dump_dna_path=dump_dna, dump_model_path=dump_model
        )
        if not quiet:
            table = Table(title=f"Political DNA ({result.basis.describe()})")
            table.add_column("Voter", style="cyan")
            table.add_column("Nominal group")
            table.add_column("DNA")
            nominal = result.nominal
            for voter_id, readout in readouts.items():
                weights = ", ".join(f"{group} {weight:.4f}" for group, weight in readout)
                table.add_row(voter_id, nominal.get(voter_id, ""), weights)
            console.print(table)
        exit_code = EXIT_OK
    except Exception as e:
        exit_code = report_error(e, quiet)
    sys.exit(exit_code)


def map_command(
    ctx: typer.Context,
    config_path: str | None = CONFIG_OPTION,
    votes: str | None = VOTES_OPTION,
    voters: str | None = VOTERS_OPTION,
    bills: str | None = BILLS_OPTION,
    json_path: str | None = JSON_OPTION,
    method: str | None = REDUCE_OPTION,
    k: int | None = K_OPTION,
    p: int | None = P_OPTION,
    restarts: int | None = RESTARTS_OPTION,
    regularization: str | None = LAMBDA_OPTION,
    uniform_priors: bool | None = UNIFORM_PRIORS_OPTION,
    merge_small_into: str | None = MERGE_SMALL_OPTION,
    map_order: str | None = MAP_ORDER_OPTION,
    out: str = typer.Option(..., "--map", help=MAP_OUT_HELP),
    format: str | None = typer.Option(None, "--format", help=MAP_FORMAT_HELP),
) -> None:
    """Render the political map as SVG or CSV."""
    quiet = _quiet(ctx)
    try:
        config, _ = _config(
            config_path,
            votes,
            voters,
            bills,
            json_path,
            cli_method=method,
            cli_k=k,
            cli_p=p,
            cli_restarts=restarts,
            cli_regularization=regularization,
            cli_uniform_priors=uniform_priors,
            cli_merge_small_into=merge_small_into,
            cli_map_order=parse_csv_list(map_order),
        )
        result = run_map(config, out, format)
        if not quiet:
            console.print(
                f"Map of {len(result.points)} voters ({result.basis.describe()}, "
                f"E-Var {format_percent(result.expressed_variance)}) saved to [green]{out}[/green]"
            )
        exit_code = EXIT_OK
    except Exception as e:
        exit_code = report_error(e, quiet)
    sys.exit(exit_code)


def outliers(
    ctx: typer.Context,
    config_path: str | None = CONFIG_OPTION,
    votes: str | None = VOTES_OPTION,
    voters: str | None = VOTERS_OPTION,
    bills: str | None = BILLS_OPTION,
    json_path: str | None = JSON_OPTION,
    k: int | None = typer.Option(None, "--k", help=OUTLIER_K_HELP),
    p: int | None = typer.Option(None, "--p", help=OUTLIER_P_HELP),
    restarts: int | None = RESTARTS_OPTION,
    regularization: str | None = LAMBDA_OPTION,
    merge_small_into: str | None = MERGE_SMALL_OPTION,
    report: str | None = typer.Option(None, "--report", help=REPORT_HELP),
) -> None:
    """Find voters whose sparse-PCA bloc is dominated by another group."""
    quiet = _quiet(ctx)
    try:
        config, _ = _config(
            config_path,
            votes,
            voters,
            bills,
            json_path,
            cli_outlier_k=k,
            cli_outlier_p=p,
            cli_restarts=restarts,
            cli_regularization=regularization,
            cli_merge_small_into=merge_small_into,
        )
        run = run_outliers(config, report_path=report)
        if not quiet:
            table = Table(
                title=f"Components (k={config.outlier_k}, p={config.outlier_p}, "
                f"E-Var {format_percent(run.analysis.expressed_variance)})"
            )
            table.add_column("PC", justify="right")
            table.add_column("Dominant group")
            table.add_column("Share", justify="right")
            table.add_column("Outliers")
            for profile in run.analysis.profiles:
                dominant = profile.dominant_group + (" (tie)" if profile.tie else "")
                flagged = ", ".join(f"{v} ({g})" for v, g in profile.outliers) or "-"
                table.add_row(
                    str(profile.component), dominant, format_percent(profile.dominant_fraction), flagged
                )
            console.print(table)
            if report:
                console.print(f"Report saved to [green]{report}[/green]")
        exit_code = EXIT_OK
    except Exception as e:
        exit_code = report_error(e, quiet)
    sys.exit(exit_code)


def components(
    ctx: typer.Context,
    config_path: str | None = CONFIG_OPTION,
    votes: str | None = VOTES_OPTION,
    voters: str | None = VOTERS_OPTION,
    bills: str | None = BILLS_OPTION,
    json_path: str | None = JSON_OPTION,
    method: str | None = REDUCE_OPTION,
    k: int | None = K_OPTION,
    p: int | None = P_OPTION,
    restarts: int | None = RESTARTS_OPTION,
    out: str | None = typer.Option(None, "--out", help=COMPONENTS_OUT_HELP),
) -> None:
    """List the principal directions over bills."""
    quiet = _quiet(ctx)
    try:
        config, _ = _config(
            config_path,
            votes,
            voters,
            bills,
            json_path,
            cli_method=method,
            cli_k=k,
            cli_p=p,
            cli_restarts=restarts,
        )
        _, text = run_components(config, out)
        if out is None:
            console.print(text, end="", markup=False, highlight=False)
        elif not quiet:
            console.print(f"Components saved to [green]{out}[/green]")
        exit_code = EXIT_OK
    except Exception as e:
        exit_code = report_error(e, quiet)
    sys.exit(exit_code)


def sweep(
    ctx: typer.Context,
    config_path: str | None = CONFIG_OPTION,
    votes: str | None = VOTES_OPTION,
    voters: str | None = VOTERS_OPTION,
    bills: str | None = BILLS_OPTION,
    json_path: str | None = JSON_OPTION,
    ks: str = typer.Option("2,10", "--ks", help=KS_HELP),
    ps: str = typer.Option("10,50", "--ps", help=PS_HELP),
    restarts: int | None = RESTARTS_OPTION,
    out: str | None = typer.Option(None, "--out", help=SWEEP_OUT_HELP),
) -> None:
    """Expressed variance of PCA and sparse PCA over a grid of k and p."""
    quiet = _quiet(ctx)
    try:
        config, _ = _config(config_path, votes, voters, bills, json_path, cli_restarts=restarts)
        rows = run_sweep(config, parse_int_list(ks, "--ks") or [], parse_int_list(ps, "--ps") or [], out)
        if not quiet:
            table = Table(title="Expressed variance")
            table.add_column("Method")
            table.add_column("k", justify="right")
            table.add_column("p", justify="right")
            table.add_column("E-Var", justify="right")
            for row in rows:
                table.add_row(
                    row.method, str(row.k), "-" if row.p is None else str(row.p),
                    format_percent(row.expressed_variance),
                )
            console.print(table)
        exit_code = EXIT_OK
    except Exception as e:
        exit_code = report_error(e, quiet)
    sys.exit(exit_code)


def synth(
    ctx: typer.Context,
    groups: int = typer.Option(4, "--groups", help=SYNTH_GROUPS_HELP),
    sizes: str = typer.Option("20", "--sizes", help=SYNTH_SIZES_HELP),
    n_bills: int = typer.Option(60, "--bills", help=SYNTH_BILLS_HELP),
    cohesion: str = typer.Option("0.9", "--cohesion", help=SYNTH_COHESION_HELP),
    n_outliers: int = typer.Option(0, "--outliers", help=SYNTH_OUTLIERS_HELP),
    seed: int = typer.Option(0, "--seed", help=SYNTH_SEED_HELP),
    out: str = typer.Option(..., "--out", help=SYNTH_OUT_HELP),
    format: str = typer.Option("csv", "--format", help=SYNTH_FORMAT_HELP),
) -> None:
    """Generate a labeled bloc dataset with planted cross-voters."""
    quiet = _quiet(ctx)
    try:
        size_list = parse_int_list(sizes, "--sizes") or []
        if len(size_list) == 1:
            size_list = size_list * groups
        try:
            cohesion_values = [float(c) for c in parse_csv_list(cohesion) or []]
        except ValueError:
            raise InvalidParameter(f"--cohesion expects numbers, got '{cohesion}'") from None
        cohesion_arg: float | list[float] = (
            cohesion_values[0] if len(cohesion_values) == 1 else cohesion_values
        )
        run = run_synth(out, groups, size_list, n_bills, cohesion_arg, n_outliers, seed, format)
        if not quiet:
            console.print(
                f"{run.blocs.dataset.n_voters} voters, {run.blocs.dataset.n_bills} bills, "
                f"{len(run.blocs.planted)} planted outlier(s) saved to [green]{out}[/green]"
            )
        exit_code = EXIT_OK
    except Exception as e:
        exit_code = report_error(e, quiet)
    sys.exit(exit_code)


def init_config(
    ctx: typer.Context,
    path: str | None = typer.Argument(None, help=INIT_CONFIG_HELP),
) -> None:
    """Write a commented example configuration file."""
    quiet = _quiet(ctx)
    target = Path(path) if path else CONFIG_FILES[0]
    try:
        if target.exists():
            raise ConfigError(f"Config file already exists: {target}")
        save_config_file(target)
        if not quiet:
            console.print(f"Example config written to [green]{target}[/green]")
        exit_code = EXIT_OK
    except Exception as e:
        exit_code = report_error(e, quiet)
    sys.exit(exit_code)


def build_app() -> typer.Typer:
    """Create the typer app with every sub-command."""
    app = typer.Typer(
        name="polidna",
        help=CLI_DESCRIPTION.strip(),
        add_completion=False,
        no_args_is_help=True,
    )
    app.callback()(main)
    app.command("fit")(fit)
    app.command("dna")(dna)
    app.command("map")(map_command)
    app.command("outliers")(outliers)
    app.command("components")(components)
    app.command("sweep")(sweep)
    app.command("synth")(synth)
    app.command("init-config")(init_config)
    return app


def cli_main() -> None:
    """Entry point for the CLI application."""
    build_app()()


if __name__ == "__main__":
    cli_main()
