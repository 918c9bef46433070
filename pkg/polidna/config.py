"""Configuration management for polidna."""

from __future__ import annotations

from pathlib import Path

import yaml

from .constants import CONFIG_FILES
from .models import DnaConfig
from .utils import ConfigError

METHODS = ("pca", "spca")


def load_yaml_file(file_path: Path) -> dict:
    """Load and parse a YAML configuration file."""
    try:
        with file_path.open("r", encoding="utf-8") as f:
            content = yaml.safe_load(f) or {}
            if not isinstance(content, dict):
                raise ConfigError(f"Config file must contain a YAML object: {file_path}")
            return content
    except yaml.YAMLError as e:
        raise ConfigError(f"Invalid YAML in config file {file_path}: {e}") from e
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {file_path}") from None
    except ConfigError:
        raise
    except Exception as e:
        raise ConfigError(f"Error reading config file {file_path}: {e}") from e


def find_config_file(explicit_path: str | None = None) -> Path | None:
    """Find the configuration file using precedence rules."""
    # 1. Explicit path from CLI
    if explicit_path:
        path = Path(explicit_path)
        if not path.exists():
            raise ConfigError(f"Specified config file not found: {path}")
        return path

    # 2. Check default locations in order
    for config_path in CONFIG_FILES:
        if config_path.exists():
            return config_path

    return None


def load_config(explicit_path: str | None = None) -> tuple[DnaConfig, list[str]]:
    """Load configuration with precedence handling.

    An explicit path must load cleanly; a broken default-location file is an error too,
    since silently falling back would change the analysis parameters.

    Returns:
        Tuple of (config, list_of_config_files_used)
    """
    config_files_used = []

    config_file = find_config_file(explicit_path)
    if config_file:
        config_data = load_yaml_file(config_file)
        config_files_used.append(str(config_file))
        return DnaConfig.from_dict(config_data), config_files_used

    return DnaConfig(), config_files_used


def parse_regularization(value: str | float | int) -> str | float:
    """'auto' or a non-negative number."""
    if isinstance(value, bool):
        raise ConfigError(f"regularization must be 'auto' or a number, got {value!r}")
    if isinstance(value, (int, float)):
        number = float(value)
    elif str(value).strip().lower() == "auto":
        return "auto"
    else:
        try:
            number = float(value)
        except ValueError:
            raise ConfigError(f"regularization must be 'auto' or a number, got '{value}'") from None
    if number < 0:
        raise ConfigError(f"regularization cannot be negative, got {number}")
    return number


def validate_config(config: DnaConfig, require_input: bool = True) -> None:
    """Validate configuration values."""
    if config.method not in METHODS:
        raise ConfigError(f"method must be one of {', '.join(METHODS)}, got '{config.method}'")

    for name in ("k", "p", "outlier_k", "outlier_p"):
        value = getattr(config, name)
        if isinstance(value, bool) or not isinstance(value, int) or value < 1:
            raise ConfigError(f"{name} must be a positive integer, got {value!r}")

    if isinstance(config.restarts, bool) or not isinstance(config.restarts, int) or config.restarts < 0:
        raise ConfigError(f"restarts must be a non-negative integer, got {config.restarts!r}")

    parse_regularization(config.regularization)

    if not config.outdir:
        raise ConfigError("outdir cannot be empty")

    if config.map_order is not None and len(set(config.map_order)) != len(config.map_order):
        raise ConfigError(f"map order repeats a group: {config.map_order}")

    if require_input:
        csv_given = [config.votes, config.voters, config.bills]
        if config.json and any(csv_given):
            raise ConfigError("input: use either json or votes/voters/bills, not both")
        if not config.json and not all(csv_given):
            raise ConfigError("input: give json, or all of votes, voters and bills")


def create_example_config() -> str:
    """Create an example configuration file content."""
    return """# polidna configuration file
# Command-line flags override every value set here.

# Dataset: either a single JSON file or the three CSV files
input:
  # json: "./senate.json"
  votes: "./votes.csv"
  voters: "./voters.csv"
  bills: "./bills.csv"

# Dimensionality reduction
reduction:
  method: pca       # pca or spca
  k: 2              # retained components
  p: 10             # nonzero loadings per sparse component (spca only)
  restarts: 0       # extra sparse PCA starts beyond the 10 largest columns

# Per-group Gaussian model
gmm:
  regularization: auto   # 'auto' or a non-negative number added to each covariance diagonal
  uniform_priors: false  # true: equal priors instead of group frequencies
  # merge_small_into: "Other"  # fold groups with fewer than 2 voters into this group

# Political map
map:
  # order: ["G1", "G2", "G3"]  # groups around the polygon, counter-clockwise from the top

# Outlier detection (sparse PCA of the transposed vote matrix)
outliers:
  k: 10
  p: 50

output:
  outdir: "./polidna-runs"
"""


def merge_cli_config(
    config: DnaConfig,
    cli_votes: str | None = None,
    cli_voters: str | None = None,
    cli_bills: str | None = None,
    cli_json: str | None = None,
    cli_method: str | None = None,
    cli_k: int | None = None,
    cli_p: int | None = None,
    cli_restarts: int | None = None,
    cli_regularization: str | None = None,
    cli_uniform_priors: bool | None = None,
    cli_merge_small_into: str | None = None,
    cli_map_order: list[str] | None = None,
    cli_outlier_k: int | None = None,
    cli_outlier_p: int | None = None,
    cli_outdir: str | None = None,
) -> DnaConfig:
    """Merge CLI arguments into configuration.

    Giving input files on the command line replaces the file's input section entirely,
    so a config naming CSV files can be used with ``--json`` and vice versa.
    """
    if cli_json or cli_votes or cli_voters or cli_bills:
        config = config.merge_cli_args()
        config.votes = config.voters = config.bills = config.json = None

    regularization = None
    if cli_regularization is not None:
        regularization = parse_regularization(cli_regularization)

    return config.merge_cli_args(
        votes=cli_votes,
        voters=cli_voters,
        bills=cli_bills,
        json=cli_json,
        method=cli_method,
        k=cli_k,
        p=cli_p,
        restarts=cli_restarts,
        regularization=regularization,
        uniform_priors=cli_uniform_priors,
        merge_small_into=cli_merge_small_into,
        map_order=cli_map_order,
        outlier_k=cli_outlier_k,
        outlier_p=cli_outlier_p,
        outdir=cli_outdir,
    )


def save_config_file(config_path: Path, create_parents: bool = True) -> None:
    """Save an example config file."""
    if create_parents:
        config_path.parent.mkdir(parents=True, exist_ok=True)

    with config_path.open("w", encoding="utf-8") as f:
        f.write(create_example_config())
