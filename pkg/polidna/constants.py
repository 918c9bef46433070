"""Constants and defaults for polidna."""

from pathlib import Path

# Default configuration values
DEFAULT_METHOD = "pca"
DEFAULT_K = 2
DEFAULT_P = 10
DEFAULT_RESTARTS = 0
DEFAULT_REGULARIZATION = "auto"
DEFAULT_OUTLIER_K = 10
DEFAULT_OUTLIER_P = 50
DEFAULT_OUTDIR = "./polidna-runs"

# Configuration file precedence
CONFIG_FILES = [
    Path("./.polidna.yaml"),
    Path.home() / ".polidna" / "config.yaml",
]

# Input file names when a dataset directory is given
VOTES_FILE = "votes.csv"
VOTERS_FILE = "voters.csv"
BILLS_FILE = "bills.csv"
DATASET_JSON_FILE = "dataset.json"

# Output file names
MANIFEST_FILE = "manifest.json"
DNA_FILE = "dna.csv"
MODEL_FILE = "model.json"
MAP_SVG_FILE = "map.svg"
MAP_CSV_FILE = "map.csv"
COMPONENTS_FILE = "components.csv"
OUTLIER_REPORT_FILE = "outliers.json"
SWEEP_FILE = "evar_sweep.csv"
STAGING_PREFIX = ".polidna-staging-"

# Numerical tolerances
RANK_TOLERANCE = 1e-10  # relative to the leading singular value
SPCA_TOLERANCE = 1e-10  # relative objective improvement
SPCA_MAX_ITERATIONS = 500
SPCA_COLUMN_SEEDS = 10  # coordinate starts always tried, largest columns first
DEFLATION_TOLERANCE = 1e-12  # residual norm relative to the input norm
ORACLE_MAX_COLUMNS = 12
ORACLE_MAX_SUPPORT = 4
REGULARIZATION_GRID = (0.0, 1e-8, 1e-6, 1e-4, 1e-2)
MAX_CONDITION_NUMBER = 1e8
MIN_GROUP_SIZE = 2

# Vote strings accepted at parse time (compared case-insensitively)
YES_STRINGS = ("yes", "favorevole", "y", "+1", "1")
NO_STRINGS = ("no", "contrario", "n", "-1")
NOT_VOTING_STRINGS = ("notvoting", "not voting", "nv", "assente", "absent", "0")

# Artifact formatting
DNA_DECIMALS = 6
STANDARDIZED_FORMAT = "%.12g"
LOADING_FORMAT = "%.12g"
ROUNDTRIP_FORMAT = "%.17g"

# Political map rendering
MAP_PALETTE = (
    "#1f77b4",
    "#ff7f0e",
    "#2ca02c",
    "#d62728",
    "#9467bd",
    "#8c564b",
    "#e377c2",
    "#7f7f7f",
    "#bcbd22",
    "#17becf",
)
MAP_MARKERS = ("o", "s", "^", "D", "v", "P", "X", "*", "<", ">")
MAP_SVG_HASHSALT = "polidna"

# Synthetic data
SYNTH_START_DATE = "2013-03-15"
SYNTH_MAX_ATTEMPTS = 1000

# Exit codes
EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INPUT_ERROR = 2
EXIT_NUMERICAL_ERROR = 3

# CLI help messages
CLI_DESCRIPTION = """
Political DNA: per-voter affinity to every group, learned from roll-call votes.

Pipeline: ingest -> clean -> encode/standardize -> PCA or sparse PCA -> per-group
Gaussian model -> posterior group probabilities (DNA) -> political map / outliers.

Input schemas (UTF-8, header row required):
  votes.csv   voter_id,bill_id,vote   vote in Yes/No/NotVoting (also Favorevole/Contrario/Assente)
  voters.csv  voter_id,group
  bills.csv   bill_id,date,description,secret   date ISO-8601, secret in {0,1}
  JSON        {"voters": [...], "bills": [...], "votes": [...]} with the same fields,
              optional "groups": [ordered group ids]

Examples:
  polidna fit --votes votes.csv --voters voters.csv --bills bills.csv --k 2
  polidna fit --json senate.json --reduce spca --k 10 --p 50 -o runs/
  polidna outliers --json senate.json --k 10 --p 50 --report outliers.json
  polidna synth --groups 4 --sizes 20,20,20,5 --bills 60 --cohesion 0.9 --outliers 2 --seed 7 --out data/
"""

CONFIG_HELP = "Path to config file (default: ./.polidna.yaml or ~/.polidna/config.yaml)"
VOTES_HELP = "votes.csv path (columns voter_id,bill_id,vote)"
VOTERS_HELP = "voters.csv path (columns voter_id,group)"
BILLS_HELP = "bills.csv path (columns bill_id,date,description,secret)"
JSON_HELP = "Single JSON dataset with arrays voters, bills, votes"
REDUCE_HELP = "Dimensionality reduction: pca or spca"
K_HELP = f"Number of retained components (default: {DEFAULT_K})"
P_HELP = f"Sparsity: nonzero loadings per sparse component (default: {DEFAULT_P})"
RESTARTS_HELP = "Extra sparse PCA starts from the next-largest columns, beyond the 10 always tried (default: 0)"
LAMBDA_HELP = "Covariance shrinkage: 'auto' or a non-negative number (default: auto)"
UNIFORM_PRIORS_HELP = "Use uniform group priors instead of group frequencies"
MERGE_SMALL_HELP = "Fold groups with fewer than 2 voters into this group"
MAP_ORDER_HELP = "Comma-separated group order around the polygon"
OUTDIR_HELP = f"Output directory for artifacts (default: {DEFAULT_OUTDIR})"
DUMP_STANDARDIZED_HELP = "Also write the standardized matrix to this CSV path"
VERBOSE_HELP = "Show debug logging"
QUIET_HELP = "Reduce console output (errors still shown)"
VERSION_HELP = "Show version and exit"
VOTER_HELP = "Voter id to read out (repeatable; default: every voter)"
TOP_HELP = "Show only the N heaviest groups of each DNA"
DUMP_DNA_HELP = "Write every voter's DNA to this CSV path"
DUMP_MODEL_HELP = "Write the fitted Gaussian model to this JSON path"
MAP_OUT_HELP = "Map output path (.svg or .csv)"
MAP_FORMAT_HELP = "Map format: svg or csv (default: from the file suffix)"
REPORT_HELP = "Write the outlier report to this JSON path"
OUTLIER_K_HELP = f"Sparse components over voters (default: {DEFAULT_OUTLIER_K})"
OUTLIER_P_HELP = f"Voters per sparse component (default: {DEFAULT_OUTLIER_P})"
COMPONENTS_OUT_HELP = "Write the components CSV here instead of printing it"
KS_HELP = "Comma-separated k values, e.g. 2,5,10"
PS_HELP = "Comma-separated sparsity levels p, e.g. 5,10,50"
SWEEP_OUT_HELP = "Write the sweep table to this CSV path"
SYNTH_GROUPS_HELP = "Number of groups"
SYNTH_SIZES_HELP = "Voters per group, comma-separated (a single value applies to every group)"
SYNTH_BILLS_HELP = "Number of bills"
SYNTH_COHESION_HELP = "Probability of voting the party line, in [0.5, 1]; comma-separated per group"
SYNTH_OUTLIERS_HELP = "Planted voters who vote another group's line"
SYNTH_SEED_HELP = "Generator seed"
SYNTH_OUT_HELP = "Output directory for the generated dataset"
SYNTH_FORMAT_HELP = "Dataset format: csv or json"
INIT_CONFIG_HELP = "Where to write the example config (default: ./.polidna.yaml)"

# Error messages
ERROR_NO_INPUT = "No input given. Use --json or --votes/--voters/--bills, or set input in a config file."
ERROR_MIXED_INPUT = "Use either --json or --votes/--voters/--bills, not both."

# Success messages
SUCCESS_ARTIFACTS = "Artifacts saved to: {path}"
