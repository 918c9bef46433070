"""Political DNA: per-voter group affinities learned from roll-call votes."""

__version__ = "0.1.0"

from .app import (  # noqa: E402
    resolve_config,
    run_components,
    run_dna,
    run_map,
    run_outliers,
    run_pipeline,
    run_sweep,
    run_synth,
)
from .models import (  # noqa: E402
    DnaConfig,
    DnaVector,
    ExecutionContext,
    GmmModel,
    PipelineResult,
    RunManifest,
    VoteDataset,
)

__all__ = [
    "__version__",
    "resolve_config",
    "run_components",
    "run_dna",
    "run_map",
    "run_outliers",
    "run_pipeline",
    "run_sweep",
    "run_synth",
    "DnaConfig",
    "DnaVector",
    "ExecutionContext",
    "GmmModel",
    "PipelineResult",
    "RunManifest",
    "VoteDataset",
]
