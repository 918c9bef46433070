"""Data models for votes, matrices, fitted models and run manifests."""

from __future__ import annotations

from dataclasses import dataclass, field
from datetime import date
from enum import IntEnum
from functools import cached_property
from pathlib import Path
from typing import Any, Literal

import numpy as np
from scipy import linalg

from .constants import (
    DEFAULT_K,
    DEFAULT_METHOD,
    DEFAULT_OUTDIR,
    DEFAULT_OUTLIER_K,
    DEFAULT_OUTLIER_P,
    DEFAULT_P,
    DEFAULT_REGULARIZATION,
    DEFAULT_RESTARTS,
    NO_STRINGS,
    NOT_VOTING_STRINGS,
    YES_STRINGS,
)
from .utils import ConfigError, UnknownVoteString


class VoteValue(IntEnum):
    """A ternary ballot; the integer value is its encoding."""

    YES = 1
    NO = -1
    NOT_VOTING = 0

    @property
    def label(self) -> str:
        """Canonical string used when serializing."""
        return {VoteValue.YES: "Yes", VoteValue.NO: "No", VoteValue.NOT_VOTING: "NotVoting"}[self]

    @classmethod
    def parse(cls, raw: str) -> VoteValue:
        """Map a vote string (case-insensitive) to a VoteValue."""
        text = str(raw).strip().lower()
        if text in YES_STRINGS:
            return cls.YES
        if text in NO_STRINGS:
            return cls.NO
        if text in NOT_VOTING_STRINGS:
            return cls.NOT_VOTING
        raise UnknownVoteString(f"unknown vote string '{raw}'", field="vote")


@dataclass(frozen=True)
class Voter:
    voter_id: str
    group: str


@dataclass(frozen=True)
class Bill:
    bill_id: str
    date: date
    description: str = ""
    secret_ballot: bool = False


@dataclass(frozen=True)
class VoteDataset:
    """Labeled roll-call records. Missing (voter, bill) pairs mean NotVoting."""

    voters: tuple[Voter, ...]
    bills: tuple[Bill, ...]
    votes: dict[tuple[str, str], VoteValue]
    groups: tuple[str, ...]

    @property
    def voter_ids(self) -> list[str]:
        return [v.voter_id for v in self.voters]

    @property
    def bill_ids(self) -> list[str]:
        return [b.bill_id for b in self.bills]

    @property
    def n_voters(self) -> int:
        return len(self.voters)

    @property
    def n_bills(self) -> int:
        return len(self.bills)

    def vote(self, voter_id: str, bill_id: str) -> VoteValue:
        return self.votes.get((voter_id, bill_id), VoteValue.NOT_VOTING)

    def group_of(self, voter_id: str) -> str:
        for voter in self.voters:
            if voter.voter_id == voter_id:
                return voter.group
        raise KeyError(voter_id)

    def group_sizes(self) -> dict[str, int]:
        sizes = dict.fromkeys(self.groups, 0)
        for voter in self.voters:
            sizes[voter.group] += 1
        return sizes


@dataclass(frozen=True)
class CleaningReport:
    """Outcome of cleaning with per-rule removal counts."""

    dataset: VoteDataset
    secret_bills: int = 0
    never_voting_voters: int = 0
    zero_variance_bills: int = 0
    empty_groups: int = 0
    passes: int = 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "secret_bills": self.secret_bills,
            "never_voting_voters": self.never_voting_voters,
            "zero_variance_bills": self.zero_variance_bills,
            "empty_groups": self.empty_groups,
            "passes": self.passes,
            "voters_retained": self.dataset.n_voters,
            "bills_retained": self.dataset.n_bills,
            "groups_retained": list(self.dataset.groups),
        }


@dataclass(frozen=True)
class GroupAssignment:
    """Per-voter group index into ``groups``."""

    indices: np.ndarray
    groups: tuple[str, ...]

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    def labels(self) -> list[str]:
        return [self.groups[i] for i in self.indices]


@dataclass(frozen=True, eq=False)
class EncodedMatrix:
    """Ternary vote matrix Z with entries in {-1, 0, +1}."""

    values: np.ndarray
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True, eq=False)
class StandardizedMatrix:
    """Column-centered matrix whose columns have unit Euclidean norm."""

    values: np.ndarray
    column_means: np.ndarray
    column_norms: np.ndarray
    row_ids: tuple[str, ...]
    col_ids: tuple[str, ...]

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape


@dataclass(frozen=True, eq=False)
class ComponentBasis:
    """Principal directions as the columns of ``directions`` (n x k)."""

    directions: np.ndarray
    singular_values: np.ndarray
    kind: Literal["dense", "sparse"] = "dense"
    sparsity: int | None = None
    converged: tuple[bool, ...] = ()

    @property
    def k(self) -> int:
        return self.directions.shape[1]

    @property
    def supports(self) -> list[np.ndarray]:
        """Indices of the nonzero loadings of each direction."""
        return [np.flatnonzero(self.directions[:, i]) for i in range(self.k)]

    def describe(self) -> str:
        if self.kind == "sparse":
            return f"Sparse PCA, k={self.k}, p={self.sparsity}"
        return f"PCA, k={self.k}"


@dataclass(frozen=True, eq=False)
class ProjectedData:
    """Voters in the reduced space: ``values = X @ basis.directions``."""

    values: np.ndarray
    basis: ComponentBasis
    row_ids: tuple[str, ...]


@dataclass(frozen=True, eq=False)
class GmmModel:
    """Per-group Gaussian model in the reduced space."""

    groups: tuple[str, ...]
    priors: np.ndarray
    means: np.ndarray
    covariances: np.ndarray
    regularization: float

    @property
    def dimension(self) -> int:
        return self.means.shape[1]

    @property
    def n_groups(self) -> int:
        return len(self.groups)

    @cached_property
    def cholesky_factors(self) -> np.ndarray:
        """Lower Cholesky factor of every covariance, stacked (n_g x k x k)."""
        return np.stack([linalg.cholesky(cov, lower=True) for cov in self.covariances])

    @cached_property
    def log_determinants(self) -> np.ndarray:
        """log det(Sigma) from the factor pivots."""
        return np.array(
            [2.0 * np.sum(np.log(np.diag(factor))) for factor in self.cholesky_factors]
        )

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "groups": list(self.groups),
            "k": self.dimension,
            "regularization": self.regularization,
            "priors": self.priors.tolist(),
            "means": self.means.tolist(),
            "covariances": self.covariances.tolist(),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GmmModel:
        """Rebuild a model written by ``to_dict``."""
        k = int(data["k"])
        means = np.asarray(data["means"], dtype=float).reshape(-1, k)
        return cls(
            groups=tuple(data["groups"]),
            priors=np.asarray(data["priors"], dtype=float),
            means=means,
            covariances=np.asarray(data["covariances"], dtype=float).reshape(-1, k, k),
            regularization=float(data["regularization"]),
        )


@dataclass(frozen=True, eq=False)
class DnaVector:
    """Posterior group probabilities of one voter."""

    voter_id: str
    groups: tuple[str, ...]
    weights: np.ndarray

    def weight(self, group: str) -> float:
        return float(self.weights[self.groups.index(group)])

    def argmax(self) -> str:
        return self.groups[int(np.argmax(self.weights))]


@dataclass(frozen=True, eq=False)
class PolytopeLayout:
    """Group vertices on the unit circle, in ``groups`` order."""

    groups: tuple[str, ...]
    vertices: np.ndarray

    def vertex(self, group: str) -> np.ndarray:
        return self.vertices[self.groups.index(group)]


@dataclass(frozen=True, eq=False)
class PoliticalMapPoint:
    voter_id: str
    gamma: np.ndarray
    nominal_group: str
    marker: int
    dna: DnaVector | None = None


@dataclass(frozen=True)
class ComponentProfile:
    """Sparse component of the transposed vote matrix, read as a voter bloc."""

    component: int
    support: tuple[str, ...]
    dominant_group: str
    dominant_fraction: float
    outliers: tuple[tuple[str, str], ...]
    tie: bool = False

    def to_dict(self) -> dict[str, Any]:
        return {
            "component": self.component,
            "support": list(self.support),
            "dominant_group": self.dominant_group,
            "dominant_fraction": self.dominant_fraction,
            "dominant_tie": self.tie,
            "outliers": [{"voter_id": v, "nominal_group": g} for v, g in self.outliers],
        }


@dataclass(frozen=True)
class OutlierEntry:
    """One outlier joined with its DNA, weights sorted descending."""

    component: int
    voter_id: str
    nominal_group: str
    dominant_group: str
    dna: tuple[tuple[str, float], ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "component": self.component,
            "voter_id": self.voter_id,
            "nominal_group": self.nominal_group,
            "dominant_group": self.dominant_group,
            "dna": [{"group": g, "weight": w} for g, w in self.dna],
        }


@dataclass
class DnaConfig:
    """Configuration for polidna runs."""

    votes: str | None = None
    voters: str | None = None
    bills: str | None = None
    json: str | None = None
    method: str = DEFAULT_METHOD
    k: int = DEFAULT_K
    p: int = DEFAULT_P
    restarts: int = DEFAULT_RESTARTS
    regularization: str | float = DEFAULT_REGULARIZATION
    uniform_priors: bool = False
    merge_small_into: str | None = None
    map_order: list[str] | None = None
    outlier_k: int = DEFAULT_OUTLIER_K
    outlier_p: int = DEFAULT_OUTLIER_P
    outdir: str = DEFAULT_OUTDIR

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> DnaConfig:
        """Create config from dictionary (loaded from YAML)."""
        sections = ("input", "reduction", "gmm", "map", "outliers", "output")
        data = {name: ({} if value is None else value) for name, value in data.items()}
        for name in sections:
            if not isinstance(data.get(name, {}), dict):
                raise ConfigError(f"config section '{name}' must be a mapping")
        unknown = sorted(set(data) - set(sections))
        if unknown:
            raise ConfigError(f"unknown config section(s): {', '.join(unknown)}")

        source = data.get("input", {})
        reduction = data.get("reduction", {})
        gmm = data.get("gmm", {})
        layout = data.get("map", {})
        outliers = data.get("outliers", {})
        output = data.get("output", {})

        order = layout.get("order")
        if isinstance(order, str):
            order = [item.strip() for item in order.split(",") if item.strip()]

        return cls(
            votes=source.get("votes"),
            voters=source.get("voters"),
            bills=source.get("bills"),
            json=source.get("json"),
            method=reduction.get("method", DEFAULT_METHOD),
            k=reduction.get("k", DEFAULT_K),
            p=reduction.get("p", DEFAULT_P),
            restarts=reduction.get("restarts", DEFAULT_RESTARTS),
            regularization=gmm.get("regularization", DEFAULT_REGULARIZATION),
            uniform_priors=gmm.get("uniform_priors", False),
            merge_small_into=gmm.get("merge_small_into"),
            map_order=order,
            outlier_k=outliers.get("k", DEFAULT_OUTLIER_K),
            outlier_p=outliers.get("p", DEFAULT_OUTLIER_P),
            outdir=output.get("outdir", DEFAULT_OUTDIR),
        )

    def merge_cli_args(self, **overrides: Any) -> DnaConfig:
        """Create new config with CLI arguments merged in (``None`` keeps the file value)."""
        values = {name: getattr(self, name) for name in self.__dataclass_fields__}
        for name, value in overrides.items():
            if name not in values:
                raise ConfigError(f"unknown config option '{name}'")
            if value is not None:
                values[name] = value
        return DnaConfig(**values)

    def to_dict(self) -> dict[str, Any]:
        return {
            "input": {
                "votes": self.votes,
                "voters": self.voters,
                "bills": self.bills,
                "json": self.json,
            },
            "reduction": {
                "method": self.method,
                "k": self.k,
                "p": self.p,
                "restarts": self.restarts,
            },
            "gmm": {
                "regularization": self.regularization,
                "uniform_priors": self.uniform_priors,
                "merge_small_into": self.merge_small_into,
            },
            "map": {"order": self.map_order},
            "outliers": {"k": self.outlier_k, "p": self.outlier_p},
            "output": {"outdir": self.outdir},
        }


@dataclass
class RunManifest:
    """Manifest for a complete polidna run; carries every decision needed to re-run it."""

    command: str
    version: str
    config: dict[str, Any]
    input_digests: dict[str, str] = field(default_factory=dict)
    config_paths_used: list[str] = field(default_factory=list)
    cleaning: dict[str, Any] = field(default_factory=dict)
    parameters: dict[str, Any] = field(default_factory=dict)
    results: dict[str, Any] = field(default_factory=dict)
    artifacts: list[str] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        """Convert to dictionary for JSON serialization."""
        return {
            "command": self.command,
            "version": self.version,
            "config": self.config,
            "input_digests": self.input_digests,
            "config_paths_used": self.config_paths_used,
            "cleaning": self.cleaning,
            "parameters": self.parameters,
            "results": self.results,
            "artifacts": self.artifacts,
        }


@dataclass
class ExecutionContext:
    """Context for a polidna run."""

    config: DnaConfig
    command: str
    config_paths_used: list[str] = field(default_factory=list)
    output_dir: Path | None = None
    standardized_path: Path | None = None
    quiet: bool = False


@dataclass(eq=False)
class PipelineResult:
    """Results returned from the Python API."""

    dataset: VoteDataset
    cleaning: CleaningReport
    matrix: StandardizedMatrix
    basis: ComponentBasis
    projected: ProjectedData
    model: GmmModel
    dna: list[DnaVector]
    layout: PolytopeLayout
    points: list[PoliticalMapPoint]
    expressed_variance: float
    manifest: RunManifest
    artifacts: list[Path] = field(default_factory=list)

    @property
    def nominal(self) -> dict[str, str]:
        """voter_id -> nominal group."""
        return {voter.voter_id: voter.group for voter in self.dataset.voters}

    def get_dna(self, voter_id: str) -> DnaVector | None:
        for vector in self.dna:
            if vector.voter_id == voter_id:
                return vector
        return None
