"""Per-group Gaussian model and posterior group probabilities (the Political DNA)."""

from __future__ import annotations

import logging
from pathlib import Path

import numpy as np
import pandas as pd
from scipy import linalg
from scipy.special import logsumexp

from .constants import DNA_DECIMALS, MAX_CONDITION_NUMBER, MIN_GROUP_SIZE, REGULARIZATION_GRID
from .models import DnaVector, GmmModel, GroupAssignment, ProjectedData
from .utils import (
    DimensionMismatch,
    GroupTooSmall,
    InvalidParameter,
    SingularCovariance,
    VoterNotFound,
    save_json_safely,
    save_text_safely,
)

logger = logging.getLogger(__name__)


def _points(data: ProjectedData | np.ndarray) -> np.ndarray:
    values = data.values if isinstance(data, ProjectedData) else np.asarray(data, dtype=np.float64)
    if values.ndim == 1:
        values = values[:, None]
    return values


def _condition_number(matrix: np.ndarray) -> float:
    eigenvalues = linalg.eigvalsh(matrix)
    if eigenvalues[0] <= 0.0:
        return np.inf
    return float(eigenvalues[-1] / eigenvalues[0])


def select_regularization(scatter: list[np.ndarray], counts: np.ndarray) -> float:
    """Smallest grid value (scaled by trace(pooled)/k) keeping every covariance well conditioned."""
    k = scatter[0].shape[0]
    dof = float(np.sum(counts - 1))
    pooled = sum(c * (n - 1) for c, n in zip(scatter, counts, strict=True)) / max(dof, 1.0)
    scale = float(np.trace(pooled)) / k
    if scale <= 0.0:
        scale = 1.0
    identity = np.eye(k)
    for factor in REGULARIZATION_GRID:
        lam = factor * scale
        if all(_condition_number(c + lam * identity) <= MAX_CONDITION_NUMBER for c in scatter):
            return lam
    lam = REGULARIZATION_GRID[-1] * scale
    logger.warning("gmm: no regularization on the grid reaches condition %.0e; using %g",
                   MAX_CONDITION_NUMBER, lam)
    return lam


def gmm_fit(
    data: ProjectedData | np.ndarray,
    labels: GroupAssignment,
    regularization: float | str = "auto",
    uniform_priors: bool = False,
) -> GmmModel:
    """Maximum-likelihood group priors, means and unbiased covariances, shrunk by lambda * I."""
    X = _points(data)
    indices = np.asarray(labels.indices)
    if indices.shape[0] != X.shape[0]:
        raise DimensionMismatch(
            f"gmm: {X.shape[0]} points but {indices.shape[0]} labels"
        )
    m, k = X.shape
    n_groups = labels.n_groups

    counts = np.bincount(indices, minlength=n_groups)
    for g, count in enumerate(counts):
        if count < MIN_GROUP_SIZE:
            raise GroupTooSmall(labels.groups[g], int(count))

    means = np.stack([X[indices == g].mean(axis=0) for g in range(n_groups)])
    scatter = [
        np.atleast_2d(np.cov(X[indices == g], rowvar=False, ddof=1)).reshape(k, k)
        for g in range(n_groups)
    ]

    if isinstance(regularization, str):
        if regularization != "auto":
            raise InvalidParameter(f"gmm: regularization must be 'auto' or a number, got '{regularization}'")
        lam = select_regularization(scatter, counts)
    else:
        lam = float(regularization)
        if lam < 0.0:
            raise InvalidParameter(f"gmm: regularization must be non-negative, got {lam}")

    covariances = np.stack([c + lam * np.eye(k) for c in scatter])
    for g, cov in enumerate(covariances):
        # symmetrize rounding residue from np.cov
        covariances[g] = 0.5 * (cov + cov.T)
        try:
            linalg.cholesky(covariances[g], lower=True)
        except linalg.LinAlgError:
            raise SingularCovariance(
                f"gmm: covariance of group '{labels.groups[g]}' is not positive definite "
                f"with regularization {lam:g}"
            ) from None

    if uniform_priors:
        priors = np.full(n_groups, 1.0 / n_groups)
    else:
        priors = counts / float(m)

    logger.debug("gmm: %d groups, k=%d, regularization %g", n_groups, k, lam)
    return GmmModel(
        groups=tuple(labels.groups),
        priors=priors.astype(np.float64),
        means=means,
        covariances=covariances,
        regularization=lam,
    )


def log_weights(model: GmmModel, points: np.ndarray) -> np.ndarray:
    """log(alpha) - 0.5 log det(Sigma) - 0.5 Mahalanobis^2, per point and group (m x n_g)."""
    X = _points(points)
    if X.shape[1] != model.dimension:
        raise DimensionMismatch(
            f"gmm: points have dimension {X.shape[1]}, model has {model.dimension}"
        )
    out = np.empty((X.shape[0], model.n_groups))
    for g in range(model.n_groups):
        whitened = linalg.solve_triangular(
            model.cholesky_factors[g], (X - model.means[g]).T, lower=True
        )
        mahalanobis = np.sum(whitened * whitened, axis=0)
        out[:, g] = np.log(model.priors[g]) - 0.5 * model.log_determinants[g] - 0.5 * mahalanobis
    return out


def _posteriors(model: GmmModel, points: np.ndarray) -> np.ndarray:
    weights = log_weights(model, points)
    return np.exp(weights - logsumexp(weights, axis=1, keepdims=True))


def dna_posterior(model: GmmModel, x: np.ndarray, voter_id: str = "") -> DnaVector:
    """Posterior group probabilities of a single point."""
    point = np.asarray(x, dtype=np.float64).reshape(1, -1)
    return DnaVector(voter_id=voter_id, groups=model.groups, weights=_posteriors(model, point)[0])


def dna_all(model: GmmModel, data: ProjectedData | np.ndarray) -> list[DnaVector]:
    """DNA of every row, in row order."""
    X = _points(data)
    if isinstance(data, ProjectedData):
        row_ids = data.row_ids
    else:
        row_ids = tuple(str(i) for i in range(X.shape[0]))
    posteriors = _posteriors(model, X)
    return [
        DnaVector(voter_id=voter_id, groups=model.groups, weights=row)
        for voter_id, row in zip(row_ids, posteriors, strict=True)
    ]


def dna_readout(dna: DnaVector, top: int | None = None) -> list[tuple[str, float]]:
    """(group, weight) pairs by descending weight; equal weights keep group order."""
    order = np.argsort(-dna.weights, kind="stable")
    if top is not None:
        order = order[:top]
    return [(dna.groups[i], float(dna.weights[i])) for i in order]


def find_dna(vectors: list[DnaVector], voter_id: str) -> DnaVector:
    """DNA of one voter by id."""
    for vector in vectors:
        if vector.voter_id == voter_id:
            return vector
    raise VoterNotFound(f"gmm: no DNA for voter '{voter_id}'")


def dna_to_csv(vectors: list[DnaVector], nominal: dict[str, str]) -> str:
    """One row per voter: voter_id, nominal_group, then one column per group."""
    if not vectors:
        return "voter_id,nominal_group\n"
    groups = list(vectors[0].groups)
    frame = pd.DataFrame(
        np.stack([vector.weights for vector in vectors]),
        columns=groups,
    )
    frame.insert(0, "nominal_group", [nominal.get(vector.voter_id, "") for vector in vectors])
    frame.insert(0, "voter_id", [vector.voter_id for vector in vectors])
    return frame.to_csv(index=False, float_format=f"%.{DNA_DECIMALS}f", lineterminator="\n")


def dump_dna(vectors: list[DnaVector], nominal: dict[str, str], path: Path) -> None:
    save_text_safely(dna_to_csv(vectors, nominal), path)


def dump_model(model: GmmModel, path: Path) -> None:
    save_json_safely(model.to_dict(), path)
