"""Dense PCA via the SVD, projection and expressed variance."""

from __future__ import annotations

import logging

import numpy as np
import pandas as pd
from scipy import linalg

from .constants import LOADING_FORMAT, RANK_TOLERANCE
from .models import Bill, ComponentBasis, ProjectedData, StandardizedMatrix
from .utils import DimensionMismatch, InvalidParameter, KTooLarge, RankDeficient

logger = logging.getLogger(__name__)


def _values(X: StandardizedMatrix | np.ndarray) -> np.ndarray:
    if isinstance(X, StandardizedMatrix):
        return X.values
    return np.asarray(X, dtype=np.float64)


def sign_convention(v: np.ndarray, u: np.ndarray | None = None) -> tuple[np.ndarray, np.ndarray | None]:
    """Flip (v, u) so the largest-magnitude entry of v is positive; ties go to the lowest index."""
    pivot = int(np.argmax(np.abs(v)))
    if v[pivot] < 0:
        return -v, (None if u is None else -u)
    return v, u


def pca_fit(X: StandardizedMatrix | np.ndarray, k: int) -> ComponentBasis:
    """Top-k right singular vectors and singular values of X."""
    values = _values(X)
    m, n = values.shape
    if k < 1:
        raise InvalidParameter(f"pca: k must be positive, got {k}")
    if k > min(m, n):
        raise KTooLarge(f"pca: k={k} exceeds min(m, n)={min(m, n)}")

    _, s, vt = linalg.svd(values, full_matrices=False)
    rank = int(np.sum(s > RANK_TOLERANCE * s[0])) if s[0] > 0 else 0
    if k > rank:
        raise RankDeficient(f"pca: k={k} exceeds the numerical rank {rank}")

    directions = np.empty((n, k))
    for i in range(k):
        directions[:, i], _ = sign_convention(vt[i])
    logger.debug("pca: k=%d, leading singular values %s", k, s[:k])
    return ComponentBasis(directions=directions, singular_values=s[:k].copy(), kind="dense")


def project(X: StandardizedMatrix | np.ndarray, basis: ComponentBasis) -> ProjectedData:
    """X_k = X V_k."""
    values = _values(X)
    if values.shape[1] != basis.directions.shape[0]:
        raise DimensionMismatch(
            f"pca: matrix has {values.shape[1]} columns but the basis has "
            f"{basis.directions.shape[0]} rows"
        )
    row_ids = X.row_ids if isinstance(X, StandardizedMatrix) else tuple(map(str, range(values.shape[0])))
    return ProjectedData(values=values @ basis.directions, basis=basis, row_ids=row_ids)


def expressed_variance(X: StandardizedMatrix | np.ndarray, basis: ComponentBasis) -> float:
    """Fraction of ||X||_F^2 captured by span(V_k).

    Sparse directions are not orthogonal, so their span is orthonormalized first.
    """
    values = _values(X)
    if values.shape[1] != basis.directions.shape[0]:
        raise DimensionMismatch(
            f"pca: matrix has {values.shape[1]} columns but the basis has "
            f"{basis.directions.shape[0]} rows"
        )
    total = float(np.sum(values * values))
    if basis.k == 0 or total == 0.0:
        return 0.0
    if basis.kind == "dense":
        Q = basis.directions
    else:
        Q = linalg.orth(basis.directions)
    captured = values @ Q
    return min(1.0, float(np.sum(captured * captured)) / total)


def component_listing(
    basis: ComponentBasis,
    col_ids: tuple[str, ...],
    bills: tuple[Bill, ...] | None = None,
) -> pd.DataFrame:
    """Per-component support as rows sorted by |loading| descending."""
    by_id: dict[str, Bill] = {b.bill_id: b for b in bills} if bills else {}
    rows = []
    for i in range(basis.k):
        column = basis.directions[:, i]
        support = np.flatnonzero(column)
        order = support[np.argsort(-np.abs(column[support]), kind="stable")]
        for j in order:
            bill = by_id.get(col_ids[j])
            rows.append(
                {
                    "component": i + 1,
                    "bill_id": col_ids[j],
                    "loading": float(column[j]),
                    "date": bill.date.isoformat() if bill else "",
                    "description": bill.description if bill else "",
                }
            )
    return pd.DataFrame(rows, columns=["component", "bill_id", "loading", "date", "description"])


def components_to_csv(
    basis: ComponentBasis,
    col_ids: tuple[str, ...],
    bills: tuple[Bill, ...] | None = None,
) -> str:
    """Dense bases as a bill x component matrix; sparse bases as the support listing."""
    if basis.kind == "dense":
        frame = pd.DataFrame(
            basis.directions,
            index=list(col_ids),
            columns=[f"pc{i + 1}" for i in range(basis.k)],
        )
        frame.index.name = "bill_id"
        return frame.to_csv(float_format=LOADING_FORMAT, lineterminator="\n")
    return component_listing(basis, col_ids, bills).to_csv(
        index=False, float_format=LOADING_FORMAT, lineterminator="\n"
    )
