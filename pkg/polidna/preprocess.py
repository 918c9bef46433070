"""Ternary encoding and column standardization of the vote matrix."""

from __future__ import annotations

import numpy as np
import pandas as pd

from .constants import STANDARDIZED_FORMAT
from .models import EncodedMatrix, StandardizedMatrix, VoteDataset
from .utils import DimensionMismatch, ZeroVarianceColumn, save_text_safely


def encode(dataset: VoteDataset) -> EncodedMatrix:
    """Z[i, j] = +1 / -1 / 0 for Yes / No / NotVoting, in dataset voter and bill order."""
    row_index = {voter_id: i for i, voter_id in enumerate(dataset.voter_ids)}
    col_index = {bill_id: j for j, bill_id in enumerate(dataset.bill_ids)}
    Z = np.zeros((dataset.n_voters, dataset.n_bills), dtype=np.int8)
    for (voter_id, bill_id), value in dataset.votes.items():
        i = row_index.get(voter_id)
        j = col_index.get(bill_id)
        if i is not None and j is not None:
            Z[i, j] = int(value)
    return EncodedMatrix(values=Z, row_ids=tuple(dataset.voter_ids), col_ids=tuple(dataset.bill_ids))


def transpose(encoded: EncodedMatrix) -> EncodedMatrix:
    """Bills x voters view of an encoded matrix."""
    return EncodedMatrix(
        values=np.ascontiguousarray(encoded.values.T),
        row_ids=encoded.col_ids,
        col_ids=encoded.row_ids,
    )


def standardize_array(
    values: np.ndarray, col_ids: tuple[str, ...] | None = None
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Center each column and divide by the root of its sum of squared deviations.

    Returns ``(X, means, norms)``. Columns are independent; numpy reduces each one in
    a fixed order so results do not depend on threading.
    """
    Z = np.asarray(values, dtype=np.float64)
    if Z.ndim != 2 or Z.shape[0] == 0 or Z.shape[1] == 0:
        raise DimensionMismatch(f"preprocess: expected a non-empty 2-D matrix, got shape {Z.shape}")
    means = Z.mean(axis=0)
    deviations = Z - means
    norms = np.sqrt(np.sum(deviations * deviations, axis=0))
    # constant real columns can leave rounding residue after centering
    scale = 1e-12 * np.sqrt(Z.shape[0]) * (1.0 + np.abs(Z).max(axis=0))
    flat = np.flatnonzero(norms <= scale)
    if flat.size:
        names = [col_ids[j] if col_ids else str(j) for j in flat[:5]]
        raise ZeroVarianceColumn(
            f"preprocess: {flat.size} zero-variance column(s), e.g. {', '.join(names)}"
        )
    return deviations / norms, means, norms


def standardize(encoded: EncodedMatrix) -> StandardizedMatrix:
    """Column-standardize Z so every column sums to 0 and has unit Euclidean norm."""
    X, means, norms = standardize_array(encoded.values, encoded.col_ids)
    return StandardizedMatrix(
        values=X,
        column_means=means,
        column_norms=norms,
        row_ids=encoded.row_ids,
        col_ids=encoded.col_ids,
    )


def apply_standardization(reference: StandardizedMatrix, encoded: EncodedMatrix) -> StandardizedMatrix:
    """Standardize held-out voters with the reference matrix's column statistics."""
    if tuple(encoded.col_ids) != tuple(reference.col_ids):
        raise DimensionMismatch("preprocess: held-out bills do not match the reference bills")
    X = (np.asarray(encoded.values, dtype=np.float64) - reference.column_means) / reference.column_norms
    return StandardizedMatrix(
        values=X,
        column_means=reference.column_means,
        column_norms=reference.column_norms,
        row_ids=encoded.row_ids,
        col_ids=encoded.col_ids,
    )


def standardized_to_csv(matrix: StandardizedMatrix) -> str:
    """CSV text: bill ids as header, voter ids in the first column, 12 significant digits."""
    frame = pd.DataFrame(matrix.values, index=list(matrix.row_ids), columns=list(matrix.col_ids))
    frame.index.name = "voter_id"
    return frame.to_csv(float_format=STANDARDIZED_FORMAT, lineterminator="\n")


def dump_standardized(matrix: StandardizedMatrix, path) -> None:
    save_text_safely(standardized_to_csv(matrix), path)
