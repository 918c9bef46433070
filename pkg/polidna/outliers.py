"""Voter blocs from sparse PCA of the transposed vote matrix, and the voters who break ranks."""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass

import numpy as np

from .gmm import dna_readout
from .models import (
    ComponentBasis,
    ComponentProfile,
    DnaVector,
    EncodedMatrix,
    OutlierEntry,
    StandardizedMatrix,
    VoteDataset,
)
from .pca import expressed_variance
from .preprocess import encode, standardize, transpose
from .spca import spca_fit
from .utils import VoterNotFound, ZeroVarianceColumn

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class OutlierAnalysis:
    """Profiles plus the fitted basis and the bills x voters matrix it was fitted on."""

    profiles: list[ComponentProfile]
    basis: ComponentBasis
    matrix: StandardizedMatrix
    expressed_variance: float
    k: int
    p: int
    excluded: tuple[str, ...] = ()

    @property
    def outliers(self) -> list[tuple[int, str, str]]:
        """(component, voter_id, nominal_group) for every flagged voter."""
        return [
            (profile.component, voter_id, group)
            for profile in self.profiles
            for voter_id, group in profile.outliers
        ]

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "p": self.p,
            "expressed_variance": self.expressed_variance,
            "excluded_voters": list(self.excluded),
            "components": [profile.to_dict() for profile in self.profiles],
        }


def constant_voters(encoded: EncodedMatrix) -> tuple[str, ...]:
    """Voters (columns of a bills x voters matrix) who cast the same vote on every bill."""
    values = encoded.values
    flat = np.all(values == values[:1], axis=0)
    return tuple(voter_id for voter_id, constant in zip(encoded.col_ids, flat, strict=True) if constant)


def transposed_matrix(dataset: VoteDataset) -> StandardizedMatrix:
    """Bills x voters, each voter column centered and scaled to unit norm.

    Voters with a constant vote have no variance over the bills and are left out.
    """
    encoded = transpose(encode(dataset))
    excluded = set(constant_voters(encoded))
    if excluded:
        if len(excluded) == len(encoded.col_ids):
            raise ZeroVarianceColumn("outliers: every voter casts the same vote on every bill")
        keep = np.array([voter_id not in excluded for voter_id in encoded.col_ids])
        encoded = EncodedMatrix(
            values=encoded.values[:, keep],
            row_ids=encoded.row_ids,
            col_ids=tuple(voter_id for voter_id in encoded.col_ids if voter_id not in excluded),
        )
    return standardize(encoded)


def dominant_group(groups: list[str]) -> tuple[str, float, bool]:
    """Plurality group, its share, and whether the plurality was tied.

    Ties go to the lexicographically smallest group id.
    """
    counts = Counter(groups)
    top = max(counts.values())
    leaders = sorted(group for group, count in counts.items() if count == top)
    return leaders[0], top / len(groups), len(leaders) > 1


def profile_component(
    component: int, direction: np.ndarray, voter_ids: tuple[str, ...], nominal_of: dict[str, str]
) -> ComponentProfile:
    support = np.flatnonzero(direction)
    # strongest loadings first
    support = support[np.argsort(-np.abs(direction[support]), kind="stable")]
    members = [voter_ids[j] for j in support]
    nominal = [nominal_of[voter_id] for voter_id in members]
    dominant, fraction, tie = dominant_group(nominal)
    outliers = tuple(
        (voter_id, group) for voter_id, group in zip(members, nominal, strict=True) if group != dominant
    )
    if tie:
        logger.warning("outliers: component %d has a plurality tie, using '%s'", component, dominant)
    return ComponentProfile(
        component=component,
        support=tuple(members),
        dominant_group=dominant,
        dominant_fraction=fraction,
        outliers=outliers,
        tie=tie,
    )


def outlier_analysis(dataset: VoteDataset, k: int, p: int, restarts: int = 0) -> OutlierAnalysis:
    """Sparse PCA over voters; each component's support is read as a bloc."""
    matrix = transposed_matrix(dataset)
    kept = set(matrix.col_ids)
    excluded = tuple(voter_id for voter_id in dataset.voter_ids if voter_id not in kept)
    if excluded:
        logger.warning(
            "outliers: %d voter(s) with a constant vote left out, e.g. %s",
            len(excluded),
            ", ".join(excluded[:5]),
        )
    basis = spca_fit(matrix, k, p, restarts=restarts)
    nominal_of = {voter.voter_id: voter.group for voter in dataset.voters}
    profiles = [
        profile_component(i + 1, basis.directions[:, i], matrix.col_ids, nominal_of)
        for i in range(basis.k)
    ]
    evar = expressed_variance(matrix, basis)
    logger.debug(
        "outliers: k=%d p=%d, %d flagged, E-Var %.4f",
        k,
        p,
        sum(len(profile.outliers) for profile in profiles),
        evar,
    )
    return OutlierAnalysis(
        profiles=profiles,
        basis=basis,
        matrix=matrix,
        expressed_variance=evar,
        k=k,
        p=p,
        excluded=excluded,
    )


def outlier_pipeline(dataset: VoteDataset, k: int, p: int, restarts: int = 0) -> list[ComponentProfile]:
    return outlier_analysis(dataset, k, p, restarts=restarts).profiles


def outlier_report(profiles: list[ComponentProfile], dna: list[DnaVector]) -> list[OutlierEntry]:
    """Join every outlier with its DNA, weights sorted descending."""
    by_voter = {vector.voter_id: vector for vector in dna}
    entries = []
    for profile in profiles:
        for voter_id, group in profile.outliers:
            vector = by_voter.get(voter_id)
            if vector is None:
                raise VoterNotFound(f"outliers: no DNA for voter '{voter_id}'")
            entries.append(
                OutlierEntry(
                    component=profile.component,
                    voter_id=voter_id,
                    nominal_group=group,
                    dominant_group=profile.dominant_group,
                    dna=tuple(dna_readout(vector)),
                )
            )
    return entries
