"""Synthetic labeled vote datasets and Gaussian point clouds for validating the pipeline.

Every random draw comes from NumPy's ``Philox`` counter-based bit generator keyed by a
``SeedSequence``; bill ``j`` of a dataset uses the key ``[seed, j, attempt]``, so each bill
is reproducible on its own and independent of how the others were produced.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from datetime import date, timedelta

import numpy as np

from .constants import SYNTH_MAX_ATTEMPTS, SYNTH_START_DATE
from .models import Bill, GroupAssignment, Voter, VoteDataset, VoteValue
from .utils import InvalidParameter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SyntheticBlocs:
    """A generated dataset and its planted cross-voters (voter id -> group whose line it votes)."""

    dataset: VoteDataset
    planted: dict[str, str] = field(default_factory=dict)


def philox(*key: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(list(key))))


def group_ids(n_groups: int) -> tuple[str, ...]:
    return tuple(f"G{g + 1}" for g in range(n_groups))


def _per_group(value: float | list[float], n_groups: int, name: str) -> list[float]:
    if isinstance(value, (int, float)):
        return [float(value)] * n_groups
    values = [float(v) for v in value]
    if len(values) != n_groups:
        raise InvalidParameter(f"synth: {name} needs {n_groups} values, got {len(values)}")
    return values


def _sizes(sizes: int | list[int], n_groups: int) -> list[int]:
    if isinstance(sizes, int):
        return [sizes] * n_groups
    sizes = [int(s) for s in sizes]
    if len(sizes) != n_groups:
        raise InvalidParameter(f"synth: sizes needs {n_groups} values, got {len(sizes)}")
    return sizes


def _vote_column(
    rng: np.random.Generator,
    n_groups: int,
    member_group: np.ndarray,
    member_cohesion: np.ndarray,
    plant_rows: np.ndarray,
    plant_target: np.ndarray,
) -> np.ndarray:
    lines = rng.integers(-1, 2, size=n_groups)
    follow = rng.random(member_group.size) < member_cohesion
    # off-line voters pick uniformly between the two other values
    shift = rng.integers(1, 3, size=member_group.size)
    line = lines[member_group]
    column = np.where(follow, line, (line + 1 + shift) % 3 - 1)
    column[plant_rows] = lines[plant_target]
    return column


def gen_blocs(
    n_groups: int,
    voters_per_group: int | list[int],
    n_bills: int,
    cohesion: float | list[float] = 0.9,
    n_planted_outliers: int = 0,
    seed: int = 0,
) -> SyntheticBlocs:
    """Groups voting noisy party lines, plus planted voters who vote another group's line.

    Planted voter ``i`` keeps the label of group ``i % n_groups`` and votes the line of the
    next group exactly; it replaces the last not-yet-planted member of its group.
    """
    if n_groups < 2:
        raise InvalidParameter(f"synth: at least 2 groups are needed, got {n_groups}")
    if n_bills < 1:
        raise InvalidParameter(f"synth: n_bills must be positive, got {n_bills}")
    if n_planted_outliers < 0:
        raise InvalidParameter(f"synth: outliers must be non-negative, got {n_planted_outliers}")
    sizes = _sizes(voters_per_group, n_groups)
    if min(sizes) < 2:
        raise InvalidParameter(f"synth: every group needs at least 2 voters, got {sizes}")
    cohesions = _per_group(cohesion, n_groups, "cohesion")
    if any(not 0.5 <= c <= 1.0 for c in cohesions):
        raise InvalidParameter(f"synth: cohesion must lie in [0.5, 1], got {cohesions}")

    groups = group_ids(n_groups)
    member_group = np.repeat(np.arange(n_groups), sizes)
    offsets = np.concatenate([[0], np.cumsum(sizes)])

    plants_per_group = [0] * n_groups
    plant_rows = []
    plant_target = []
    for i in range(n_planted_outliers):
        g = i % n_groups
        if plants_per_group[g] >= sizes[g] - 1:
            raise InvalidParameter(
                f"synth: group {groups[g]} has {sizes[g]} voters, too few for its planted outliers"
            )
        plant_rows.append(offsets[g + 1] - 1 - plants_per_group[g])
        plant_target.append((g + 1) % n_groups)
        plants_per_group[g] += 1
    plant_rows_arr = np.array(plant_rows, dtype=np.intp)
    plant_target_arr = np.array(plant_target, dtype=np.intp)
    member_cohesion = np.array(cohesions)[member_group]

    voter_ids = [f"v{i + 1:04d}" for i in range(member_group.size)]
    bill_ids = [f"b{j + 1:04d}" for j in range(n_bills)]
    matrix = np.zeros((member_group.size, n_bills), dtype=np.int8)
    for j in range(n_bills):
        for attempt in range(SYNTH_MAX_ATTEMPTS):
            rng = philox(seed, j, attempt)
            column = _vote_column(
                rng, n_groups, member_group, member_cohesion, plant_rows_arr, plant_target_arr
            )
            if np.any(column != column[0]):
                break
        else:
            raise InvalidParameter(
                f"synth: bill {bill_ids[j]} had zero variance after {SYNTH_MAX_ATTEMPTS} attempts"
            )
        if attempt:
            logger.debug("synth: bill %s regenerated %d time(s)", bill_ids[j], attempt)
        matrix[:, j] = column

    start = date.fromisoformat(SYNTH_START_DATE)
    voters = tuple(Voter(voter_ids[i], groups[g]) for i, g in enumerate(member_group))
    bills = tuple(
        Bill(bill_id, start + timedelta(days=j), f"Synthetic bill {j + 1}")
        for j, bill_id in enumerate(bill_ids)
    )
    votes = {
        (voter_ids[i], bill_ids[j]): VoteValue(int(matrix[i, j]))
        for i in range(matrix.shape[0])
        for j in range(n_bills)
    }
    planted = {voter_ids[row]: groups[target] for row, target in zip(plant_rows, plant_target, strict=True)}
    dataset = VoteDataset(voters=voters, bills=bills, votes=votes, groups=groups)
    return SyntheticBlocs(dataset=dataset, planted=planted)


def group_means(n_groups: int, k: int, separation: float) -> np.ndarray:
    """Means whose nearest pairs sit exactly ``separation`` apart."""
    means = np.zeros((n_groups, k))
    if n_groups == 1:
        return means
    if k == 1:
        means[:, 0] = separation * np.arange(n_groups)
    elif k >= n_groups:
        means[:, :n_groups] = separation / np.sqrt(2.0) * np.eye(n_groups)
    else:
        radius = separation / (2.0 * np.sin(np.pi / n_groups))
        angles = 2.0 * np.pi * np.arange(n_groups) / n_groups
        means[:, 0] = radius * np.cos(angles)
        means[:, 1] = radius * np.sin(angles)
    return means


def gen_gmm(
    n_groups: int,
    k: int,
    separation: float,
    sizes: int | list[int],
    seed: int = 0,
) -> tuple[np.ndarray, GroupAssignment]:
    """Samples from unit spherical Gaussians, so Euclidean and Mahalanobis distances agree."""
    if n_groups < 1:
        raise InvalidParameter(f"synth: n_groups must be positive, got {n_groups}")
    if k < 1:
        raise InvalidParameter(f"synth: k must be positive, got {k}")
    if separation < 0:
        raise InvalidParameter(f"synth: separation must be non-negative, got {separation}")
    sizes = _sizes(sizes, n_groups)
    if min(sizes) < 1:
        raise InvalidParameter(f"synth: sizes must be positive, got {sizes}")

    means = group_means(n_groups, k, separation)
    blocks = [
        means[g] + philox(seed, g).standard_normal((sizes[g], k)) for g in range(n_groups)
    ]
    labels = GroupAssignment(
        indices=np.repeat(np.arange(n_groups), sizes),
        groups=group_ids(n_groups),
    )
    return np.vstack(blocks), labels
