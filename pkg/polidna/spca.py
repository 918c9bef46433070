"""Sparse PCA: l0-constrained rank-1 approximation by truncated power iteration, with deflation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy import linalg

from .constants import (
    DEFLATION_TOLERANCE,
    ORACLE_MAX_COLUMNS,
    ORACLE_MAX_SUPPORT,
    SPCA_COLUMN_SEEDS,
    SPCA_MAX_ITERATIONS,
    SPCA_TOLERANCE,
)
from .models import ComponentBasis, StandardizedMatrix
from .pca import expressed_variance, pca_fit, sign_convention
from .utils import BudgetExceeded, DeflationExhausted, InvalidParameter, KTooLarge, ZeroMatrix

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class SparseComponent:
    """One sparse rank-1 factor: X ~ sigma * u v^T with ||v||_0 <= p."""

    v: np.ndarray
    u: np.ndarray
    sigma: float
    converged: bool = True
    iterations: int = 0
    objective_trace: tuple[float, ...] = field(default_factory=tuple)
    restart: int = 0

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.v)


@dataclass(frozen=True, eq=False)
class OracleResult:
    v: np.ndarray
    sigma: float
    support: tuple[int, ...]


@dataclass(frozen=True)
class SweepRow:
    method: str
    k: int
    p: int | None
    expressed_variance: float


def _values(X: StandardizedMatrix | np.ndarray) -> np.ndarray:
    if isinstance(X, StandardizedMatrix):
        return X.values
    return np.asarray(X, dtype=np.float64)


def hard_threshold(w: np.ndarray, p: int) -> np.ndarray:
    """Keep the p largest-magnitude entries; equal magnitudes keep the lower index."""
    if p >= w.size:
        return w.copy()
    keep = np.argsort(-np.abs(w), kind="stable")[:p]
    out = np.zeros_like(w)
    out[keep] = w[keep]
    return out


def _power_iterate(X: np.ndarray, v: np.ndarray, p: int, restart: int) -> SparseComponent:
    # the objective is non-decreasing only from a feasible (p-sparse) start
    v = hard_threshold(v, p)
    v = v / np.linalg.norm(v)
    Xv = X @ v
    if not np.any(Xv):
        # start lies in the null space; fall back to the largest-norm column
        v = np.zeros_like(v)
        v[int(np.argmax(np.linalg.norm(X, axis=0)))] = 1.0
        Xv = X @ v
    sigma = float(np.linalg.norm(Xv))
    u = Xv / sigma
    trace = [sigma]
    converged = False
    iterations = 0
    for iterations in range(1, SPCA_MAX_ITERATIONS + 1):
        w = hard_threshold(X.T @ u, p)
        norm = np.linalg.norm(w)
        if norm == 0.0:
            break
        v_next = w / norm
        Xv = X @ v_next
        sigma_next = float(np.linalg.norm(Xv))
        if sigma_next == 0.0:
            break
        improvement = sigma_next - sigma
        v, u, sigma = v_next, Xv / sigma_next, sigma_next
        trace.append(sigma)
        if improvement < SPCA_TOLERANCE * sigma:
            converged = True
            break
    if not converged:
        logger.debug("spca: restart %d stopped after %d iterations", restart, iterations)
    v, u = sign_convention(v, u)
    return SparseComponent(
        v=v,
        u=u,
        sigma=sigma,
        converged=converged,
        iterations=iterations,
        objective_trace=tuple(trace),
        restart=restart,
    )


def spca_rank1(
    X: StandardizedMatrix | np.ndarray,
    p: int,
    restarts: int = 0,
    start: np.ndarray | None = None,
) -> SparseComponent:
    """Best rank-1 approximation with at most p nonzero entries in v.

    Starts from the dense leading singular pair, then from ``start`` when given, then from
    the coordinate vectors of the ``SPCA_COLUMN_SEEDS + restarts`` largest-norm columns.
    The best objective wins; runs within the convergence tolerance of it count as ties,
    which earlier runs win.
    """
    values = _values(X)
    n = values.shape[1]
    if p < 1:
        raise InvalidParameter(f"spca: p must be positive, got {p}")
    if restarts < 0:
        raise InvalidParameter(f"spca: restarts must be non-negative, got {restarts}")
    if not np.any(values):
        raise ZeroMatrix("spca: the matrix is all zeros")
    p = min(p, n)

    _, _, vt = linalg.svd(values, full_matrices=False)
    best = _power_iterate(values, vt[0].copy(), p, restart=0)
    runs = 1
    if start is not None and np.any(hard_threshold(start, p)):
        candidate = _power_iterate(values, np.asarray(start, dtype=np.float64), p, restart=runs)
        if candidate.sigma > best.sigma * (1.0 + SPCA_TOLERANCE):
            best = candidate
        runs += 1

    column_norms = np.linalg.norm(values, axis=0)
    seeds = np.argsort(-column_norms, kind="stable")[: SPCA_COLUMN_SEEDS + restarts]
    for restart, j in enumerate(seeds, start=runs):
        if column_norms[j] == 0.0:
            continue
        seed = np.zeros(n)
        seed[j] = 1.0
        candidate = _power_iterate(values, seed, p, restart=restart)
        if candidate.sigma > best.sigma * (1.0 + SPCA_TOLERANCE):
            best = candidate
    return best


def _extract(
    values: np.ndarray,
    k: int,
    p: int,
    restarts: int = 0,
    fixed: ComponentBasis | None = None,
    warm_start: ComponentBasis | None = None,
) -> ComponentBasis:
    # fixed directions are replayed as they are; the rest come from the residual they leave
    n = values.shape[1]
    total = float(np.linalg.norm(values))
    residual = values.copy()
    directions = np.zeros((n, k))
    sigmas = np.zeros(k)
    converged = []
    n_fixed = 0 if fixed is None else min(fixed.k, k)
    for i in range(k):
        if i < n_fixed:
            v = fixed.directions[:, i]
            Xv = residual @ v
            sigma = float(np.linalg.norm(Xv))
            u = Xv / sigma if sigma > 0.0 else np.zeros_like(Xv)
            converged.append(fixed.converged[i] if i < len(fixed.converged) else True)
        else:
            if np.linalg.norm(residual) < DEFLATION_TOLERANCE * total:
                raise DeflationExhausted(f"spca: residual vanished after {i} of {k} components")
            start = None
            if warm_start is not None and i < warm_start.k:
                start = warm_start.directions[:, i]
            component = spca_rank1(residual, p, restarts=restarts, start=start)
            v, u, sigma = component.v, component.u, component.sigma
            converged.append(component.converged)
        directions[:, i] = v
        sigmas[i] = sigma
        residual = residual - sigma * np.outer(u, v)
    return ComponentBasis(
        directions=directions,
        singular_values=sigmas,
        kind="sparse",
        sparsity=min(p, n),
        converged=tuple(converged),
    )


def spca_fit(
    X: StandardizedMatrix | np.ndarray,
    k: int,
    p: int,
    restarts: int = 0,
    warm_start: ComponentBasis | None = None,
) -> ComponentBasis:
    """k sparse directions, each extracted from the residual left by the previous ones.

    ``warm_start`` adds one more start per component: the matching direction of an
    earlier basis, typically the fit at a smaller p.
    """
    values = _values(X)
    m, n = values.shape
    if k < 1:
        raise InvalidParameter(f"spca: k must be positive, got {k}")
    if k > min(m, n):
        raise KTooLarge(f"spca: k={k} exceeds min(m, n)={min(m, n)}")
    basis = _extract(values, k, p, restarts=restarts, warm_start=warm_start)
    logger.debug("spca: k=%d p=%d sigmas %s", k, p, basis.singular_values)
    return basis


def spca_oracle(X: StandardizedMatrix | np.ndarray, p: int) -> OracleResult:
    """Exact best support of size p by enumeration; only for small instances."""
    values = _values(X)
    n = values.shape[1]
    if n > ORACLE_MAX_COLUMNS or p > ORACLE_MAX_SUPPORT:
        raise BudgetExceeded(
            f"spca: oracle limited to n <= {ORACLE_MAX_COLUMNS} and p <= {ORACLE_MAX_SUPPORT}"
        )
    if p < 1:
        raise InvalidParameter(f"spca: p must be positive, got {p}")
    p = min(p, n)

    best_sigma = -1.0
    best_support: tuple[int, ...] = ()
    best_v = np.zeros(n)
    for support in combinations(range(n), p):
        _, s, vt = linalg.svd(values[:, support], full_matrices=False)
        if s[0] > best_sigma:
            best_sigma = float(s[0])
            best_support = support
            best_v = np.zeros(n)
            best_v[list(support)] = vt[0]
    best_v, _ = sign_convention(best_v)
    return OracleResult(v=best_v, sigma=best_sigma, support=best_support)


def spca_grid(
    X: StandardizedMatrix | np.ndarray,
    ks: list[int],
    ps: list[int],
    restarts: int = 0,
) -> dict[tuple[int, int], ComponentBasis]:
    """Sparse bases over a (k, p) grid, E-Var non-decreasing along both axes.

    Each cell keeps the best of three candidates: a fit warm-started from the cell at the
    previous p, that previous basis itself (still feasible at a larger p), and the basis
    at the previous k extended by greedy components. Cells are visited in ascending k and p.
    """
    values = _values(X)
    grid: dict[tuple[int, int], ComponentBasis] = {}
    ks = sorted(set(ks))
    ps = sorted(set(ps))
    for a, k in enumerate(ks):
        for b, p in enumerate(ps):
            previous_p = grid.get((k, ps[b - 1])) if b else None
            previous_k = grid.get((ks[a - 1], p)) if a else None
            candidates = [spca_fit(values, k, p, restarts=restarts, warm_start=previous_p)]
            if previous_p is not None:
                candidates.append(_extract(values, k, p, fixed=previous_p))
            if previous_k is not None:
                try:
                    candidates.append(_extract(values, k, p, restarts=restarts, fixed=previous_k))
                except DeflationExhausted:
                    pass
            scores = [expressed_variance(values, basis) for basis in candidates]
            grid[(k, p)] = candidates[int(np.argmax(scores))]
    return grid


def evar_sweep(
    X: StandardizedMatrix | np.ndarray,
    ks: list[int],
    ps: list[int | None],
    restarts: int = 0,
) -> list[SweepRow]:
    """E-Var of dense PCA and of sparse PCA at every sparsity level, for each k.

    A ``None`` sparsity level stands for the dense row, which is always listed first.
    """
    sparse_levels = [p for p in ps if p is not None]
    grid = spca_grid(X, ks, sparse_levels, restarts=restarts) if sparse_levels else {}
    rows = []
    for k in ks:
        rows.append(SweepRow("pca", k, None, expressed_variance(X, pca_fit(X, k))))
        for p in sparse_levels:
            rows.append(SweepRow("spca", k, p, expressed_variance(X, grid[(k, p)])))
    return rows
