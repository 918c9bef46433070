"""Tests for dense PCA, projection and expressed variance."""

import numpy as np
import pytest

from polidna.models import ComponentBasis, StandardizedMatrix
from polidna.pca import (
    component_listing,
    components_to_csv,
    expressed_variance,
    pca_fit,
    project,
    sign_convention,
)
from polidna.utils import DimensionMismatch, InvalidParameter, KTooLarge, RankDeficient


def _standardized(X) -> StandardizedMatrix:
    X = np.asarray(X, dtype=float)
    return StandardizedMatrix(
        values=X,
        column_means=np.zeros(X.shape[1]),
        column_norms=np.ones(X.shape[1]),
        row_ids=tuple(f"v{i}" for i in range(X.shape[0])),
        col_ids=tuple(f"b{j}" for j in range(X.shape[1])),
    )


class TestSignConvention:
    """Test the deterministic sign of a direction."""

    def test_flips_negative_pivot(self):
        """Test that the largest-magnitude entry ends up positive."""
        v, u = sign_convention(np.array([0.1, -0.9, 0.3]), np.array([1.0, 2.0]))

        np.testing.assert_allclose(v, [-0.1, 0.9, -0.3])
        np.testing.assert_allclose(u, [-1.0, -2.0])

    def test_tie_uses_lowest_index(self):
        """Test that equal magnitudes are decided by the first one."""
        v, _ = sign_convention(np.array([-0.5, 0.5]))
        np.testing.assert_allclose(v, [0.5, -0.5])


class TestPcaFit:
    """Test the truncated SVD."""

    def test_rank_one_recovered(self):
        """Test that X = a b^T yields b / ||b||."""
        a = np.array([1.0, -2.0, 0.5, 3.0, -1.0])
        b = np.array([0.2, -0.4, 0.8, 0.1])
        basis = pca_fit(np.outer(a, b), 1)

        np.testing.assert_allclose(basis.directions[:, 0], b / np.linalg.norm(b), atol=1e-12)
        assert basis.singular_values[0] == pytest.approx(np.linalg.norm(a) * np.linalg.norm(b))
        assert basis.kind == "dense"

    def test_directions_are_orthonormal(self):
        """Test V_k^T V_k = I."""
        X = np.random.default_rng(1).normal(size=(30, 12))
        V = pca_fit(X, 5).directions

        np.testing.assert_allclose(V.T @ V, np.eye(5), atol=1e-12)

    def test_sign_convention_applied(self):
        """Test that every direction's largest entry is positive."""
        X = np.random.default_rng(2).normal(size=(20, 8))
        V = pca_fit(X, 4).directions

        for i in range(4):
            assert V[np.argmax(np.abs(V[:, i])), i] > 0

    def test_k_too_large(self):
        """Test k > min(m, n)."""
        with pytest.raises(KTooLarge, match="exceeds min"):
            pca_fit(np.ones((3, 5)), 4)

    def test_rank_deficient(self):
        """Test k above the numerical rank."""
        with pytest.raises(RankDeficient, match="numerical rank 1"):
            pca_fit(np.outer(np.arange(1.0, 6.0), np.arange(1.0, 5.0)), 2)

    def test_rank_deficient_is_k_too_large(self):
        """Test that rank errors are catchable as KTooLarge."""
        assert issubclass(RankDeficient, KTooLarge)

    def test_non_positive_k(self):
        """Test k = 0."""
        with pytest.raises(InvalidParameter):
            pca_fit(np.eye(3), 0)


class TestProjection:
    """Test projection and expressed variance."""

    def test_project_keeps_row_ids(self):
        """Test X_k = X V_k with voter ids carried along."""
        X = _standardized(np.random.default_rng(3).normal(size=(6, 4)))
        basis = pca_fit(X, 2)
        projected = project(X, basis)

        assert projected.values.shape == (6, 2)
        assert projected.row_ids == X.row_ids
        np.testing.assert_allclose(projected.values, X.values @ basis.directions)

    def test_project_dimension_mismatch(self):
        """Test a basis built for other bills."""
        basis = pca_fit(np.random.default_rng(4).normal(size=(5, 4)), 2)

        with pytest.raises(DimensionMismatch):
            project(np.ones((5, 3)), basis)

    def test_residual_identity(self):
        """Test ||X||^2 = ||X V||^2 + ||X - X V V^T||^2 on random matrices."""
        rng = np.random.default_rng(5)
        for _ in range(100):
            m, n = rng.integers(3, 30, size=2)
            X = rng.normal(size=(m, n))
            k = int(rng.integers(1, min(m, n) + 1))
            V = pca_fit(X, k).directions
            captured = X @ V
            residual = X - captured @ V.T

            assert np.sum(X * X) == pytest.approx(
                np.sum(captured * captured) + np.sum(residual * residual), rel=1e-10
            )

    def test_evar_full_rank_is_one(self):
        """Test that all components explain everything."""
        X = np.random.default_rng(6).normal(size=(10, 4))
        assert expressed_variance(X, pca_fit(X, 4)) == pytest.approx(1.0)

    def test_evar_monotone_in_k(self):
        """Test that E-Var never decreases with k."""
        X = np.random.default_rng(7).normal(size=(25, 10))
        evars = [expressed_variance(X, pca_fit(X, k)) for k in range(1, 11)]

        assert all(b >= a - 1e-12 for a, b in zip(evars, evars[1:]))
        assert 0.0 < evars[0] <= 1.0

    def test_evar_of_non_orthogonal_basis(self):
        """Test that sparse directions are orthonormalized before measuring."""
        X = np.random.default_rng(8).normal(size=(12, 3))
        directions = np.array([[1.0, 1.0], [0.0, 1.0], [0.0, 0.0]])
        basis = ComponentBasis(directions=directions, singular_values=np.ones(2), kind="sparse")

        expected = np.sum(X[:, :2] ** 2) / np.sum(X * X)
        assert expressed_variance(X, basis) == pytest.approx(expected)


class TestComponentOutput:
    """Test component listings and CSV."""

    def test_dense_csv_header(self):
        """Test the bill x component matrix layout."""
        X = _standardized(np.random.default_rng(9).normal(size=(6, 3)))
        text = components_to_csv(pca_fit(X, 2), X.col_ids)

        assert text.splitlines()[0] == "bill_id,pc1,pc2"
        assert len(text.splitlines()) == 4

    def test_listing_sorted_by_magnitude(self):
        """Test that each component lists its support by |loading| descending."""
        directions = np.array([[0.2, 0.0], [-0.9, 1.0], [0.0, 0.0], [0.4, 0.0]])
        basis = ComponentBasis(directions=directions, singular_values=np.ones(2), kind="sparse", sparsity=3)
        frame = component_listing(basis, ("b0", "b1", "b2", "b3"))

        assert frame["bill_id"].tolist() == ["b1", "b3", "b0", "b1"]
        assert frame["component"].tolist() == [1, 1, 1, 2]
