from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from lagosc import matlib
from lagosc.errors import NonSymmetric, NotPositiveDefinite
from lagosc.lagrangian import vertical_plane


class TestNumericRank:
    def test_identity(self):
        assert matlib.numeric_rank(np.eye(3)) == 3

    def test_zero(self):
        assert matlib.numeric_rank(np.zeros((2, 2))) == 0

    def test_tiny_singular_value_is_dropped(self):
        assert matlib.numeric_rank(np.diag([1.0, 1e-14])) == 1

    def test_absolute_scale(self):
        # relative to 1, a matrix of size 1e-12 is numerically zero
        assert matlib.numeric_rank(1e-12 * np.eye(2), scale=1.0) == 0
        assert matlib.numeric_rank(1e-12 * np.eye(2)) == 2


class TestPseudoinverse:
    def test_identity(self):
        np.testing.assert_allclose(matlib.pseudoinverse(np.eye(3)), np.eye(3))

    def test_zero_is_transposed_shape(self):
        out = matlib.pseudoinverse(np.zeros((2, 3)))
        assert out.shape == (3, 2)
        assert not out.any()

    def test_diag(self):
        np.testing.assert_allclose(matlib.pseudoinverse(np.diag([2.0, 0.0])), np.diag([0.5, 0.0]))

    @settings(max_examples=50, deadline=None)
    @given(arrays(np.float64, (3, 4), elements=st.floats(-5, 5)))
    def test_penrose_conditions(self, A):
        P = matlib.pseudoinverse(A)
        scale = max(1.0, float(np.abs(A).max()))
        assert np.allclose(A @ P @ A, A, atol=1e-8 * scale)
        assert np.allclose((A @ P).T, A @ P, atol=1e-8)


class TestInertia:
    def test_mixed(self):
        assert matlib.negative_index(np.diag([1.0, -1.0, 0.0])) == 1
        assert matlib.inertia(np.diag([1.0, -1.0, 0.0])) == (1, 1, 1)

    def test_zero(self):
        assert matlib.negative_index(np.zeros((3, 3))) == 0

    def test_negative_definite(self):
        assert matlib.negative_index(np.diag([-3.0, -0.5])) == 2

    def test_rejects_asymmetric(self):
        with pytest.raises(NonSymmetric):
            matlib.negative_index(np.array([[0.0, 1.0], [0.0, 0.0]]))

    def test_margins(self):
        neg, zero, pos, zmax, nzmin = matlib.eigen_classification(np.diag([2.0, -0.5, 1e-13]))
        assert (neg, zero, pos) == (1, 1, 1)
        assert zmax == pytest.approx(1e-13)
        assert nzmin == pytest.approx(0.5)


class TestInvSqrt:
    def test_identity(self):
        np.testing.assert_allclose(matlib.inv_sqrt_spd(np.eye(2)), np.eye(2))

    def test_diag(self):
        np.testing.assert_allclose(matlib.inv_sqrt_spd(np.diag([4.0, 9.0])), np.diag([0.5, 1 / 3]))

    def test_scalar(self):
        np.testing.assert_allclose(matlib.inv_sqrt_spd(np.array([[16.0]])), [[0.25]])

    def test_singular(self):
        with pytest.raises(NotPositiveDefinite):
            matlib.inv_sqrt_spd(np.diag([1.0, 0.0]))

    @settings(max_examples=40, deadline=None)
    @given(arrays(np.float64, (3, 3), elements=st.floats(-3, 3)))
    def test_k_g_k_is_identity(self, A):
        G = A @ A.T + np.eye(3)
        K = matlib.inv_sqrt_spd(G)
        np.testing.assert_allclose(K @ G @ K, np.eye(3), atol=1e-9)


class TestPredicates:
    def test_j_is_symplectic(self):
        J = matlib.canonical_j(2)
        assert matlib.is_symplectic(J)
        assert matlib.is_orthogonal(J)

    def test_vertical_plane_is_lagrangian(self):
        assert matlib.is_lagrangian_frame(vertical_plane(3))

    def test_diagonal_plane_is_lagrangian(self):
        # (I; I) is isotropic and of full rank
        assert matlib.is_lagrangian_frame(np.vstack([np.eye(2), np.eye(2)]))

    def test_non_isotropic_frame(self):
        Y = np.array([[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]])
        assert not matlib.is_lagrangian_frame(Y)

    def test_rank_deficient_frame(self):
        assert not matlib.is_lagrangian_frame(np.zeros((4, 2)))

    def test_symplectic_inverse(self, rng):
        from lagosc.hamgen import random_symplectic

        S = random_symplectic(3, rng)
        np.testing.assert_allclose(matlib.symplectic_inverse(S) @ S, np.eye(6), atol=1e-10)


def test_tolerances_from_env(monkeypatch):
    monkeypatch.setenv("OSK_TOL_RANK", "1e-6")
    assert matlib.Tolerances.from_env().rank_rtol == 1e-6
    with pytest.raises(ValueError):
        matlib.Tolerances(rank_rtol=0.0)
