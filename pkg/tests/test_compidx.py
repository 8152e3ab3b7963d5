from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagosc import hamgen
from lagosc.compidx import (
    check_prop_duality,
    check_prop_lower_triangular,
    check_prop_right_mult,
    comparative_index,
    mu,
    mu_star,
)
from lagosc.errors import PreconditionViolated
from lagosc.lagrangian import vertical_plane, z_frame
from lagosc.lidskii import mu_via_lidskii

HORIZONTAL = np.array([[1.0], [0.0]])


def scalar_frame(theta):
    return np.array([[math.cos(theta)], [math.sin(theta)]])


def test_identical_arguments():
    b = comparative_index(vertical_plane(2), vertical_plane(2))
    assert (b.mu, b.mu_star, b.rank_M, b.rank_P) == (0, 0, 0, 0)


def test_vertical_against_horizontal():
    b = comparative_index(vertical_plane(1), HORIZONTAL)
    assert b.rank_M == 1
    assert (b.mu, b.mu_star) == (1, 1)


@pytest.mark.parametrize("theta, expected", [(math.pi / 4, (0, 1)), (3 * math.pi / 4, (1, 0))])
def test_scalar_cases(theta, expected):
    Yh = scalar_frame(theta)
    assert (mu(HORIZONTAL, Yh), mu_star(HORIZONTAL, Yh)) == expected


def test_breakdown_dict():
    d = comparative_index(HORIZONTAL, scalar_frame(math.pi / 4)).as_dict()
    assert d["mu"] == 0 and d["mu_star"] == 1 and d["rank_M"] == 0
    assert d["ind_negP"] == 1


class TestProperties:
    def test_trivial_right_factors(self, rng):
        Y, Yh = hamgen.random_frame_pair(3, rng)
        assert check_prop_right_mult(Y, Yh, np.eye(3), np.eye(3))

    def test_singular_right_factor(self, rng):
        Y, Yh = hamgen.random_frame_pair(2, rng)
        with pytest.raises(PreconditionViolated):
            check_prop_right_mult(Y, Yh, np.zeros((2, 2)), np.eye(2))

    def test_duality_with_canonical_z(self, rng):
        Y, Yh = hamgen.random_frame_pair(3, rng)
        assert check_prop_duality(Y, Yh, z_frame(Y))

    def test_duality_rejects_unrelated_z(self):
        # Z = I maps E to itself, not to the horizontal plane
        with pytest.raises(PreconditionViolated):
            check_prop_duality(HORIZONTAL, vertical_plane(1), np.eye(2))

    def test_lower_triangular_rejects_upper(self):
        U = np.block([[np.eye(1), np.eye(1)], [np.zeros((1, 1)), np.eye(1)]])
        with pytest.raises(PreconditionViolated):
            check_prop_lower_triangular(vertical_plane(1), HORIZONTAL, U)

    @settings(max_examples=60, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_random_instances(self, n, seed):
        rng = np.random.default_rng(seed)
        Y, Yh = hamgen.random_frame_pair(n, rng)
        b = comparative_index(Y, Yh)
        assert 0 <= b.mu <= n and 0 <= b.mu_star <= n
        assert b.mu + b.mu_star == 2 * b.rank_M + b.rank_P
        C1, C2 = hamgen.random_invertible(n, rng), hamgen.random_invertible(n, rng)
        assert check_prop_right_mult(Y, Yh, C1, C2)
        assert check_prop_lower_triangular(Y, Yh, hamgen.random_lower_triangular(n, rng))
        Z = z_frame(Y) @ hamgen.random_lower_triangular(n, rng)
        assert check_prop_duality(Y, Yh, Z)
        assert mu_via_lidskii(Y, Yh) == (b.mu, b.mu_star)
