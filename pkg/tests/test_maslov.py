from __future__ import annotations

import math

import numpy as np
import pytest

from lagosc import hamgen
from lagosc.errors import NotMonotone
from lagosc.lagrangian import constant_path, multiply_right, vertical_plane
from lagosc.maslov import (
    dual_maslov_index,
    gamma_matrix,
    maslov_crossing_oracle,
    maslov_index,
    maslov_pair,
    monotone_maslov,
    similarity_gap,
    transformed_path,
    verify_flipping,
    verify_maslov_comparison,
)
from lagosc.oscnum import oscillation_pair


@pytest.fixture
def vertical(rotation):
    return constant_path(vertical_plane(1), rotation.t)


class TestGamma:
    def test_equal_frames(self, rng):
        Y = hamgen.random_frame(3, rng)
        np.testing.assert_allclose(gamma_matrix(Y, Y).Gamma, -np.eye(3), atol=1e-10)

    @pytest.mark.parametrize("t", [0.0, 0.4, 2.0, 4.5])
    def test_vertical_against_rotation(self, t):
        Yh = np.array([[math.sin(t)], [math.cos(t)]])
        G = gamma_matrix(vertical_plane(1), Yh).Gamma
        np.testing.assert_allclose(G, [[-np.exp(2j * t)]], atol=1e-12)

    def test_similar_to_minus_ws(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 5))
            Y, Yh = hamgen.random_frame_pair(n, rng)
            assert similarity_gap(Y, Yh) < 1e-8


class TestAngleRoute:
    def test_reference_identity(self, vertical, rotation):
        assert maslov_pair(vertical, rotation) == oscillation_pair(rotation) == (1, 2)

    def test_same_path(self, rotation):
        assert maslov_pair(rotation, rotation) == (0, 0)
        assert dual_maslov_index(rotation, rotation) == 0

    def test_right_multipliers(self, rng):
        pY = hamgen.random_hamiltonian_path(2, rng)
        pYh = hamgen.random_hamiltonian_path(2, rng, interval=(pY.a, pY.b))
        C = hamgen.random_invertible(2, rng)
        Ch = hamgen.random_invertible(2, rng)
        assert maslov_pair(multiply_right(pY, C), multiply_right(pYh, Ch)) == maslov_pair(pY, pYh)

    def test_transformed_path(self, rng):
        pY = hamgen.random_hamiltonian_path(2, rng)
        pYh = hamgen.random_hamiltonian_path(2, rng, interval=(pY.a, pY.b))
        assert maslov_pair(pY, pYh) == oscillation_pair(transformed_path(pY, pYh))


class TestIdentities:
    def test_flipping_same_path(self, rotation):
        assert all(r.ok for r in verify_flipping(rotation, rotation))

    def test_flipping_rotation(self, vertical, rotation):
        assert dual_maslov_index(vertical, rotation) == -maslov_index(rotation, vertical)
        assert all(r.ok for r in verify_flipping(vertical, rotation))

    def test_random_pairs(self, rng):
        for _ in range(4):
            n = int(rng.integers(1, 3))
            pY = hamgen.random_hamiltonian_path(n, rng)
            pYh = hamgen.random_hamiltonian_path(n, rng, interval=(pY.a, pY.b))
            reps = verify_flipping(pY, pYh) + verify_maslov_comparison(pY, pYh)
            assert all(r.ok for r in reps), [r.as_dict() for r in reps]

    def test_comparison_trivial(self, rotation):
        assert all(r.ok for r in verify_maslov_comparison(rotation, rotation))
        assert all(r.ok for r in verify_maslov_comparison(constant_path(vertical_plane(1), rotation.t),
                                                          rotation))


class TestCrossingOracle:
    def test_rotation(self, vertical, rotation):
        assert maslov_crossing_oracle(vertical, rotation).value == 1
        assert maslov_crossing_oracle(vertical, rotation, dual=True).value == 2

    def test_constant(self, rng):
        Y, Yh = hamgen.random_frame_pair(2, rng)
        t = np.linspace(0, 1, 5)
        assert maslov_crossing_oracle(constant_path(Y, t), constant_path(Yh, t)).value == 0

    def test_random_pairs(self, rng):
        for _ in range(4):
            n = int(rng.integers(1, 4))
            pY = hamgen.random_hamiltonian_path(n, rng)
            pYh = hamgen.random_hamiltonian_path(n, rng, interval=(pY.a, pY.b))
            M, Ms = maslov_pair(pY, pYh)
            assert maslov_crossing_oracle(pY, pYh).value == M
            assert maslov_crossing_oracle(pY, pYh, dual=True).value == Ms


class TestMonotone:
    def test_vertical_against_rotation(self, vertical, rotation):
        out = monotone_maslov(vertical, rotation)
        assert (out["Mas"], out["Mas_star"]) == (1, 2)

    def test_both_constant(self, rng):
        t = np.linspace(0, 1, 5)
        Y, Yh = hamgen.random_frame_pair(2, rng)
        out = monotone_maslov(constant_path(Y, t), constant_path(Yh, t))
        assert (out["Mas"], out["Mas_star"]) == (0, 0)

    def test_psd_flows(self, rng):
        for _ in range(3):
            pYh = hamgen.random_hamiltonian_path(2, rng, psd=True)
            E = constant_path(vertical_plane(2), pYh.t)
            out = monotone_maslov(E, pYh)
            assert (out["Mas"], out["Mas_star"]) == maslov_pair(E, pYh)

    def test_rejects_wrong_direction(self, vertical, rotation):
        with pytest.raises(NotMonotone):
            monotone_maslov(rotation, vertical)
