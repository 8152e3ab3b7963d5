from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lagosc import hamgen, matlib
from lagosc.errors import EvaluatorMissing, NotLagrangian, RefinementExhausted, SingularFactor
from lagosc.lagrangian import (
    SampledLagrangianPath,
    constant_path,
    factor_symplectic,
    load_path,
    multiply_right,
    path_from_dict,
    refine_path,
    save_path,
    transform_path,
    vertical_plane,
    wronskian,
    z_frame,
)
from lagosc.lidskii import angle_step_criterion
from lagosc.oscnum import oscillation_pair


def test_vertical_plane():
    np.testing.assert_array_equal(vertical_plane(1), [[0.0], [1.0]])
    E = vertical_plane(2)
    assert E.shape == (4, 2)
    assert not E[:2].any()
    np.testing.assert_array_equal(E[2:], np.eye(2))
    assert matlib.is_lagrangian_frame(E)


class TestWronskian:
    def test_self(self):
        assert not wronskian(vertical_plane(2), vertical_plane(2)).any()

    def test_vertical_against_horizontal(self):
        np.testing.assert_allclose(wronskian(vertical_plane(1), [[1.0], [0.0]]), [[-1.0]])

    @pytest.mark.parametrize("theta", [0.3, 1.0, 2.5])
    def test_scalar(self, theta):
        W = wronskian([[1.0], [0.0]], [[math.cos(theta)], [math.sin(theta)]])
        np.testing.assert_allclose(W, [[math.sin(theta)]])

    def test_antisymmetric_in_arguments(self, rng):
        Y, Yh = hamgen.random_frame_pair(3, rng)
        np.testing.assert_allclose(wronskian(Y, Yh), -wronskian(Yh, Y).T, atol=1e-12)


class TestZFrame:
    def test_vertical_gives_identity(self):
        np.testing.assert_allclose(z_frame(vertical_plane(3)), np.eye(6))

    @pytest.mark.parametrize("alpha", [0.0, 0.7, 2.0, -1.2])
    def test_scalar_rotation(self, alpha):
        Z = z_frame([[math.sin(alpha)], [math.cos(alpha)]])
        c, s = math.cos(alpha), math.sin(alpha)
        np.testing.assert_allclose(Z, [[c, s], [-s, c]], atol=1e-15)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_orthogonal_symplectic_and_commutes_with_j(self, n, seed):
        Y = hamgen.random_frame(n, np.random.default_rng(seed))
        Z = z_frame(Y)
        J = matlib.canonical_j(n)
        assert matlib.is_symplectic(Z) and matlib.is_orthogonal(Z)
        np.testing.assert_allclose(Z @ J, J @ Z, atol=1e-12)
        # Z E spans the plane of Y
        Q, _ = np.linalg.qr(Y)
        ZE = Z @ vertical_plane(n)
        np.testing.assert_allclose(ZE - Q @ (Q.T @ ZE), 0.0, atol=1e-10)


class TestFactorSymplectic:
    def test_identity(self):
        Zp, Lp = factor_symplectic(np.eye(4))
        np.testing.assert_allclose(Zp, np.eye(4))
        np.testing.assert_allclose(Lp, np.eye(4))

    def test_orthogonal_symplectic_has_trivial_lower_part(self, rng):
        S = hamgen.orthogonal_symplectic(hamgen.random_unitary(3, rng))
        _, Lp = factor_symplectic(S)
        np.testing.assert_allclose(Lp, np.eye(6), atol=1e-10)

    def test_reconstruction(self, rng):
        S = hamgen.random_symplectic(2, rng)
        Zp, Lp = factor_symplectic(S)
        assert np.max(np.abs(Zp @ Lp - S)) < matlib.DEFAULT_TOL.struct_atol
        assert np.max(np.abs(Lp[:2, 2:])) < matlib.DEFAULT_TOL.struct_atol


class TestSampledPath:
    def test_rejects_non_lagrangian_frames(self):
        bad = np.array([[[1.0, 0.0], [0.0, 0.0], [0.0, 1.0], [0.0, 0.0]]])
        with pytest.raises(NotLagrangian):
            SampledLagrangianPath([0.0], bad)

    def test_rejects_non_increasing_grid(self):
        E = vertical_plane(1)
        with pytest.raises(ValueError):
            SampledLagrangianPath([0.0, 0.0], np.stack([E, E]))

    def test_frame_at_without_evaluator(self):
        E = vertical_plane(1)
        p = SampledLagrangianPath([0.0, 1.0], np.stack([E, E]))
        np.testing.assert_array_equal(p.frame_at(1.0), E)
        with pytest.raises(EvaluatorMissing):
            p.frame_at(0.5)

    def test_restrict_and_densify(self, rotation):
        half = rotation.restrict(0.0, math.pi)
        assert half.a == 0.0 and half.b == math.pi
        dense = rotation.densified(3)
        assert dense.t.size == 3 * (rotation.t.size - 1) + 1


class TestRefinePath:
    def test_already_fine(self, rotation):
        out = refine_path(rotation, angle_step_criterion())
        np.testing.assert_array_equal(out.t, rotation.t)

    def test_two_nodes_are_bisected(self):
        coarse = hamgen.rotation_path(1, interval=(0.0, 1.5 * math.pi), nodes=2)
        out = refine_path(coarse, angle_step_criterion(bound=math.pi / 2))
        assert out.t.size >= 7

    def test_evaluator_missing(self):
        E = vertical_plane(1)
        p = SampledLagrangianPath([0.0, 1.0], np.stack([E, E]))
        with pytest.raises(EvaluatorMissing):
            refine_path(p, lambda *a: True)

    def test_exhausted(self, rotation):
        with pytest.raises(RefinementExhausted) as info:
            refine_path(rotation, lambda *a: False, max_depth=3)
        assert info.value.segment[0] == 0.0


class TestTransforms:
    def test_identity_transform(self, rotation):
        out = transform_path(rotation, np.eye(2))
        np.testing.assert_allclose(out.frames, rotation.frames)

    def test_own_z_frame_gives_vertical(self, rotation):
        out = transform_path(rotation, lambda s: z_frame(rotation.frame_at(s)))
        for Y in out.frames:
            np.testing.assert_allclose(Y, vertical_plane(1), atol=1e-14)

    def test_right_multiple_keeps_oscillation(self, rotation):
        assert oscillation_pair(multiply_right(rotation, np.array([[2.0]]))) == (1, 2)

    def test_singular_right_factor(self, rotation):
        with pytest.raises(SingularFactor):
            multiply_right(rotation, np.zeros((1, 1)))


class TestFileFormat:
    def test_round_trip(self, rotation, tmp_path):
        f = tmp_path / "rot.json"
        save_path(rotation, f)
        back = load_path(f)
        np.testing.assert_array_equal(back.t, rotation.t)
        np.testing.assert_array_equal(back.frames, rotation.frames)
        assert back.meta == rotation.meta
        assert not back.refinable

    def test_malformed(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text("{not json")
        with pytest.raises(ValueError):
            load_path(f)
        with pytest.raises(ValueError):
            path_from_dict({"n": 1, "t": [0.0], "frames": [[0.0]]})

    def test_constant_path(self):
        p = constant_path(vertical_plane(2), [0.0, 1.0, 2.0])
        assert p.t.size == 3
        assert not p.derivative(0.5).any()
