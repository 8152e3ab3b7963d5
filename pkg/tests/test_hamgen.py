from __future__ import annotations

import math

import numpy as np
import pytest

from lagosc import hamgen, matlib
from lagosc.errors import OutOfRange, PreconditionViolated
from lagosc.lagrangian import vertical_plane, wronskian
from lagosc.oscnum import lidskii_trace, oscillation_pair, wronskian_rank

INTERVAL = (0.0, 1.5 * math.pi)


@pytest.fixture(scope="module")
def family():
    return hamgen.rotation_family(1, INTERVAL)


class TestRotation:
    def test_canonical(self, rotation):
        for s, Y in zip(rotation.t, rotation.frames):
            np.testing.assert_allclose(Y, [[math.sin(s)], [math.cos(s)]], atol=1e-15)

    def test_two_speeds(self, rotation_pair):
        tr = lidskii_trace(rotation_pair)
        np.testing.assert_allclose(np.sort(tr.angles, axis=1), np.sort(np.c_[2 * tr.t, 4 * tr.t], axis=1),
                                   atol=1e-8)

    def test_zero_speed_is_constant(self):
        p = hamgen.rotation_path(1, speeds=[0.0], interval=INTERVAL)
        assert np.ptp(p.frames, axis=0).max() == 0.0


class TestFlows:
    def test_identity_hamiltonian_reproduces_rotation(self):
        spec = hamgen.HamiltonianSpec.constant(np.eye(2), INTERVAL)
        p = hamgen.integrate_conjoined_basis(spec, vertical_plane(1))
        for s, Y in zip(p.t, p.frames):
            np.testing.assert_allclose(Y, [[math.sin(s)], [math.cos(s)]], atol=1e-8)

    def test_zero_hamiltonian_is_constant(self):
        spec = hamgen.HamiltonianSpec.constant(np.zeros((4, 4)), (0.0, 1.0))
        p = hamgen.integrate_conjoined_basis(spec)
        np.testing.assert_allclose(p.frames - vertical_plane(2), 0.0, atol=1e-15)
        assert oscillation_pair(p) == (0, 0)

    def test_random_frames_are_lagrangian(self, rng):
        spec = hamgen.random_trig_spec(2, rng)
        p = hamgen.integrate_conjoined_basis(spec)
        assert all(matlib.is_lagrangian_frame(Y) for Y in p.frames)

    def test_spec_round_trip(self, rng):
        spec = hamgen.random_trig_spec(2, rng)
        back = hamgen.HamiltonianSpec.from_dict(spec.to_dict())
        for s in (0.0, 0.3, 1.1):
            np.testing.assert_array_equal(back.H_of_t(s), spec.H_of_t(s))

    def test_rejects_asymmetric(self):
        with pytest.raises(ValueError):
            hamgen.HamiltonianSpec.constant(np.array([[0.0, 1.0], [0.0, 0.0]]), (0.0, 1.0))

    def test_flow_is_symplectic(self, rng):
        flow = hamgen.random_flow(3, rng)
        for s in flow.nodes[:: max(1, flow.nodes.size // 7)]:
            assert matlib.is_symplectic(flow.at(s))
        assert max(np.linalg.norm(flow.at(s), 2) for s in flow.nodes) <= hamgen.PHI_NORM_CAP


class TestPrincipal:
    def test_rotation(self, family):
        Ya, Yb = hamgen.principal_paths(family)
        np.testing.assert_array_equal(Ya.frames[0], vertical_plane(1))
        np.testing.assert_array_equal(Yb.frames[-1], vertical_plane(1))
        for s, Y in zip(Ya.t, Ya.frames):
            np.testing.assert_allclose(Y, [[math.sin(s)], [math.cos(s)]], atol=1e-12)
        assert oscillation_pair(Ya) == (1, 2)
        assert oscillation_pair(Yb) == (2, 1)

    def test_zero_hamiltonian(self):
        flow = hamgen.HamiltonianFlow(hamgen.HamiltonianSpec.constant(np.zeros((2, 2)), (0.0, 1.0)))
        Ya, Yb = hamgen.principal_paths(flow)
        for Y in (*Ya.frames, *Yb.frames):
            np.testing.assert_allclose(Y, vertical_plane(1), atol=1e-15)

    def test_wronskian_is_constant(self, rng):
        flow = hamgen.random_flow(2, rng)
        E = vertical_plane(2)
        Ca = matlib.symplectic_inverse(flow.at(flow.a)) @ E
        Cb = matlib.symplectic_inverse(flow.at(flow.b)) @ E
        W = [wronskian(flow.at(s) @ Ca, flow.at(s) @ Cb) for s in flow.nodes]
        np.testing.assert_allclose(W, np.broadcast_to(W[0], np.shape(W)), atol=1e-7)
        Ya, Yb = hamgen.principal_paths(flow)
        ranks = {wronskian_rank(A, B) for A, B in zip(Ya.frames, Yb.frames)}
        assert len(ranks) == 1


class TestPrescribed:
    def test_rectangle(self, family):
        rect = hamgen.oscillation_rectangle(family)
        assert rect["ell"] == (1, 2) and rect["r"] == (1, 2) and rect["w"] == 1

    @pytest.mark.parametrize("ell, r", [(1, 1), (2, 2), (1, 2), (2, 1)])
    def test_every_pair(self, family, ell, r):
        p = hamgen.prescribed_oscillation_path(family, ell, r)
        assert oscillation_pair(p) == (ell, r)
        assert p.meta["prescribed"] == {"ell": ell, "r": r, "anchor": "a" if ell >= r else "b"}

    def test_equal_pair_invertible_ends(self, family):
        p = hamgen.prescribed_oscillation_path(family, 1, 1)
        assert matlib.numeric_rank(p.frames[0][:1]) == 1
        assert matlib.numeric_rank(p.frames[-1][:1]) == 1

    @pytest.mark.parametrize("anchor, node", [("a", 0), ("b", -1)])
    def test_anchor_gives_identity(self, family, anchor, node):
        p = hamgen.prescribed_oscillation_path(family, 2, 2, anchor=anchor)
        np.testing.assert_allclose(p.frames[node][:1], np.eye(1), atol=1e-9)

    def test_anchor_unavailable(self, family):
        with pytest.raises(PreconditionViolated):
            hamgen.prescribed_oscillation_path(family, 1, 2, anchor="a")

    def test_out_of_range(self, family):
        with pytest.raises(OutOfRange) as info:
            hamgen.prescribed_oscillation_path(family, 0, 0)
        assert info.value.rectangle == (1, 2, 1, 2)
