"""Maslov index and dual Maslov index of a pair of Lagrangian paths.

The primary route follows the Lidskii angles of ``S(t) = Z_Y(t)^T Z_Yhat(t)``.
The crossing oracle counts eigenvalues of the unitary matrix Gamma(t) on
short arcs next to -1.  A third route counts one-sided rank changes of
the Wronskian for monotone pairs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import matlib
from .compidx import comparative_index
from .errors import FrameMismatch, IllConditioned, PartitionNotFound
from .lagrangian import (
    SampledLagrangianPath,
    common_grid,
    constant_path,
    normalize_frame,
    refine_path,
    transform_path,
    vertical_plane,
    wronskian,
    z_frame,
)
from .lidskii import AngleTrace, _circ, track_angles, ws_matrix
from .matlib import Tolerances
from .oscnum import (
    MOTION_BOUND,
    IdentityReport,
    _count_from_events,
    check_monotone,
    rank_drop_events,
    wronskian_rank,
)

TWO_PI = 2.0 * math.pi


@dataclass
class GammaSample:
    t: float
    Gamma: np.ndarray
    eigen_angles: np.ndarray


def gamma_matrix(Y, Yhat, t: float = float("nan"), tol: Tolerances | None = None) -> GammaSample:
    """Gamma = -(X + iU)(X - iU)^{-1} (Xh - iUh)(Xh + iUh)^{-1} with sorted eigen-angles in [0, 2pi)."""
    tol = matlib._tol(tol)
    Ys = normalize_frame(Y, tol)
    Yh = normalize_frame(Yhat, tol)
    n = Ys.shape[1]
    X, U = Ys[:n], Ys[n:]
    Xh, Uh = Yh[:n], Yh[n:]

    def right_div(A, B):
        # A B^{-1}
        out = np.linalg.solve(B.T, A.T).T
        if np.max(np.abs(out @ B - A)) > tol.struct_atol * max(1.0, np.max(np.abs(out))):
            raise IllConditioned("X -/+ iU factor is not invertible to tolerance")
        return out

    G = -right_div(X + 1j * U, X - 1j * U) @ right_div(Xh - 1j * Uh, Xh + 1j * Uh)
    ang = np.sort(np.mod(np.angle(np.linalg.eigvals(G)), TWO_PI))
    return GammaSample(float(t), G, ang)


def relative_z(Y, Yhat, tol: Tolerances | None = None) -> np.ndarray:
    """S = Z_Y^T Z_Yhat = Z_Y^{-1} Z_Yhat."""
    return z_frame(Y, tol).T @ z_frame(Yhat, tol)


def circular_multiset_distance(a, b) -> float:
    """Largest circular displacement in the optimal matching of two angle multisets."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    d = np.abs(_circ(b[None, :] - a[:, None]))
    r, c = linear_sum_assignment(d ** 2)
    return float(d[r, c].max()) if a.size else 0.0


def similarity_gap(Y, Yhat, tol: Tolerances | None = None) -> float:
    """Distance between the eigen-angles of Gamma and of -W_S with S = Z_Y^T Z_Yhat."""
    g = gamma_matrix(Y, Yhat, tol=tol).eigen_angles
    w = np.angle(-np.linalg.eigvals(ws_matrix(relative_z(Y, Yhat, tol), tol)))
    return circular_multiset_distance(g, w)


def _pair_grid(pY, pYh):
    pY, pYh = common_grid(pY, pYh)
    refinable = pY.refinable and pYh.refinable
    return pY, pYh, refinable


def maslov_trace(pY: SampledLagrangianPath, pYh: SampledLagrangianPath,
                 tol: Tolerances | None = None) -> AngleTrace:
    """Angle branches of Z_Y^T Z_Yhat on the joint motion grid of the pair (cached on ``pY``)."""
    tol = tol or pY.tol
    key = ("maslov_trace", id(pYh), tol)
    hit = pY.cache.get(key)
    if hit is not None and hit[0] is pYh:
        return hit[1]
    qY, qYh, refinable = _pair_grid(pY, pYh)
    grid = _joint_motion_grid(qY, qYh, tol)
    tr = track_angles(lambda s: relative_z(qY.frame_at(s), qYh.frame_at(s), tol), grid,
                      refinable=refinable, tol=tol)
    pY.cache[key] = (pYh, tr)
    return tr


def maslov_pair(pY, pYh, tol: Tolerances | None = None) -> tuple[int, int]:
    """(Mas(Y, Yhat), Mas*(Y, Yhat)) from one angle trace."""
    tr = maslov_trace(pY, pYh, tol)
    return tr.q_change(), tr.q_star_change()


def maslov_index(pY, pYh, tol: Tolerances | None = None) -> int:
    return maslov_pair(pY, pYh, tol)[0]


def dual_maslov_index(pY, pYh, tol: Tolerances | None = None) -> int:
    return maslov_pair(pY, pYh, tol)[1]


def transformed_path(pY, pYh, tol: Tolerances | None = None) -> SampledLagrangianPath:
    """Z_Y(t)^{-1} Yhat(t) on the common grid."""
    pY, pYh, _ = _pair_grid(pY, pYh)
    return transform_path(pYh, lambda s: z_frame(pY.frame_at(s), tol))


# -- crossing oracle -----------------------------------------------------------------

def _rel_angles(Y, Yhat, tol):
    """Gamma eigen-angles measured from pi, in (-pi, pi], with snapping at -1."""
    g = gamma_matrix(Y, Yhat, tol=tol).eigen_angles
    rel = _circ(g - math.pi)
    d = Y.shape[1] - wronskian_rank(Y, Yhat, tol)
    snaps = []
    if d:
        idx = np.argsort(np.abs(rel), kind="stable")[:d]
        snaps = [float(v) for v in rel[idx]]
        rel[idx] = 0.0
    return rel, snaps


def _ell(rel, eps, dual):
    if dual:
        return int(np.count_nonzero((rel > -eps) & (rel <= 0.0)))
    return int(np.count_nonzero((rel >= 0.0) & (rel < eps)))


def _choose_eps(r0, r1, motion):
    """Midpoint of the widest gap among the |angles|; None if the gap is too narrow."""
    pts = np.unique(np.concatenate([[0.0, math.pi], np.abs(r0), np.abs(r1)]))
    gaps = np.diff(pts)
    k = int(np.argmax(gaps))
    if gaps[k] / 2 <= motion:
        return None
    return 0.5 * (pts[k] + pts[k + 1])


@dataclass
class CrossingResult:
    value: int
    segments: int
    snapped: bool
    epsilons: list = field(default_factory=list)


def maslov_crossing_oracle(pY, pYh, tol: Tolerances | None = None, *, dual: bool = False,
                           max_depth: int = 20) -> CrossingResult:
    """Mas (or Mas*) by counting Gamma eigenvalues on arcs next to -1.

    Per segment, eps_k is the midpoint of the widest gap between the
    distances of the endpoint eigen-angles to pi, and the gap must exceed
    the eigen-angle motion over the segment, so no eigenvalue crosses
    exp(i(pi +/- eps_k)) between the endpoints.  Segments failing this are
    bisected.
    """
    tol = tol or pY.tol
    pY, pYh, refinable = _pair_grid(pY, pYh)
    grid = _joint_motion_grid(pY, pYh, tol)

    def sample(s):
        return _rel_angles(pY.frame_at(s), pYh.frame_at(s), tol)

    total = 0
    snapped = False
    eps_list = []
    t_prev = float(grid[0])
    r_prev, sn = sample(t_prev)
    snapped |= any(v != 0.0 and ((v < 0) != dual) for v in sn)
    for i in range(grid.size - 1):
        stack = [(float(grid[i + 1]), sample(float(grid[i + 1])), 0)]
        while stack:
            t1, (r1, sn1), depth = stack[-1]
            motion = circular_multiset_distance(r_prev, r1)
            eps = _choose_eps(r_prev, r1, motion)
            if eps is not None:
                if dual:
                    total += _ell(r_prev, eps, True) - _ell(r1, eps, True)
                else:
                    total += _ell(r1, eps, False) - _ell(r_prev, eps, False)
                snapped |= any(v != 0.0 and ((v < 0) != dual) for v in sn1)
                eps_list.append(eps)
                t_prev, r_prev = t1, r1
                stack.pop()
                continue
            if depth >= max_depth or not refinable:
                raise PartitionNotFound(f"no admissible arc on [{t_prev!r}, {t1!r}]")
            tm = 0.5 * (t_prev + t1)
            stack[-1] = (t1, (r1, sn1), depth + 1)
            stack.append((tm, sample(tm), depth + 1))
    return CrossingResult(total, len(eps_list), snapped, eps_list)


# -- identities ---------------------------------------------------------------------

def _vertical_like(p):
    return constant_path(vertical_plane(p.n), p.t, tol=p.tol)


def verify_maslov_comparison(pY, pYh, tol: Tolerances | None = None) -> list[IdentityReport]:
    """Mas(Y, Yhat) against the two reference indices Mas(E, .) plus endpoint comparative indices."""
    tol = tol or pY.tol
    pY, pYh, _ = _pair_grid(pY, pYh)
    Ep = _vertical_like(pY)
    M, Ms = maslov_pair(pY, pYh, tol)
    MEh, MsEh = maslov_pair(Ep, pYh, tol)
    MEy, MsEy = maslov_pair(Ep, pY, tol)
    ba = comparative_index(pYh.frames[0], pY.frames[0], tol)
    bb = comparative_index(pYh.frames[-1], pY.frames[-1], tol)
    return [
        IdentityReport("maslov_comparison", M, MEh - MEy + ba.mu - bb.mu),
        IdentityReport("maslov_comparison_dual", Ms, MsEh - MsEy + bb.mu_star - ba.mu_star),
    ]


def verify_flipping(pY, pYh, tol: Tolerances | None = None) -> list[IdentityReport]:
    """Mas*(Y, Yhat) = -Mas(Yhat, Y) and Mas* - Mas = rank W(b) - rank W(a)."""
    tol = tol or pY.tol
    pY, pYh, _ = _pair_grid(pY, pYh)
    M, Ms = maslov_pair(pY, pYh, tol)
    Mrev = maslov_index(pYh, pY, tol)
    wa = wronskian_rank(pY.frames[0], pYh.frames[0], tol)
    wb = wronskian_rank(pY.frames[-1], pYh.frames[-1], tol)
    return [
        IdentityReport("flipping", Ms, -Mrev),
        IdentityReport("rank_w_difference", Ms - M, wb - wa),
    ]


def _joint_motion_grid(pY, pYh, tol, bound=MOTION_BOUND):
    pY, pYh, refinable = _pair_grid(pY, pYh)
    if not refinable:
        return pY.t

    def crit(t0, Y0, t1, Y1):
        a = normalize_frame(pYh.frame_at(t0), tol) - normalize_frame(pYh.frame_at(t1), tol)
        b = normalize_frame(Y1, tol) - normalize_frame(Y0, tol)
        return max(np.linalg.norm(a, 2), np.linalg.norm(b, 2)) < bound

    return refine_path(pY, crit).t


def monotone_maslov(pY, pYh, Z_of_t=None, P_of_t=None, tol: Tolerances | None = None) -> dict:
    """Mas and Mas* from one-sided rank changes of W(Y, Yhat) for a monotone pair.

    With ``Z_of_t`` (and optionally ``P_of_t``, default identity) the check
    is on Ybar = Z^{-1} Yhat with Z E = Y P; without it the sufficient pair
    of conditions Y'^T J Y <= 0 and Yhat'^T J Yhat >= 0 is checked.
    """
    tol = tol or pY.tol
    pY, pYh, refinable = _pair_grid(pY, pYh)
    n = pY.n
    if Z_of_t is not None:
        E = vertical_plane(n)
        for s, Y in zip(pY.t, pY.frames):
            Zs = np.asarray(Z_of_t(float(s)), dtype=float)
            P = np.eye(n) if P_of_t is None else np.asarray(P_of_t(float(s)), dtype=float)
            if np.max(np.abs(Zs @ E - Y @ P)) > tol.struct_atol * max(1.0, np.max(np.abs(Y))):
                raise FrameMismatch(f"Z(t)E differs from Y(t)P(t) at t={float(s)!r}")
        check_monotone(transform_path(pYh, Z_of_t), 1, tol)
        mode = "transformed"
    else:
        check_monotone(pY, -1, tol)
        check_monotone(pYh, 1, tol)
        mode = "sufficient"

    def W_of_t(s):
        return wronskian(normalize_frame(pY.frame_at(s), tol), normalize_frame(pYh.frame_at(s), tol))

    grid = _joint_motion_grid(pY, pYh, tol)
    events = rank_drop_events(W_of_t, grid, refinable=refinable, tol=tol)
    mas, mas_star = _count_from_events(events, pY.a, pY.b)
    return {"Mas": mas, "Mas_star": mas_star, "check": mode, "events": len(events)}
