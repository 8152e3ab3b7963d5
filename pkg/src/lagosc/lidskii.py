"""Lidskii angles of symplectic matrices and their continuous branches along paths.

For a real symplectic ``S`` the matrix ``W_S = (S11 - i S12)^{-1} (S11 + i S12)``
is unitary and symmetric; the arguments of its eigenvalues are the Lidskii
angles of ``S``.  Along a continuous family ``S(t)`` the angles are followed
as continuous branches and summarized by the integers
``q = floor(phi / 2pi)`` and ``q* = ceil(phi / 2pi) - 1``.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import linear_sum_assignment

from . import matlib
from .errors import (
    AmbiguousMatching,
    EvaluatorMissing,
    IllConditioned,
    RefinementExhausted,
    ResidualTooLarge,
)
from .lagrangian import z_frame
from .matlib import Tolerances

TWO_PI = 2.0 * math.pi
BRANCH_STEP_BOUND = math.pi / 2


def _blocks(S):
    S = np.asarray(S, dtype=float)
    n = S.shape[0] // 2
    return S[:n, :n], S[:n, n:], n


def ws_matrix(S, tol: Tolerances | None = None) -> np.ndarray:
    """The unitary symmetric matrix W_S."""
    S11, S12, _ = _blocks(S)
    A = S11 - 1j * S12
    B = S11 + 1j * S12
    W = np.linalg.solve(A, B)
    res = np.max(np.abs(A @ W - B))
    if not np.all(np.isfinite(W)) or res > matlib._tol(tol).struct_atol * max(1.0, np.max(np.abs(W))):
        raise IllConditioned(f"S11 - i S12 inversion residual {res:.3e}")
    return W


def defect_s12(S, tol: Tolerances | None = None) -> int:
    """n - rank S12, with the cut scaled by the norm of the top block row."""
    S11, S12, n = _blocks(S)
    scale = float(np.linalg.norm(np.hstack([S11, S12]), 2))
    return n - matlib.numeric_rank(S12, tol, scale=scale)


def _circ(x):
    """Signed representative of x modulo 2pi in (-pi, pi]."""
    return -((math.pi - np.asarray(x, dtype=float)) % TWO_PI - math.pi)


def _principal(S, tol):
    """Principal angles in [0, 2pi), the snapped count and the largest snap."""
    ev = np.linalg.eigvals(ws_matrix(S, tol))
    ang = np.mod(np.angle(ev), TWO_PI)
    ang[ang >= TWO_PI] = 0.0
    d = defect_s12(S, tol)
    snap = 0.0
    snapped = np.zeros(ang.size, dtype=bool)
    if d:
        dist = np.minimum(ang, TWO_PI - ang)
        idx = np.argsort(dist, kind="stable")[:d]
        snap = float(dist[idx].max())
        ang[idx] = 0.0
        snapped[idx] = True
    order = np.argsort(ang, kind="stable")
    return ang[order], snapped[order], snap


def instantaneous_angles(S, tol: Tolerances | None = None) -> np.ndarray:
    """Sorted Lidskii angles in [0, 2pi).

    Exactly ``n - rank S12`` of them are reported as 0, in agreement with
    the numerical rank of ``S12``.
    """
    return _principal(S, tol)[0]


def q_integers(phi) -> tuple[np.ndarray, np.ndarray]:
    """(floor(phi/2pi), ceil(phi/2pi) - 1) for branch values phi."""
    x = np.asarray(phi, dtype=float) / TWO_PI
    return np.floor(x).astype(int), (np.ceil(x) - 1).astype(int)


def arg_interval_sum(S, kind: str = "left", q_offset: int = 0, tol: Tolerances | None = None) -> float:
    """Half the sum of the angles represented in [2pi q, 2pi(q+1)) or (2pi q, 2pi(q+1)]."""
    if kind not in ("left", "right"):
        raise ValueError("kind must be 'left' or 'right'")
    ang = instantaneous_angles(S, tol).copy()
    if kind == "right":
        ang[ang == 0.0] = TWO_PI
    return 0.5 * float(np.sum(ang + TWO_PI * q_offset))


def mu_via_lidskii(Y, Yhat, tol: Tolerances | None = None, max_residual: float = 0.05) -> tuple[int, int]:
    """Comparative indices from interval arguments of Z matrices."""
    n = np.asarray(Y).shape[1]
    Zy = z_frame(Y, tol)
    Zh = z_frame(Yhat, tol)
    Zrel = Zh.T @ Zy
    out = []
    for kind in ("left", "right"):
        val = (arg_interval_sum(Zh, kind, tol=tol) - arg_interval_sum(Zy, kind, tol=tol)
               + arg_interval_sum(Zrel, kind, tol=tol)) / math.pi
        k = round(val)
        if abs(val - k) >= max_residual:
            raise ResidualTooLarge(f"{kind} interval sum {val:.6f} is not near an integer")
        out.append(int(k))
    return out[0], n - out[1]


def _lift(prev, target, snapped):
    """Continuous branch value near ``prev`` whose class mod 2pi is ``target``."""
    val = prev + _circ(target - prev)
    k = round(val / TWO_PI)
    if snapped:
        return TWO_PI * k
    if abs(val - TWO_PI * k) < 4 * np.spacing(max(1.0, abs(val))):
        # keep an unsnapped angle off the 2pi level on the side its principal value is on
        val = TWO_PI * k + (np.spacing(TWO_PI * k + 1.0) * 4 if target <= math.pi else -np.spacing(TWO_PI * k + 1.0) * 4)
    return val


def _q_sums(values):
    q, qs = q_integers(values)
    return int(q.sum()), int(qs.sum())


def match_on_circle(prev, target, snapped, tol: Tolerances | None = None):
    """Assign new principal angles to previous branches by least circular motion.

    Returns ``(values, max_step, ambiguous)`` where ``values`` are the
    continued branch values ordered like ``prev``.  A match is ambiguous
    when exchanging two assignments costs less than ``angle_atol`` yet
    changes the resulting q or q* sums.
    """
    tol = matlib._tol(tol)
    prev = np.asarray(prev, dtype=float)
    diff = _circ(target[None, :] - prev[:, None])
    cost = diff ** 2
    rows, cols = linear_sum_assignment(cost)
    perm = np.empty(prev.size, dtype=int)
    perm[rows] = cols
    values = np.array([_lift(prev[i], target[perm[i]], snapped[perm[i]]) for i in range(prev.size)])
    step = float(np.max(np.abs(values - prev))) if prev.size else 0.0
    ambiguous = False
    base = _q_sums(values)
    for i, k in itertools.combinations(range(prev.size), 2):
        j, l = perm[i], perm[k]
        delta = cost[i, l] + cost[k, j] - cost[i, j] - cost[k, l]
        if delta >= tol.angle_atol:
            continue
        alt = values.copy()
        alt[i] = _lift(prev[i], target[l], snapped[l])
        alt[k] = _lift(prev[k], target[j], snapped[j])
        if _q_sums(alt) != base:
            ambiguous = True
            break
    return values, step, ambiguous


@dataclass
class AngleTrace:
    """Continuous Lidskii angle branches on a (possibly refined) grid."""

    t: np.ndarray
    angles: np.ndarray
    defects: np.ndarray
    max_snap: float = 0.0
    max_step: float = 0.0
    q: np.ndarray = field(init=False)
    q_star: np.ndarray = field(init=False)

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.angles = np.asarray(self.angles, dtype=float).reshape(self.t.size, -1)
        self.q, self.q_star = q_integers(self.angles)

    @property
    def n(self) -> int:
        return self.angles.shape[1]

    def q_change(self) -> int:
        return int(self.q[-1].sum() - self.q[0].sum())

    def q_star_change(self) -> int:
        return int(self.q_star[-1].sum() - self.q_star[0].sum())

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        n = self.n
        writer.writerow(["t"] + [f"phi_{j + 1}" for j in range(n)] + [f"q_{j + 1}" for j in range(n)]
                        + [f"qstar_{j + 1}" for j in range(n)])
        for s, ph, q, qs in zip(self.t, self.angles, self.q, self.q_star):
            writer.writerow([repr(float(s))] + [repr(float(v)) for v in ph] + [int(v) for v in q]
                            + [int(v) for v in qs])
        return buf.getvalue()


def track_angles(S_of_t: Callable[[float], np.ndarray], nodes, *, refinable: bool = True,
                 step_bound: float = BRANCH_STEP_BOUND, max_depth: int = 20,
                 tol: Tolerances | None = None) -> AngleTrace:
    """Follow the Lidskii angles of ``S(t)`` continuously over ``nodes``.

    Segments whose matched displacement reaches ``step_bound`` or whose
    match is ambiguous are bisected (``S_of_t`` must then accept new
    times).  Branches start at their principal values in [0, 2pi).
    """
    nodes = np.asarray(nodes, dtype=float)
    ang0, snapped0, snap = _principal(S_of_t(float(nodes[0])), tol)
    ts = [float(nodes[0])]
    vals = [np.where(snapped0, 0.0, ang0)]
    defects = [int(snapped0.sum())]
    max_snap = snap
    max_step = 0.0

    def sample(s):
        return _principal(S_of_t(s), tol)

    for i in range(nodes.size - 1):
        stack = [(float(nodes[i + 1]), sample(float(nodes[i + 1])), 0)]
        while stack:
            t1, (ang, snp, sd), depth = stack[-1]
            values, step, amb = match_on_circle(vals[-1], ang, snp, tol)
            if step < step_bound and not amb:
                ts.append(t1)
                vals.append(values)
                defects.append(int(snp.sum()))
                max_snap = max(max_snap, sd)
                max_step = max(max_step, step)
                stack.pop()
                continue
            t0 = ts[-1]
            if depth >= max_depth or not refinable:
                cls = AmbiguousMatching if amb else RefinementExhausted
                why = "ambiguous branch matching" if amb else f"angle step {step:.3f} >= {step_bound:.3f}"
                raise cls(f"{why} on [{t0!r}, {t1!r}]", segment=(t0, t1))
            tm = 0.5 * (t0 + t1)
            try:
                mid = sample(tm)
            except EvaluatorMissing as exc:
                raise RefinementExhausted(
                    f"segment [{t0!r}, {t1!r}] needs refinement but the path has no evaluator",
                    segment=(t0, t1),
                ) from exc
            stack[-1] = (t1, (ang, snp, sd), depth + 1)
            stack.append((tm, mid, depth + 1))
    return AngleTrace(np.array(ts), np.array(vals), np.array(defects), max_snap, max_step)


def angle_step_criterion(S_of_frame: Callable[[np.ndarray], np.ndarray] = z_frame,
                         bound: float = BRANCH_STEP_BOUND, tol: Tolerances | None = None):
    """Segment predicate for :func:`lagrangian.refine_path`: Lidskii angles move less than ``bound``."""

    def crit(t0, Y0, t1, Y1):
        a0, s0, _ = _principal(S_of_frame(Y0), tol)
        a1, s1, _ = _principal(S_of_frame(Y1), tol)
        _, step, amb = match_on_circle(np.where(s0, 0.0, a0), a1, s1, tol)
        return step < bound and not amb

    return crit
