"""Oscillation numbers N and N* of Lagrangian paths.

Three independent routes are provided:

* ``lidskii``: endpoint changes of the q / q* integers of the continuous
  Lidskii angle branches of Z_{Y(t)} (the default);
* ``partition``: telescoping comparative indices against a partition
  system R_k(t) = Z_{Y(t)} R_alpha;
* ``rank-drop``: one-sided rank changes of X(t), valid for monotone paths.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize_scalar

from . import matlib
from .compidx import comparative_index
from .errors import ConstructionFailed, InvalidPartition, NotMonotone, RefinementExhausted
from .lagrangian import (
    SampledLagrangianPath,
    apply_left,
    block_diag_path,
    normalize_frame,
    path_from_function,
    refine_path,
    transform_path,
    vertical_plane,
    wronskian,
    z_frame,
)
from .lidskii import AngleTrace, track_angles
from .matlib import Tolerances, canonical_j

ALPHA_CANDIDATES = tuple(k * math.pi / 12 for k in (6, 3, 9, 2, 4, 8, 10, 1, 5, 7, 11))
MARGINS = (0.1, 0.05, 0.01, 1e-3)
MOTION_BOUND = 0.05


@dataclass
class OscillationResult:
    value: int
    route: str
    trace: AngleTrace | None = None
    diagnostics: dict = field(default_factory=dict)

    def __int__(self) -> int:
        return self.value


@dataclass
class IdentityReport:
    """Outcome of an exact integer identity check."""

    name: str
    lhs: int
    rhs: int
    details: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return self.lhs == self.rhs

    def as_dict(self) -> dict:
        return {"name": self.name, "ok": self.ok, "lhs": self.lhs, "rhs": self.rhs, **self.details}


def _tolerance(path, tol):
    return tol if tol is not None else path.tol


def frame_rank_x(Y, tol: Tolerances | None = None) -> int:
    """rank X of a frame, decided on its normalized form."""
    Ys = normalize_frame(Y, tol)
    return matlib.numeric_rank(Ys[: Ys.shape[1]], tol, scale=1.0)


def wronskian_rank(Y, Yhat, tol: Tolerances | None = None) -> int:
    """rank W(Y, Yhat), decided on normalized frames."""
    return matlib.numeric_rank(wronskian(normalize_frame(Y, tol), normalize_frame(Yhat, tol)), tol, scale=1.0)


def motion_grid(path: SampledLagrangianPath, bound: float = MOTION_BOUND,
                tol: Tolerances | None = None, max_depth: int = 20) -> SampledLagrangianPath:
    """Refine until normalized frames move less than ``bound`` (2-norm) per step.

    The angle tracker and the sample-based oracles (partition, rank-drop)
    rely on this spacing to rule out events hidden between samples.  Paths without an
    evaluator are returned unchanged.
    """
    if not path.refinable:
        return path
    key = ("motion_grid", bound)
    if key in path.cache:
        return path.cache[key]
    tol = _tolerance(path, tol)
    seen = {}

    def normalized(s, Y):
        if s not in seen:
            seen[s] = normalize_frame(Y, tol)
        return seen[s]

    def crit(t0, Y0, t1, Y1):
        return np.linalg.norm(normalized(t1, Y1) - normalized(t0, Y0), 2) < bound

    out = refine_path(path, crit, max_depth=max_depth)
    path.cache[key] = out
    return out


# -- lidskii route -----------------------------------------------------------------

def lidskii_trace(path: SampledLagrangianPath, tol: Tolerances | None = None, *,
                  max_depth: int = 20) -> AngleTrace:
    """Angle branches of Z_{Y(t)} along the path, refining where needed.

    Branches are followed on the motion grid: a normalized frame step below
    ``MOTION_BOUND`` bounds the angle step, so no branch can wrap unseen.
    """
    tol = _tolerance(path, tol)
    key = ("trace", max_depth, tol)
    if key not in path.cache:
        grid = motion_grid(path, tol=tol)
        path.cache[key] = track_angles(lambda s: z_frame(grid.frame_at(s), tol), grid.t,
                                       refinable=path.refinable, max_depth=max_depth, tol=tol)
    return path.cache[key]


def oscillation_pair(path: SampledLagrangianPath, tol: Tolerances | None = None) -> tuple[int, int]:
    """(N, N*) from a single angle trace."""
    trace = lidskii_trace(path, tol)
    return trace.q_change(), trace.q_star_change()


def _lidskii_result(path, tol, dual):
    trace = lidskii_trace(path, tol)
    value = trace.q_star_change() if dual else trace.q_change()
    diag = {
        "nodes": int(trace.t.size),
        "max_angle_step": trace.max_step,
        "max_snap": trace.max_snap,
        "defect_identity": bool(np.all(trace.q.sum(axis=1) - trace.q_star.sum(axis=1) == trace.defects)),
    }
    return OscillationResult(value, "lidskii", trace, diag)


def oscillation_number(path: SampledLagrangianPath, tol: Tolerances | None = None) -> OscillationResult:
    """N(Y, [a, b]) as the change of sum q_j over the path."""
    return _lidskii_result(path, tol, dual=False)


def dual_oscillation_number(path: SampledLagrangianPath, tol: Tolerances | None = None) -> OscillationResult:
    """N*(Y, [a, b]) as the change of sum q*_j over the path."""
    return _lidskii_result(path, tol, dual=True)


# -- partition route ---------------------------------------------------------------

def rotation_matrix(alpha: float, n: int) -> np.ndarray:
    c, s = math.cos(alpha), math.sin(alpha)
    eye = np.eye(n)
    return np.block([[c * eye, s * eye], [-s * eye, c * eye]])


@dataclass
class PartitionSystem:
    """Breakpoints t_0 < ... < t_p with one symplectic family R_k per segment.

    ``samples`` lists, per segment, the times at which the rank conditions
    are checked (the segment's grid nodes).
    """

    breakpoints: np.ndarray
    R: list[Callable[[float], np.ndarray]]
    samples: list[np.ndarray]
    alphas: list[float] | None = None

    @property
    def segments(self) -> int:
        return len(self.R)


def _segment_ranks(path, ps, k, tol):
    n = path.n
    ranks_w, ranks_x = set(), set()
    for s in ps.samples[k]:
        REn = normalize_frame(ps.R[k](float(s))[:, n:], tol)
        Yn = normalize_frame(path.frame_at(float(s)), tol)
        ranks_w.add(matlib.numeric_rank(wronskian(REn, Yn), tol, scale=1.0))
        ranks_x.add(matlib.numeric_rank(REn[:n], tol, scale=1.0))
    return ranks_w, ranks_x


def validate_partition(path: SampledLagrangianPath, ps: PartitionSystem, tol: Tolerances | None = None) -> list:
    """Check both constant-rank conditions on every segment; return per-segment ranks."""
    tol = _tolerance(path, tol)
    if len(ps.samples) != ps.segments or ps.breakpoints.size != ps.segments + 1:
        raise InvalidPartition("partition arrays have inconsistent lengths")
    out = []
    for k in range(ps.segments):
        rw, rx = _segment_ranks(path, ps, k, tol)
        if len(rw) != 1:
            raise InvalidPartition(f"rank W(R_k E, Y) varies on segment {k}: {sorted(rw)}",
                                   segment=k, condition="wronskian")
        if len(rx) != 1:
            raise InvalidPartition(f"rank of the upper block of R_k E varies on segment {k}: {sorted(rx)}",
                                   segment=k, condition="upper-block")
        out.append((rw.pop(), rx.pop()))
    return out


def _upper_sigma(path, times, alphas, tol):
    """sigma_min of sin(a) U* + cos(a) X* for every node and candidate a."""
    n = path.n
    out = np.empty((len(times), len(alphas)))
    for i, s in enumerate(times):
        Ys = normalize_frame(path.frame_at(float(s)), tol)
        X, U = Ys[:n], Ys[n:]
        for j, a in enumerate(alphas):
            out[i, j] = np.linalg.svd(math.sin(a) * U + math.cos(a) * X, compute_uv=False)[-1]
    return out


def _greedy_segments(sig, margin):
    """Greedy longest segments with one alpha keeping sigma >= margin at every node."""
    m = sig.shape[0]
    good = sig >= margin
    cuts, picks = [0], []
    i = 0
    while i < m - 1:
        best_j, best_end = None, i
        for j in range(sig.shape[1]):
            if not good[i, j]:
                continue
            end = i
            while end + 1 < m and good[end + 1, j]:
                end += 1
            if end > best_end:
                best_j, best_end = j, end
        if best_j is None:
            return None, i
        cuts.append(best_end)
        picks.append(best_j)
        i = best_end
    return (cuts, picks), None


def build_partition(path: SampledLagrangianPath, tol: Tolerances | None = None, *,
                    nodes=None, max_depth: int = 12) -> PartitionSystem:
    """Partition with R_k(t) = Z_{Y(t)} R_alpha_k satisfying both rank conditions.

    W(R_k E, Y) = sin(alpha) K_Y^{-1} always has full rank, so the choice of
    alpha only has to keep the upper block ``sin(a) U* + cos(a) X*``
    invertible on the whole segment.  Segments where no candidate works are
    refined by midpoint insertion.
    """
    tol = _tolerance(path, tol)
    times = np.asarray(path.t if nodes is None else nodes, dtype=float)
    alphas = ALPHA_CANDIDATES
    for depth in range(max_depth + 1):
        sig = _upper_sigma(path, times, alphas, tol)
        stuck = None
        for margin in MARGINS:
            res, stuck = _greedy_segments(sig, margin)
            if res is not None:
                break
        if res is not None:
            cuts, picks = res
            n = path.n

            def make_R(alpha):
                Ra = rotation_matrix(alpha, n)
                return lambda s: z_frame(path.frame_at(s), tol) @ Ra

            ps = PartitionSystem(
                breakpoints=times[cuts],
                R=[make_R(alphas[j]) for j in picks],
                samples=[times[cuts[k]:cuts[k + 1] + 1] for k in range(len(picks))],
                alphas=[alphas[j] for j in picks],
            )
            validate_partition(path, ps, tol)
            return ps
        if not path.refinable:
            break
        lo = max(stuck - 1, 0)
        hi = min(stuck + 1, times.size - 1)
        extra = [0.5 * (times[k] + times[k + 1]) for k in range(lo, hi)]
        times = np.unique(np.concatenate([times, extra]))
    raise ConstructionFailed("no admissible rotation found for a partition segment")


def _partition_sum(path, ps, tol, dual, validate=True):
    if validate:
        validate_partition(path, ps, tol)
    E = vertical_plane(path.n)
    total = 0
    for k in range(ps.segments):
        t0, t1 = float(ps.breakpoints[k]), float(ps.breakpoints[k + 1])
        b0 = comparative_index(path.frame_at(t0), ps.R[k](t0) @ E, tol)
        b1 = comparative_index(path.frame_at(t1), ps.R[k](t1) @ E, tol)
        total += (b0.mu_star - b1.mu_star) if dual else (b1.mu - b0.mu)
    return total


def oscillation_number_partition(path: SampledLagrangianPath, ps: PartitionSystem | None = None,
                                 tol: Tolerances | None = None, *, dual: bool = False) -> OscillationResult:
    """N (or N* with ``dual=True``) as a telescoping sum of comparative indices."""
    tol = _tolerance(path, tol)
    validate = ps is not None
    if ps is None:
        key = ("partition", tol)
        if key not in path.cache:
            path.cache[key] = build_partition(motion_grid(path, tol=tol), tol)
        ps = path.cache[key]
    value = _partition_sum(path, ps, tol, dual, validate)
    return OscillationResult(value, "partition", None,
                             {"segments": ps.segments, "alphas": ps.alphas})


def dual_oscillation_number_partition(path, ps=None, tol=None) -> OscillationResult:
    return oscillation_number_partition(path, ps, tol, dual=True)


# -- rank-drop route (monotone paths) -----------------------------------------------

def _fd_derivative(path, i):
    t = path.t
    m = t.size
    if m < 2:
        return np.zeros_like(path.frames[0]), 0.0
    if path.evaluator is not None:
        h = min(np.diff(t).min() if m > 1 else 1.0, 1e-3 * (path.b - path.a))
        h = max(h, 1e-7 * max(1.0, abs(t[i])))
        lo = max(t[i] - h, path.a)
        hi = min(t[i] + h, path.b)
        Ylo, Yhi = path.frame_at(lo), path.frame_at(hi)
        Ym = path.frames[i]
        d = (Yhi - Ylo) / (hi - lo)
        one_sided = (Yhi - Ym) / (hi - t[i]) if hi > t[i] else (Ym - Ylo) / (t[i] - lo)
        return d, float(np.max(np.abs(d - one_sided)))
    lo, hi = max(i - 1, 0), min(i + 1, m - 1)
    d = (path.frames[hi] - path.frames[lo]) / (t[hi] - t[lo])
    if 0 < i < m - 1:
        fwd = (path.frames[hi] - path.frames[i]) / (t[hi] - t[i])
        err = float(np.max(np.abs(d - fwd)))
    else:
        err = float(np.max(np.abs(d)))
    return d, err


def monotonicity_form(Y, dY) -> np.ndarray:
    """The symmetric form Y'^T J Y."""
    n = Y.shape[1]
    F = dY.T @ canonical_j(n) @ Y
    return 0.5 * (F + F.T)


def check_monotone(path: SampledLagrangianPath, sign: int = 1, tol: Tolerances | None = None) -> dict:
    """Verify sign * Y'^T J Y >= 0 at every node.

    An exact derivative is used when the path carries one; otherwise a
    central difference whose tolerance includes the difference error
    estimate.  Raises :class:`NotMonotone` at the first violating node.
    """
    tol = _tolerance(path, tol)
    worst = math.inf
    exact = path.derivative is not None
    for i, s in enumerate(path.t):
        Y = path.frames[i]
        if exact:
            dY = np.asarray(path.derivative(float(s)), dtype=float)
            err = 0.0
        else:
            dY, err = _fd_derivative(path, i)
        F = sign * monotonicity_form(Y, dY)
        lam = float(np.linalg.eigvalsh(F)[0])
        scale = max(1.0, float(np.linalg.norm(Y, 2)) * float(np.linalg.norm(dY, 2)))
        allow = tol.struct_atol * scale + err * float(np.linalg.norm(Y, 2)) * Y.shape[1]
        if lam < -allow:
            raise NotMonotone(f"monotonicity form has eigenvalue {lam:.3e} at t={float(s)!r}", t=float(s))
        worst = min(worst, lam + allow)
    return {"exact_derivative": exact, "min_margin": worst}


@dataclass
class RankEvent:
    t: float
    rank_left: int
    rank_at: int
    rank_right: int


def _sv(A_of_t, s):
    return np.linalg.svd(A_of_t(s), compute_uv=False)


def rank_drop_events(A_of_t: Callable[[float], np.ndarray], nodes, *, refinable: bool,
                     tol: Tolerances | None = None, loc_atol: float | None = None) -> list[RankEvent]:
    """Locate the rank changes of a bounded matrix function on a grid.

    Ranks use the absolute cut of :func:`matlib.numeric_rank` with scale 1,
    so ``A_of_t`` should return blocks of normalized frames.  The rank is
    lower semicontinuous, so it is sampled at the nodes, at the points
    where a jump between two nodes is localized by bisection, and at
    isolated dips found by minimizing singular values inside segments.
    Every sample whose rank is below a neighbour's becomes an event whose
    one-sided ranks are those of the neighbouring samples.
    """
    tol = matlib._tol(tol)
    nodes = np.asarray(nodes, dtype=float)
    if loc_atol is None:
        loc_atol = 1e-6 * (nodes[-1] - nodes[0])
    svals = np.array([_sv(A_of_t, float(s)) for s in nodes])
    n = svals.shape[1]
    thr = matlib.rank_threshold((n, n), 1.0, tol)
    ranks = (svals > thr).sum(axis=1)

    def rank_at(s):
        return int((_sv(A_of_t, s) > thr).sum())

    samples = [(float(s), int(r)) for s, r in zip(nodes, ranks)]
    dips = []
    for i in range(nodes.size - 1):
        r_lo, r_hi = int(ranks[i]), int(ranks[i + 1])
        t0, t1 = float(nodes[i]), float(nodes[i + 1])
        if r_lo != r_hi and refinable:
            # localize the jump: the lower rank is attained at the jump point
            low = min(r_lo, r_hi)
            drop = r_hi < r_lo
            a_, b_ = t0, t1
            while b_ - a_ > loc_atol:
                c = 0.5 * (a_ + b_)
                if (rank_at(c) <= low) == drop:
                    b_ = c
                else:
                    a_ = c
            pt = b_ if drop else a_
            if t0 < pt < t1:
                samples.append((pt, rank_at(pt)))
        mm = min(r_lo, r_hi)
        mx = max(r_lo, r_hi)
        if mx > 0 and refinable:
            # sigma_mx vanishes wherever the rank falls below either end
            dips.extend(_find_dips(A_of_t, svals, nodes, i, mx, thr, loc_atol))
        elif mm > 0 and _may_dip(svals, nodes, i, mm):
            raise RefinementExhausted(
                f"a rank drop may lie inside [{t0!r}, {t1!r}] but the path has no evaluator",
                segment=(t0, t1))
    # one dip may be seen from both neighbouring segments
    sep = 10.0 * loc_atol
    dips.sort()
    merged = []
    for ts, r0 in dips:
        if merged and ts - merged[-1][0] <= sep:
            merged[-1] = (merged[-1][0], min(merged[-1][1], r0))
            continue
        merged.append((ts, r0))
    for ts, r0 in merged:
        k = int(np.argmin(np.abs(nodes - ts)))
        if abs(nodes[k] - ts) <= sep and ranks[k] <= r0:
            continue
        samples.append((ts, r0))
    samples.sort()
    # an inserted point next to any other sample needs a regular sample between them
    node_set = set(float(s) for s in nodes)
    extra = [(0.5 * (p[0] + q[0]), rank_at(0.5 * (p[0] + q[0])))
             for p, q in zip(samples[:-1], samples[1:])
             if (p[0] not in node_set or q[0] not in node_set) and q[0] > p[0]]
    samples = sorted(samples + extra)
    events = []
    for k, (ts, rk) in enumerate(samples):
        left = samples[k - 1][1] if k > 0 else rk
        right = samples[k + 1][1] if k + 1 < len(samples) else rk
        if left > rk or right > rk:
            events.append(RankEvent(ts, left, rk, right))
    return events


def _dip_slope(svals, nodes, i, mm):
    col = svals[:, mm - 1]
    lo, hi = max(i - 1, 0), min(i + 2, nodes.size - 1)
    seg = np.abs(np.diff(col[lo:hi + 1])) / np.diff(nodes[lo:hi + 1])
    return max(float(seg.max()) if seg.size else 0.0, 1e-12)


def _may_dip(svals, nodes, i, mm):
    # with slope bound L a zero at s in the segment forces sigma(t0) + sigma(t1) <= L h
    col = svals[:, mm - 1]
    h = nodes[i + 1] - nodes[i]
    return col[i] + col[i + 1] <= 1.5 * _dip_slope(svals, nodes, i, mm) * h


def _find_dips(A_of_t, svals, nodes, i, mm, thr, loc_atol):
    """Zeros of the mm-th singular value inside segment i, as (time, rank there) pairs.

    After a zero is found the two sides are searched again, keeping a gap
    of 100 loc_atol so the minimizer does not return to the same zero.
    """
    col = svals[:, mm - 1]
    slope = _dip_slope(svals, nodes, i, mm)
    accept = max(thr, 10.0 * loc_atol * slope)
    gap = 100.0 * loc_atol
    found = []
    stack = [(float(nodes[i]), float(nodes[i + 1]), float(col[i]), float(col[i + 1]))]
    while stack:
        t0, t1, c0, c1 = stack.pop()
        h = t1 - t0
        if h <= gap or min(c0, c1) > 1.5 * slope * h:
            continue
        res = minimize_scalar(lambda s: _sv(A_of_t, s)[mm - 1], bounds=(t0, t1),
                              method="bounded", options={"xatol": loc_atol})
        ts = float(res.x)
        sv = _sv(A_of_t, ts)
        if sv[mm - 1] > accept:
            continue
        found.append((ts, int((sv > accept).sum())))
        for u0, u1 in ((t0, ts - gap), (ts + gap, t1)):
            if u1 - u0 > gap:
                e0 = c0 if u0 == t0 else float(_sv(A_of_t, u0)[mm - 1])
                e1 = c1 if u1 == t1 else float(_sv(A_of_t, u1)[mm - 1])
                stack.append((u0, u1, e0, e1))
    return sorted(found)


def _count_from_events(events, a, b):
    left = sum(e.rank_left - e.rank_at for e in events if a < e.t <= b)
    right = sum(e.rank_right - e.rank_at for e in events if a <= e.t < b)
    return left, right


def rank_drop_pair(path: SampledLagrangianPath, tol: Tolerances | None = None, *,
                   check: bool = True, loc_atol: float | None = None) -> tuple[int, int]:
    """(N, N*) from the one-sided rank changes of X(t) of a monotone path."""
    tol = _tolerance(path, tol)
    if check:
        check_monotone(path, 1, tol)
    n = path.n

    def X_of_t(s):
        return normalize_frame(path.frame_at(s), tol)[:n]

    grid = motion_grid(path, tol=tol)
    events = rank_drop_events(X_of_t, grid.t, refinable=path.refinable, tol=tol, loc_atol=loc_atol)
    return _count_from_events(events, path.a, path.b)


def rank_drop_count(path: SampledLagrangianPath, side: str = "left", tol: Tolerances | None = None,
                    **kw) -> int:
    """Sum of left (N) or right (N*) one-sided rank drops of X(t)."""
    if side not in ("left", "right"):
        raise ValueError("side must be 'left' or 'right'")
    left, right = rank_drop_pair(path, tol, **kw)
    return left if side == "left" else right


# -- structural identities ----------------------------------------------------------

def verify_duality(path: SampledLagrangianPath, tol: Tolerances | None = None) -> IdentityReport:
    """N + rank X(b) = N* + rank X(a)."""
    tol = _tolerance(path, tol)
    N, Ns = oscillation_pair(path, tol)
    ra = frame_rank_x(path.frames[0], tol)
    rb = frame_rank_x(path.frames[-1], tol)
    return IdentityReport("duality", N + rb, Ns + ra,
                          {"N": N, "N_star": Ns, "rank_X_a": ra, "rank_X_b": rb})


def verify_block_diag(path1: SampledLagrangianPath, path2: SampledLagrangianPath,
                      tol: Tolerances | None = None) -> list[IdentityReport]:
    """N and N* are additive over the interleaved block-diagonal path."""
    joint = block_diag_path(path1, path2)
    N, Ns = oscillation_pair(joint, tol)
    N1, Ns1 = oscillation_pair(path1, tol)
    N2, Ns2 = oscillation_pair(path2, tol)
    return [
        IdentityReport("block_diag", N, N1 + N2, {"parts": [N1, N2]}),
        IdentityReport("block_diag_dual", Ns, Ns1 + Ns2, {"parts": [Ns1, Ns2]}),
    ]


def verify_interval_additivity(path: SampledLagrangianPath, c: float,
                               tol: Tolerances | None = None) -> list[IdentityReport]:
    """N[a, b] = N[a, c] + N[c, b] and likewise for N*."""
    N, Ns = oscillation_pair(path, tol)
    N1, Ns1 = oscillation_pair(path.restrict(path.a, c), tol)
    N2, Ns2 = oscillation_pair(path.restrict(c, path.b), tol)
    return [
        IdentityReport("interval", N, N1 + N2, {"c": c, "parts": [N1, N2]}),
        IdentityReport("interval_dual", Ns, Ns1 + Ns2, {"c": c, "parts": [Ns1, Ns2]}),
    ]


def verify_se_inverse(S_of_t: Callable[[float], np.ndarray], nodes, tol: Tolerances | None = None
                      ) -> list[IdentityReport]:
    """N(SE) + N(S^{-1}E) = rank S12(a) - rank S12(b) and the dual with opposite sign."""
    nodes = np.asarray(nodes, dtype=float)
    n = np.asarray(S_of_t(float(nodes[0]))).shape[0] // 2
    E = vertical_plane(n)
    p1 = path_from_function(lambda s: S_of_t(s) @ E, nodes, tol=tol)
    p2 = path_from_function(lambda s: np.linalg.solve(S_of_t(s), E), nodes, tol=tol)
    N1, Ns1 = oscillation_pair(p1, tol)
    N2, Ns2 = oscillation_pair(p2, tol)
    ra = frame_rank_x(p1.frames[0], tol)
    rb = frame_rank_x(p1.frames[-1], tol)
    return [
        IdentityReport("se_inverse", N1 + N2, ra - rb, {"N": [N1, N2]}),
        IdentityReport("se_inverse_dual", Ns1 + Ns2, rb - ra, {"N_star": [Ns1, Ns2]}),
    ]


def verify_transform_invariance(path: SampledLagrangianPath, S, tol: Tolerances | None = None
                                ) -> list[IdentityReport]:
    """N(S^{-1}Y) = N(Z_{SE}^{-1}Y) and the dual, for constant or time-dependent S."""
    S_of_t = S if callable(S) else (lambda s, _S=np.asarray(S, dtype=float): _S)
    n = path.n
    E = vertical_plane(n)
    lhs = transform_path(path, S_of_t)
    rhs = transform_path(path, lambda s: z_frame(S_of_t(s) @ E, tol))
    N1, Ns1 = oscillation_pair(lhs, tol)
    N2, Ns2 = oscillation_pair(rhs, tol)
    return [
        IdentityReport("transform", N1, N2),
        IdentityReport("transform_dual", Ns1, Ns2),
    ]


def verify_lower_triangular(path: SampledLagrangianPath, L, tol: Tolerances | None = None
                            ) -> list[IdentityReport]:
    """N(LY) = N(Y) and N*(LY) = N*(Y) for lower block triangular symplectic L(t)."""
    moved = apply_left(path, L)
    N1, Ns1 = oscillation_pair(moved, tol)
    N2, Ns2 = oscillation_pair(path, tol)
    return [IdentityReport("lower_triangular", N1, N2), IdentityReport("lower_triangular_dual", Ns1, Ns2)]
