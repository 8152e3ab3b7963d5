"""Randomized verification suites for the integer identities of the package.

Every trial draws its instance from ``numpy.random.default_rng([seed, index])``
so a failing trial can be replayed from its seed and index alone.  A suite
returns a JSON-ready report; failing trials carry the checks that failed
and a dump of the instance (frames, paths or Hamiltonian data).
"""

from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import hamgen, matlib
from .compidx import (
    check_prop_duality,
    check_prop_lower_triangular,
    check_prop_right_mult,
    comparative_index,
)
from .errors import LagOscError, OutOfRange
from .lagrangian import (
    SampledLagrangianPath,
    common_grid,
    constant_path,
    path_to_dict,
    vertical_plane,
    z_frame,
)
from .lidskii import mu_via_lidskii
from .maslov import (
    maslov_crossing_oracle,
    maslov_pair,
    monotone_maslov,
    similarity_gap,
    transformed_path,
    verify_flipping,
    verify_maslov_comparison,
)
from .oscnum import (
    IdentityReport,
    dual_oscillation_number_partition,
    oscillation_number_partition,
    oscillation_pair,
    rank_drop_pair,
    verify_block_diag,
    verify_duality,
    verify_interval_additivity,
    verify_lower_triangular,
    verify_se_inverse,
    verify_transform_invariance,
    wronskian_rank,
)

SIMILARITY_ATOL = 1e-8


@dataclass
class TrialOutcome:
    index: int
    n: int
    checks: list = field(default_factory=list)
    instance: dict = field(default_factory=dict)
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None and all(c.ok for c in self.checks)

    def dump(self, suite: str, seed: int) -> dict:
        return {
            "suite": suite,
            "seed": seed,
            "index": self.index,
            "n": self.n,
            "error": self.error,
            "failed": [c.as_dict() for c in self.checks if not c.ok],
            "instance": _jsonable(self.instance),
        }


def _jsonable(obj):
    if isinstance(obj, SampledLagrangianPath):
        return path_to_dict(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def _check(name, lhs, rhs, **details) -> IdentityReport:
    return IdentityReport(name, int(lhs), int(rhs), details)


def _holds(name, cond, **details) -> IdentityReport:
    return IdentityReport(name, int(bool(cond)), 1, details)


def _flow_meta(flow):
    return flow.spec.to_dict()


# -- trials --------------------------------------------------------------------------

def trial_compidx(rng, n):
    Y, Yh = hamgen.random_frame_pair(n, rng)
    b = comparative_index(Y, Yh)
    C1, C2 = hamgen.random_invertible(n, rng), hamgen.random_invertible(n, rng)
    L = hamgen.random_lower_triangular(n, rng)
    # Z E spans Y for any lower block triangular right factor of Z_Y
    Z = z_frame(Y) @ hamgen.random_lower_triangular(n, rng)
    lid = mu_via_lidskii(Y, Yh)
    checks = [
        _holds("bounds", 0 <= b.mu <= n and 0 <= b.mu_star <= n, mu=b.mu, mu_star=b.mu_star),
        _holds("right_multiplication", check_prop_right_mult(Y, Yh, C1, C2)),
        _holds("lower_triangular", check_prop_lower_triangular(Y, Yh, L)),
        _holds("duality", check_prop_duality(Y, Yh, Z)),
        _check("lidskii_mu", lid[0], b.mu),
        _check("lidskii_mu_star", lid[1], b.mu_star),
        _check("sum_rule", b.mu + b.mu_star, 2 * b.rank_M + b.rank_P),
    ]
    return checks, {"Y": Y, "Yhat": Yh, "C1": C1, "C2": C2, "L": L, "Z": Z}


def trial_duality(rng, n):
    path = hamgen.random_hamiltonian_path(n, rng, psd=bool(rng.random() < 0.3))
    return [verify_duality(path)], {"path": path}


def trial_routes(rng, n):
    psd = bool(rng.random() < 0.5)
    path = hamgen.random_hamiltonian_path(n, rng, psd=psd)
    N, Ns = oscillation_pair(path)
    checks = [
        _check("partition", oscillation_number_partition(path).value, N),
        _check("partition_dual", dual_oscillation_number_partition(path).value, Ns),
    ]
    if psd:
        rd = rank_drop_pair(path)
        checks += [_check("rank_drop", rd[0], N), _check("rank_drop_dual", rd[1], Ns)]
    m = min(n, 3)
    pY, pYh = _random_pair(rng, m)
    M, Ms = maslov_pair(pY, pYh)
    checks += [
        _check("crossing", maslov_crossing_oracle(pY, pYh).value, M),
        _check("crossing_dual", maslov_crossing_oracle(pY, pYh, dual=True).value, Ms),
    ]
    return checks, {"path": path, "pY": pY, "pYhat": pYh, "psd": psd}


def _random_pair(rng, n):
    """Two paths on one interval: same flow (constant W) or independent flows."""
    flow = hamgen.random_flow(n, rng)
    pY = flow.path(hamgen.random_frame(n, rng))
    u = rng.random()
    if u < 0.4:
        pYh = flow.path(hamgen.random_frame(n, rng))
    elif u < 0.5:
        pYh = constant_path(hamgen.random_frame(n, rng), flow.nodes)
    else:
        pYh = hamgen.random_hamiltonian_path(n, rng, interval=flow.interval)
    return pY, pYh


def trial_maslov(rng, n):
    pY, pYh = _random_pair(rng, n)
    qY, qYh = common_grid(pY, pYh)
    gap = max(similarity_gap(A, B) for A, B in zip(qY.frames, qYh.frames))
    M, Ms = maslov_pair(pY, pYh)
    Nt, Nst = oscillation_pair(transformed_path(pY, pYh))
    E = constant_path(vertical_plane(n), pYh.t)
    ME, MsE = maslov_pair(E, pYh)
    Nh, Nsh = oscillation_pair(pYh)
    checks = [_holds("similarity", gap <= SIMILARITY_ATOL, gap=gap)]
    checks += verify_flipping(pY, pYh)
    checks += [
        _check("mas_transformed", M, Nt),
        _check("mas_transformed_dual", Ms, Nst),
        _check("mas_reference", ME, Nh),
        _check("mas_reference_dual", MsE, Nsh),
    ]
    checks += verify_maslov_comparison(pY, pYh)
    return checks, {"pY": pY, "pYhat": pYh}


def trial_separation(rng, n):
    flow = hamgen.random_flow(n, rng)
    pY = flow.path(hamgen.random_frame(n, rng))
    pYh = flow.path(hamgen.random_frame(n, rng))
    Ya, Yb = hamgen.principal_paths(flow)
    N, Ns = oscillation_pair(pY)
    Nh, Nsh = oscillation_pair(pYh)
    Na, Nsa = oscillation_pair(Ya)
    Nb, Nsb = oscillation_pair(Yb)
    ia = comparative_index(pY.frames[0], pYh.frames[0])
    ib = comparative_index(pY.frames[-1], pYh.frames[-1])
    w = wronskian_rank(Ya.frames[0], Yb.frames[0])
    checks = [
        _check("separation", N - Nh, ib.mu - ia.mu),
        _check("separation_dual", Ns - Nsh, ia.mu_star - ib.mu_star),
        _check("principal_N_a", Na, Nsb),
        _check("principal_N_b", Nb, Nsa),
        _check("principal_rank_w", Nb - Na, w),
        _check("principal_rank_w_dual", Nsa - Nsb, w),
        _holds("estimate", Na <= N <= Nb, N=N, bounds=[Na, Nb]),
        _holds("estimate_dual", Nsb <= Ns <= Nsa, N_star=Ns, bounds=[Nsb, Nsa]),
    ]
    return checks, {"hamiltonian": _flow_meta(flow), "C": pY.meta["C"], "Chat": pYh.meta["C"]}


def trial_comparison(rng, n):
    pY, pYh = _random_pair(rng, n)
    N, Ns = oscillation_pair(pY)
    Nh, Nsh = oscillation_pair(pYh)
    Nt, Nst = oscillation_pair(transformed_path(pYh, pY))
    ia = comparative_index(pY.frames[0], pYh.frames[0])
    ib = comparative_index(pY.frames[-1], pYh.frames[-1])
    flow = hamgen.random_flow(n, rng)
    Ya, Yb = hamgen.principal_paths(flow)
    Na, Nsa = oscillation_pair(Ya)
    Nb, Nsb = oscillation_pair(Yb)
    Nab, Nsab = oscillation_pair(transformed_path(Ya, Yb))
    checks = [
        _check("comparison", N - Nh, ib.mu - ia.mu + Nt),
        _check("comparison_dual", Ns - Nsh, ia.mu_star - ib.mu_star + Nst),
        _check("principal_comparison", Nb - Nsa, Nab),
        _check("principal_comparison_dual", Nsb - Na, Nsab),
    ]
    checks += verify_maslov_comparison(pY, pYh)
    return checks, {"pY": pY, "pYhat": pYh, "hamiltonian": _flow_meta(flow)}


def _identity_block(Y, n, atol):
    return float(np.max(np.abs(Y[:n] - np.eye(n)))) <= atol


def trial_distribution(rng, n):
    flow = hamgen.random_flow(n, rng)
    rect = hamgen.oscillation_rectangle(flow)
    (l0, l1), (r0, r1) = rect["ell"], rect["r"]
    atol = matlib.DEFAULT_TOL.struct_atol * 10
    checks = []
    for ell in range(l0, l1 + 1):
        for r in range(r0, r1 + 1):
            anchors = ["a"] if ell > r else ["b"] if ell < r else ["a", "b"]
            for anchor in anchors:
                p = hamgen.prescribed_oscillation_path(flow, ell, r, rect=rect, anchor=anchor)
                got = oscillation_pair(p)
                end = p.frames[0] if anchor == "a" else p.frames[-1]
                tag = f"({ell},{r})@{anchor}"
                checks.append(_check(f"N{tag}", got[0], ell))
                checks.append(_check(f"N*{tag}", got[1], r))
                checks.append(_holds(f"X({anchor})=I{tag}", _identity_block(end, n, atol)))
    for ell, r in ((l1 + 1, r0), (l0, r0 - 1)):
        try:
            hamgen.prescribed_oscillation_path(flow, ell, r, rect=rect)
            outside = False
        except OutOfRange:
            outside = True
        checks.append(_holds(f"out_of_range({ell},{r})", outside))
    return checks, {"hamiltonian": _flow_meta(flow), "ell": [l0, l1], "r": [r0, r1], "w": rect["w"]}


def _negated_flow(flow_spec):
    H = flow_spec.H_of_t
    return hamgen.HamiltonianSpec(flow_spec.n, lambda s: -np.asarray(H(s)), flow_spec.interval,
                                  params={"negated": flow_spec.to_dict()})


def trial_monotone(rng, n):
    path = hamgen.random_hamiltonian_path(n, rng, psd=True)
    N, Ns = oscillation_pair(path)
    rd = rank_drop_pair(path)
    spec = hamgen.random_trig_spec(n, rng, psd=True)
    neg = hamgen.HamiltonianFlow(_negated_flow(spec), hamgen.RANDOM_STEP)
    pos = hamgen.random_flow(n, rng, psd=True, interval=spec.interval)
    pY = neg.path(hamgen.random_frame(n, rng))
    pYh = pos.path(hamgen.random_frame(n, rng))
    mono = monotone_maslov(pY, pYh)
    M, Ms = maslov_pair(pY, pYh)
    checks = [
        _check("rank_drop", rd[0], N),
        _check("rank_drop_dual", rd[1], Ns),
        _check("monotone_maslov", mono["Mas"], M),
        _check("monotone_maslov_dual", mono["Mas_star"], Ms),
    ]
    return checks, {"path": path, "pY": pY, "pYhat": pYh}


def trial_additivity(rng, n):
    n1 = int(rng.integers(1, n + 1)) if n > 1 else 1
    n2 = max(1, n - n1) if n > 1 else 1
    flow1 = hamgen.random_flow(n1, rng)
    p1 = flow1.path(hamgen.random_frame(n1, rng))
    p2 = hamgen.random_hamiltonian_path(n2, rng, interval=flow1.interval)
    checks = verify_block_diag(p1, p2)
    c = float(p1.t[int(rng.integers(1, p1.t.size - 1))]) if rng.random() < 0.5 else \
        float(rng.uniform(p1.a, p1.b))
    checks += verify_interval_additivity(p1, c)
    return checks, {"p1": p1, "p2": p2, "c": c}


def trial_transforms(rng, n):
    flow = hamgen.random_flow(n, rng)
    path = hamgen.random_hamiltonian_path(n, rng, interval=flow.interval)
    S = hamgen.random_symplectic(n, rng)
    L = hamgen.random_lower_triangular(n, rng)
    checks = verify_se_inverse(flow.at, flow.nodes)
    checks += verify_transform_invariance(path, S)
    checks += [IdentityReport("time_" + c.name, c.lhs, c.rhs) for c in verify_transform_invariance(path, flow.at)]
    checks += verify_lower_triangular(path, L)
    return checks, {"hamiltonian": _flow_meta(flow), "path": path, "S": S, "L": L}


def trial_grid(rng, n):
    psd = bool(rng.random() < 0.5)
    path = hamgen.random_hamiltonian_path(n, rng, psd=psd)
    dense = path.densified(2)
    checks = []
    for name, fn in (("lidskii", oscillation_pair),
                     ("partition", lambda p: (oscillation_number_partition(p).value,
                                              dual_oscillation_number_partition(p).value))):
        x, y = fn(path), fn(dense)
        checks += [_check(name, y[0], x[0]), _check(name + "_dual", y[1], x[1])]
    if psd:
        x, y = rank_drop_pair(path), rank_drop_pair(dense)
        checks += [_check("rank_drop", y[0], x[0]), _check("rank_drop_dual", y[1], x[1])]
    m = min(n, 3)
    pY, pYh = _random_pair(rng, m)
    x = maslov_pair(pY, pYh)
    y = maslov_pair(pY.densified(2), pYh.densified(2))
    z = maslov_crossing_oracle(pY.densified(2), pYh.densified(2)).value
    checks += [_check("maslov", y[0], x[0]), _check("maslov_dual", y[1], x[1]), _check("crossing", z, x[0])]
    return checks, {"path": path, "pY": pY, "pYhat": pYh}


@dataclass(frozen=True)
class Suite:
    name: str
    trial: Callable
    n_range: tuple[int, int]
    description: str


SUITES = {
    s.name: s
    for s in (
        Suite("compidx-props", trial_compidx, (1, 5),
              "bounds, invariance properties, Lidskii formula and the sum rule of mu and mu*"),
        Suite("duality", trial_duality, (1, 4), "N + rank X(b) = N* + rank X(a)"),
        Suite("routes", trial_routes, (1, 4), "Lidskii, partition and rank-drop routes; Maslov crossing oracle"),
        Suite("maslov-identities", trial_maslov, (1, 3),
              "similarity of Gamma and -W_S, flipping, Wronskian rank change, reference indices"),
        Suite("separation", trial_separation, (1, 3), "separation on F(Phi), principal paths and estimates"),
        Suite("comparison", trial_comparison, (1, 3), "comparison formula for N, N* and its principal-path form"),
        Suite("distribution", trial_distribution, (1, 3), "every admissible (ell, r) is attained"),
        Suite("monotone", trial_monotone, (1, 3), "rank-drop counting for monotone paths and pairs"),
        Suite("additivity", trial_additivity, (1, 4), "block-diagonal and interval additivity"),
        Suite("transforms", trial_transforms, (1, 3), "S^{-1}E identity, transformation and triangular invariance"),
        Suite("grid", trial_grid, (1, 3), "doubling the grid density leaves every integer unchanged"),
    )
}


def run_trial(name: str, seed: int, index: int, n: int | None = None) -> TrialOutcome:
    suite = SUITES[name]
    rng = np.random.default_rng([seed, index])
    lo, hi = suite.n_range
    dim = int(n) if n is not None else int(rng.integers(lo, hi + 1))
    out = TrialOutcome(index, dim)
    try:
        out.checks, out.instance = suite.trial(rng, dim)
    except LagOscError as exc:
        out.error = f"{type(exc).__name__}: {exc}"
    return out


def _run_one(args):
    # only plain data crosses process boundaries
    name, seed = args[0], args[1]
    o = run_trial(*args)
    return {"ok": o.ok, "checks": len(o.checks), "dump": None if o.ok else o.dump(name, seed)}


def run_suite(name: str, trials: int, seed: int = 42, n: int | None = None, workers: int = 1,
              on_failure: Callable[[dict], None] | None = None) -> dict:
    """Run ``trials`` trials of a suite and return the report.

    Trials are independent; with ``workers > 1`` they run in worker
    processes, and the report is assembled in trial order either way.
    """
    if name not in SUITES:
        raise KeyError(f"unknown suite {name!r}; choose from {', '.join(sorted(SUITES))}")
    start = time.perf_counter()
    jobs = [(name, seed, k, n) for k in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, jobs))
    else:
        outcomes = [_run_one(j) for j in jobs]
    failures = []
    checks = 0
    for o in outcomes:
        checks += o["checks"]
        if not o["ok"]:
            d = o["dump"]
            failures.append(d)
            if on_failure is not None:
                on_failure(d)
    return {
        "suite": name,
        "seed": seed,
        "trials": trials,
        "n": n,
        "checks": checks,
        "failures": failures,
        "elapsed": round(time.perf_counter() - start, 3),
    }


__all__ = ["SUITES", "Suite", "TrialOutcome", "run_suite", "run_trial", "SIMILARITY_ATOL"]
