"""Command-line interface: ``lagosc {compute, verify, angles, gen, compare-index}``.

Exit codes: 0 success, 2 invalid input or a library error, 3 routes
disagree (compute) or a suite reported failures (verify).
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import hamgen, matlib
from .compidx import comparative_index
from .errors import LagOscError, NotMonotone, RefinementExhausted
from .lagrangian import SampledLagrangianPath, constant_path, load_path, save_path, vertical_plane
from .lidskii import TWO_PI, AngleTrace, mu_via_lidskii
from .maslov import maslov_crossing_oracle, maslov_trace
from .oscnum import (
    check_monotone,
    dual_oscillation_number_partition,
    frame_rank_x,
    lidskii_trace,
    oscillation_number_partition,
    rank_drop_pair,
)
from .suites import SUITES, run_suite

log = logging.getLogger("lagosc")

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_DISAGREE = 3
DEFAULT_SEED = 42


class UsageError(Exception):
    """Bad combination of command-line options."""


@dataclass
class RunConfig:
    command: str
    inputs: list = field(default_factory=list)
    generator: dict = field(default_factory=dict)
    tol: matlib.Tolerances = field(default_factory=matlib.Tolerances)
    seed: int = DEFAULT_SEED
    output: str = "json"
    verbosity: int = 0


def _dumps(obj) -> str:
    # json writes floats with repr, the shortest string that round-trips
    return json.dumps(obj, sort_keys=True, indent=2, allow_nan=False)


def _emit(obj, out=None):
    text = _dumps(obj) + "\n"
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# -- path sources ------------------------------------------------------------------

def _add_source(p: argparse.ArgumentParser, gens=("rotation", "hamiltonian")):
    p.add_argument("--path", help="path JSON file")
    p.add_argument("--gen", choices=gens, help="generate the path instead of loading it")
    p.add_argument("--n", type=int, default=1, help="dimension for generators (default 1)")
    p.add_argument("--speed", type=float, nargs="+", default=None,
                   help="rotation speeds, one per coordinate (default 1)")
    p.add_argument("--interval", type=float, nargs=2, metavar=("A", "B"), default=None)
    p.add_argument("--nodes", type=int, default=None, help="number of grid nodes")
    p.add_argument("--spec", help="Hamiltonian JSON file for --gen hamiltonian")
    p.add_argument("--psd", action="store_true", help="random Hamiltonians with H(t) >= 0")
    p.add_argument("--init", default="e", help="initial frame for flows: 'e', 'random' or a JSON file")
    p.add_argument("--step", type=float, default=hamgen.DEFAULT_STEP, help="RK4 step for flows")


def _speeds(args):
    if args.speed is None:
        return np.ones(args.n)
    if len(args.speed) == 1:
        return np.full(args.n, args.speed[0])
    if len(args.speed) != args.n:
        raise UsageError("--speed takes one value or n values")
    return np.array(args.speed)


def _interval(args, default):
    iv = tuple(args.interval) if args.interval is not None else default
    if not iv[0] < iv[1]:
        raise UsageError("--interval needs A < B")
    return iv


def _hamiltonian_spec(args, rng):
    if args.spec:
        data = json.loads(Path(args.spec).read_text())
        return hamgen.HamiltonianSpec.from_dict(data)
    iv = tuple(args.interval) if args.interval is not None else None
    return hamgen.random_trig_spec(args.n, rng, interval=iv, psd=args.psd)


def _initial_frame(args, n, rng):
    if args.init == "e":
        return vertical_plane(n)
    if args.init == "random":
        return hamgen.random_frame(n, rng)
    data = json.loads(Path(args.init).read_text())
    Y = np.asarray(data["frame"] if isinstance(data, dict) else data, dtype=float)
    if Y.shape != (2 * n, n):
        raise UsageError(f"initial frame must be {2 * n}x{n}")
    return Y


def _generated_path(args, cfg: RunConfig) -> SampledLagrangianPath:
    rng = np.random.default_rng(cfg.seed)
    if args.gen == "rotation":
        iv = _interval(args, (0.0, 1.5 * math.pi))
        w = _speeds(args)
        path = hamgen.rotation_path(args.n, w, iv, args.nodes, tol=cfg.tol)
        path.meta["generator"] = {"kind": "rotation", "n": args.n, "speeds": w.tolist(), "interval": list(iv)}
        return path
    spec = _hamiltonian_spec(args, rng)
    flow = hamgen.HamiltonianFlow(spec, args.step, cfg.tol)
    Y0 = _initial_frame(args, spec.n, rng)
    if not matlib.is_lagrangian_frame(Y0, cfg.tol):
        raise UsageError("initial frame is not Lagrangian")
    return flow.path(Y0, cfg.tol, meta={"generator": {"kind": "hamiltonian", "hamiltonian": spec.to_dict(),
                                                      "seed": cfg.seed, "init": Y0.tolist(),
                                                      "step": args.step}},
                     anchor=flow.a)


def _source_path(args, cfg: RunConfig) -> SampledLagrangianPath:
    if bool(args.path) == bool(args.gen):
        raise UsageError("give exactly one of --path or --gen")
    if args.path:
        return load_path(args.path, cfg.tol)
    return _generated_path(args, cfg)


def _against_path(spec: str, path: SampledLagrangianPath, cfg: RunConfig) -> SampledLagrangianPath:
    if spec.lower() == "e":
        return constant_path(vertical_plane(path.n), path.t, tol=cfg.tol)
    other = load_path(spec, cfg.tol)
    if other.n != path.n:
        raise UsageError("paths have different dimensions")
    return other


# -- compute -----------------------------------------------------------------------

def _routes_for_path(path: SampledLagrangianPath, cfg: RunConfig, skip: set) -> tuple[dict, dict]:
    routes, diag = {}, {}
    tr = lidskii_trace(path, cfg.tol)
    routes["lidskii"] = {"N": tr.q_change(), "N_star": tr.q_star_change()}
    diag["lidskii"] = {"samples": int(tr.t.size), "max_angle_step": tr.max_step, "max_snap": tr.max_snap}
    if "partition" not in skip:
        p = oscillation_number_partition(path, tol=cfg.tol)
        ps = dual_oscillation_number_partition(path, tol=cfg.tol)
        routes["partition"] = {"N": p.value, "N_star": ps.value}
        diag["partition"] = p.diagnostics
    if "rank-drop" not in skip:
        try:
            check_monotone(path, 1, cfg.tol)
        except NotMonotone as exc:
            diag["rank_drop"] = f"skipped: {exc}"
        else:
            try:
                N, Ns = rank_drop_pair(path, cfg.tol, check=False)
                routes["rank_drop"] = {"N": N, "N_star": Ns}
            except RefinementExhausted as exc:
                diag["rank_drop"] = f"skipped: {exc}"
    return routes, diag


def cmd_compute(args, cfg: RunConfig) -> int:
    path = _source_path(args, cfg)
    skip = set(args.skip or ())
    routes, diag = _routes_for_path(path, cfg, skip)
    values = {(r["N"], r["N_star"]) for r in routes.values()}
    agreement = len(values) == 1
    N, Ns = routes["lidskii"]["N"], routes["lidskii"]["N_star"]
    report = {
        "n": path.n,
        "interval": [path.a, path.b],
        "N": N,
        "N_star": Ns,
        "rank_X": [frame_rank_x(path.frames[0], cfg.tol), frame_rank_x(path.frames[-1], cfg.tol)],
        "routes": routes,
    }
    if args.against:
        ref = _against_path(args.against, path, cfg)
        tr = maslov_trace(ref, path, cfg.tol)
        mas = {"lidskii": {"Mas": tr.q_change(), "Mas_star": tr.q_star_change()}}
        if "crossing" not in skip:
            mas["crossing"] = {"Mas": maslov_crossing_oracle(ref, path, cfg.tol).value,
                               "Mas_star": maslov_crossing_oracle(ref, path, cfg.tol, dual=True).value}
        report["Mas"] = mas["lidskii"]["Mas"]
        report["Mas_star"] = mas["lidskii"]["Mas_star"]
        report["routes"]["maslov"] = mas
        agreement &= len({(m["Mas"], m["Mas_star"]) for m in mas.values()}) == 1
        if args.against.lower() == "e":
            # Mas(E, Y) and N(Y) are the same integers
            same = (report["Mas"], report["Mas_star"]) == (N, Ns)
            diag["reference_identity"] = same
            agreement &= same
    report["agreement"] = bool(agreement)
    report["diagnostics"] = diag
    _emit(report, args.output)
    return EXIT_OK if agreement else EXIT_DISAGREE


# -- verify ------------------------------------------------------------------------

def cmd_verify(args, cfg: RunConfig) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(sorted(SUITES))}")
    dump_dir = Path(args.dump_dir)
    written = []

    def save(d):
        dump_dir.mkdir(parents=True, exist_ok=True)
        f = dump_dir / f"{d['suite']}-seed{d['seed']}-trial{d['index']}.json"
        f.write_text(_dumps(d) + "\n")
        written.append(str(f))

    report = run_suite(args.suite, args.trials, cfg.seed, n=args.n, workers=args.workers, on_failure=save)
    if not args.timing:
        report.pop("elapsed", None)
    report["dumps"] = written
    _emit(report, args.output)
    return EXIT_OK if not report["failures"] else EXIT_DISAGREE


# -- angles ------------------------------------------------------------------------

def _crossings(trace: AngleTrace):
    """(t, level) where a branch passes a multiple of 2pi between samples."""
    marks = []
    for j in range(trace.n):
        for k in range(trace.t.size - 1):
            q0, q1 = trace.q[k, j], trace.q[k + 1, j]
            if q0 == q1:
                continue
            level = TWO_PI * max(q0, q1)
            p0, p1 = trace.angles[k, j], trace.angles[k + 1, j]
            lam = 0.0 if p1 == p0 else min(max((level - p0) / (p1 - p0), 0.0), 1.0)
            marks.append((float(trace.t[k] + lam * (trace.t[k + 1] - trace.t[k])), level))
    return sorted(marks)


def render_svg(trace: AngleTrace, width: int = 640, height: int = 400, title: str = "") -> str:
    """Branches as polylines with gridlines at 2pi k and markers at q changes."""
    m = 50
    t0, t1 = float(trace.t[0]), float(trace.t[-1])
    lo = min(0.0, float(np.min(trace.angles)))
    hi = max(TWO_PI, float(np.max(trace.angles)))
    k_lo, k_hi = math.floor(lo / TWO_PI), math.ceil(hi / TWO_PI)
    y_lo, y_hi = k_lo * TWO_PI, k_hi * TWO_PI
    span_t = (t1 - t0) or 1.0

    def X(t):
        return m + (t - t0) / span_t * (width - 2 * m)

    def Y(v):
        return height - m - (v - y_lo) / (y_hi - y_lo) * (height - 2 * m)

    colors = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f")
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-size="14">{_escape(title)}</text>')
    for k in range(k_lo, k_hi + 1):
        y = Y(k * TWO_PI)
        out.append(f'<line x1="{m}" y1="{y:.2f}" x2="{width - m}" y2="{y:.2f}" stroke="#bbbbbb" '
                   f'stroke-dasharray="4 3"/>')
        out.append(f'<text x="{m - 6}" y="{y + 4:.2f}" text-anchor="end" font-size="11">{2 * k}&#960;</text>')
    out.append(f'<line x1="{m}" y1="{height - m}" x2="{width - m}" y2="{height - m}" stroke="black"/>')
    out.append(f'<line x1="{m}" y1="{m}" x2="{m}" y2="{height - m}" stroke="black"/>')
    out.append(f'<text x="{m}" y="{height - m + 18}" font-size="11">{t0:.4g}</text>')
    out.append(f'<text x="{width - m}" y="{height - m + 18}" text-anchor="end" font-size="11">{t1:.4g}</text>')
    for j in range(trace.n):
        pts = " ".join(f"{X(t):.2f},{Y(v):.2f}" for t, v in zip(trace.t, trace.angles[:, j]))
        out.append(f'<polyline fill="none" stroke="{colors[j % len(colors)]}" stroke-width="1.5" '
                   f'points="{pts}"/>')
    for t, level in _crossings(trace):
        out.append(f'<circle class="crossing" cx="{X(t):.2f}" cy="{Y(level):.2f}" r="4" fill="none" '
                   f'stroke="black"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;")


def cmd_angles(args, cfg: RunConfig) -> int:
    path = _source_path(args, cfg)
    if args.against:
        trace = maslov_trace(_against_path(args.against, path, cfg), path, cfg.tol)
        title = "relative Lidskii angles"
    else:
        trace = lidskii_trace(path, cfg.tol)
        title = "Lidskii angles of Z_Y(t)"
    text = trace.to_csv()
    if args.csv:
        Path(args.csv).write_text(text)
    elif not args.svg:
        sys.stdout.write(text)
    if args.svg:
        Path(args.svg).write_text(render_svg(trace, title=title))
    return EXIT_OK


# -- gen ---------------------------------------------------------------------------

def cmd_gen(args, cfg: RunConfig) -> int:
    if args.kind in ("rotation", "hamiltonian"):
        args.gen, args.path = args.kind, None
        path = _generated_path(args, cfg)
    else:
        path = _prescribed(args, cfg)
    if args.output:
        save_path(path, args.output)
        # the stored document must load back
        load_path(args.output, cfg.tol)
    else:
        from .lagrangian import path_to_dict
        _emit(path_to_dict(path))
    return EXIT_OK


def _prescribed(args, cfg: RunConfig) -> SampledLagrangianPath:
    if args.ell is None or args.r is None:
        raise UsageError("prescribed paths need --ell and --r")
    rng = np.random.default_rng(cfg.seed)
    if args.spec or args.random_flow:
        spec = _hamiltonian_spec(args, rng)
        family = hamgen.HamiltonianFlow(spec, args.step, cfg.tol)
        source = {"hamiltonian": spec.to_dict()}
    else:
        iv = _interval(args, (0.0, 1.5 * math.pi))
        w = float(_speeds(args)[0])
        family = hamgen.rotation_family(args.n, iv, args.nodes, speed=w)
        source = {"rotation": {"n": args.n, "speed": w, "interval": list(iv)}}
    rect = hamgen.oscillation_rectangle(family, cfg.tol)
    path = hamgen.prescribed_oscillation_path(family, args.ell, args.r, cfg.tol, rect=rect, anchor=args.anchor)
    path.meta["generator"] = {"kind": "prescribed", "seed": cfg.seed, **source,
                              "rectangle": {"ell": list(rect["ell"]), "r": list(rect["r"]), "w": rect["w"]}}
    return path


# -- compare-index -----------------------------------------------------------------

def cmd_compare_index(args, cfg: RunConfig) -> int:
    data = json.loads(Path(args.frames).read_text())
    try:
        Y = np.asarray(data["Y"], dtype=float)
        Yh = np.asarray(data["Yhat"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise UsageError(f"frames file needs 'Y' and 'Yhat' matrices ({exc})") from exc
    for name, M in (("Y", Y), ("Yhat", Yh)):
        if M.ndim != 2 or not matlib.is_lagrangian_frame(M, cfg.tol):
            raise UsageError(f"{name} is not a Lagrangian frame")
    b = comparative_index(Y, Yh, cfg.tol)
    lid = mu_via_lidskii(Y, Yh, cfg.tol)
    report = {**b.as_dict(), "n": b.n, "lidskii": {"mu": lid[0], "mu_star": lid[1]}}
    report["agreement"] = lid == (b.mu, b.mu_star)
    _emit(report, args.output)
    return EXIT_OK if report["agreement"] else EXIT_DISAGREE


# -- entry point -------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lagosc",
                                     description="Oscillation numbers and Maslov indices of Lagrangian paths.")
    parser.add_argument("--seed", type=int, default=DEFAULT_SEED, help="random seed (default 42)")
    parser.add_argument("--tol-rank", type=float, default=None,
                        help="relative rank tolerance (overrides OSK_TOL_RANK)")
    parser.add_argument("-v", "--verbose", action="count", default=0)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="N, N* (and Mas, Mas*) by every applicable route")
    _add_source(p)
    p.add_argument("--against", help="reference path for Maslov indices: 'e' or a path file")
    p.add_argument("--skip", nargs="*", choices=("partition", "rank-drop", "crossing"),
                   help="routes to leave out")
    p.add_argument("-o", "--output", help="write the JSON report here instead of stdout")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("verify", help="run a randomized identity suite")
    p.add_argument("suite", help="one of: " + ", ".join(SUITES))
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--n", type=int, default=None, help="fix the dimension (default: suite range)")
    p.add_argument("--workers", type=int, default=1, help="worker processes for trials")
    p.add_argument("--dump-dir", default="failures", help="where failing instances are written")
    p.add_argument("--timing", action="store_true", help="include elapsed seconds in the report")
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("angles", help="export angle branches as CSV and SVG")
    _add_source(p)
    p.add_argument("--against", help="plot relative angles against 'e' or a path file")
    p.add_argument("--csv", help="CSV output file (default stdout)")
    p.add_argument("--svg", help="SVG output file")
    p.set_defaults(func=cmd_angles)

    p = sub.add_parser("gen", help="generate a path file")
    p.add_argument("kind", choices=("rotation", "hamiltonian", "prescribed"))
    _add_source(p)
    p.add_argument("--random-flow", action="store_true", help="prescribed: use a random Hamiltonian flow")
    p.add_argument("--ell", type=int)
    p.add_argument("--r", type=int)
    p.add_argument("--anchor", choices=("a", "b"), default=None)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("compare-index", help="mu and mu* of two frames from a JSON file")
    p.add_argument("frames", help='JSON file with "Y" and "Yhat" (2n x n nested lists)')
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_compare_index)
    return parser


def make_config(args) -> RunConfig:
    overrides = {} if args.tol_rank is None else {"rank_rtol": args.tol_rank}
    tol = matlib.Tolerances.from_env(**overrides)
    return RunConfig(command=args.command, inputs=[getattr(args, "path", None)], tol=tol,
                     seed=args.seed, verbosity=args.verbose)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING - 10 * min(args.verbose, 2), stream=sys.stderr,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = make_config(args)
        return args.func(args, cfg)
    except (LagOscError, UsageError, ValueError, OSError, json.JSONDecodeError) as exc:
        print(f"lagosc: error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
