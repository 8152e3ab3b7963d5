"""Lagrangian frames, sampled Lagrangian paths and their transforms.

Frames are plain ``(2n, n)`` float arrays with the position block ``X`` on
top and the momentum block ``U`` below.  Symplectic matrices are plain
``(2n, 2n)`` arrays.  A :class:`SampledLagrangianPath` is a strictly
increasing time grid with one frame per node and an optional evaluator
used to refine the grid.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from . import matlib
from .errors import (
    EvaluatorMissing,
    NotLagrangian,
    NotPositiveDefinite,
    RefinementExhausted,
    ShapeMismatch,
    SingularFactor,
)
from .matlib import Tolerances, canonical_j

FrameFn = Callable[[float], np.ndarray]


def vertical_plane(n: int) -> np.ndarray:
    """The frame E = (0, I)^T."""
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.vstack([np.zeros((n, n)), np.eye(n)])


def blocks(Y) -> tuple[np.ndarray, np.ndarray]:
    Y = np.asarray(Y, dtype=float)
    n = Y.shape[1]
    return Y[:n], Y[n:]


def check_frame(Y, tol: Tolerances | None = None) -> np.ndarray:
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != 2 * Y.shape[1]:
        raise ShapeMismatch(f"expected a 2n x n frame, got {Y.shape}")
    if not np.all(np.isfinite(Y)):
        raise NotLagrangian("frame has non-finite entries")
    if not matlib.is_lagrangian_frame(Y, tol):
        raise NotLagrangian("frame is not isotropic or not of full rank")
    return Y


def wronskian(Y, Yhat) -> np.ndarray:
    """W(Y, Yhat) = Y^T J Yhat."""
    Y = np.asarray(Y, dtype=float)
    Yhat = np.asarray(Yhat, dtype=float)
    if Y.shape != Yhat.shape:
        raise ShapeMismatch(f"frame shapes differ: {Y.shape} vs {Yhat.shape}")
    n = Y.shape[1]
    X, U = Y[:n], Y[n:]
    Xh, Uh = Yhat[:n], Yhat[n:]
    return X.T @ Uh - U.T @ Xh


def normalize_frame(Y, tol: Tolerances | None = None) -> np.ndarray:
    """Y K_Y with K_Y = (Y^T Y)^{-1/2}; the result has orthonormal columns."""
    Y = np.asarray(Y, dtype=float)
    # Y^T Y is symmetric by construction, so the symmetry check is skipped
    w, V = np.linalg.eigh(Y.T @ Y)
    if w[0] <= matlib._tol(tol).struct_atol:
        raise NotPositiveDefinite(f"frame Gram matrix has eigenvalue {w[0]:.3e}")
    return Y @ ((V / np.sqrt(w)) @ V.T)


def project_frame(Y, tol: Tolerances | None = None) -> np.ndarray:
    """Nearest orthonormal Lagrangian frame to the plane of Y.

    Normalizes, removes the isotropy defect D = Y*^T J Y* with
    Y* <- Y* + J Y* D / 2, and normalizes again.
    """
    Ys = normalize_frame(Y, tol)
    n = Ys.shape[1]
    D = Ys[:n].T @ Ys[n:] - Ys[n:].T @ Ys[:n]
    if np.max(np.abs(D)) > 1e-15:
        JY = np.vstack([Ys[n:], -Ys[:n]])
        Ys = normalize_frame(Ys + 0.5 * JY @ D, tol)
    return Ys


def z_frame(Y, tol: Tolerances | None = None) -> np.ndarray:
    """The orthogonal symplectic matrix [J Y K_Y, Y K_Y]."""
    Ys = normalize_frame(Y, tol)
    n = Ys.shape[1]
    X, U = Ys[:n], Ys[n:]
    # J Ys = (U, -X)
    return np.block([[U, X], [-X, U]])


def factor_symplectic(S, tol: Tolerances | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Split S = Zpart @ Lpart with Zpart = z_frame(S E) and Lpart lower block triangular."""
    S = np.asarray(S, dtype=float)
    n = S.shape[0] // 2
    Zp = z_frame(S[:, n:], tol)
    return Zp, Zp.T @ S


def block_diag_frame(Y1, Y2) -> np.ndarray:
    """Pi diag{Y1, Y2}: the frame with blocks diag{X1, X2} over diag{U1, U2}."""
    X1, U1 = blocks(Y1)
    X2, U2 = blocks(Y2)
    n1, n2 = X1.shape[0], X2.shape[0]
    out = np.zeros((2 * (n1 + n2), n1 + n2))
    out[:n1, :n1] = X1
    out[n1:n1 + n2, n1:] = X2
    out[n1 + n2:2 * n1 + n2, :n1] = U1
    out[2 * n1 + n2:, n1:] = U2
    return out


@dataclass(frozen=True)
class SampledLagrangianPath:
    """Frames of a continuous Lagrangian path on a strictly increasing grid.

    ``evaluator`` maps a time to a frame and enables refinement; paths
    loaded from files usually lack it.  ``derivative`` optionally gives the
    exact Y'(t) for monotonicity checks.  ``evaluator_threadsafe`` declares
    whether the evaluator may be called concurrently.
    """

    t: np.ndarray
    frames: np.ndarray
    evaluator: FrameFn | None = None
    derivative: FrameFn | None = None
    evaluator_threadsafe: bool = False
    meta: dict = field(default_factory=dict, compare=False)
    tol: Tolerances = field(default=matlib.DEFAULT_TOL, compare=False)
    validate: bool = field(default=True, compare=False, repr=False)
    cache: dict = field(default_factory=dict, init=False, compare=False, repr=False)

    def __post_init__(self):
        t = np.asarray(self.t, dtype=float).reshape(-1)
        frames = np.asarray(self.frames, dtype=float)
        if frames.ndim != 3 or frames.shape[0] != t.size or frames.shape[1] != 2 * frames.shape[2]:
            raise ShapeMismatch(f"frames of shape {frames.shape} do not match {t.size} nodes")
        if t.size < 1 or not np.all(np.isfinite(t)):
            raise ValueError("time grid must be non-empty and finite")
        if np.any(np.diff(t) <= 0):
            raise ValueError("time grid must be strictly increasing")
        object.__setattr__(self, "t", t)
        object.__setattr__(self, "frames", frames)
        if self.validate:
            for i, Y in enumerate(frames):
                if not np.all(np.isfinite(Y)) or not matlib.is_lagrangian_frame(Y, self.tol):
                    raise NotLagrangian(f"frame at node {i} (t={t[i]!r}) is not Lagrangian")

    @property
    def n(self) -> int:
        return self.frames.shape[2]

    @property
    def a(self) -> float:
        return float(self.t[0])

    @property
    def b(self) -> float:
        return float(self.t[-1])

    @property
    def refinable(self) -> bool:
        return self.evaluator is not None

    def node_index(self, s: float) -> int | None:
        i = int(np.searchsorted(self.t, s))
        if i < self.t.size and self.t[i] == s:
            return i
        return None

    def frame_at(self, s: float) -> np.ndarray:
        i = self.node_index(s)
        if i is not None:
            return self.frames[i]
        if self.evaluator is None:
            raise EvaluatorMissing(f"no evaluator to sample the path at t={s!r}")
        return np.asarray(self.evaluator(float(s)), dtype=float)

    def check_evaluator(self) -> bool:
        """Evaluator reproduces the stored frames to struct_atol (after normalization)."""
        if self.evaluator is None:
            return True
        for s, Y in zip(self.t, self.frames):
            Ye = np.asarray(self.evaluator(float(s)), dtype=float)
            if np.max(np.abs(Ye - Y)) > self.tol.struct_atol * max(1.0, np.max(np.abs(Y))):
                return False
        return True

    def _replace(self, t, frames, **kw) -> "SampledLagrangianPath":
        args = dict(
            evaluator=self.evaluator,
            derivative=self.derivative,
            evaluator_threadsafe=self.evaluator_threadsafe,
            meta=dict(self.meta),
            tol=self.tol,
            validate=False,
        )
        args.update(kw)
        return SampledLagrangianPath(t, frames, **args)

    def resample(self, times) -> "SampledLagrangianPath":
        """The path sampled at ``times`` (sorted, deduplicated)."""
        times = np.unique(np.asarray(times, dtype=float))
        frames = np.stack([self.frame_at(s) for s in times])
        return self._replace(times, frames)

    def densified(self, factor: int = 2) -> "SampledLagrangianPath":
        """Insert ``factor - 1`` equally spaced nodes into every segment."""
        if factor < 2:
            return self
        frac = np.arange(1, factor) / factor
        extra = (self.t[:-1, None] + np.diff(self.t)[:, None] * frac[None, :]).ravel()
        return self.resample(np.concatenate([self.t, extra]))

    def restrict(self, lo: float, hi: float) -> "SampledLagrangianPath":
        if not (self.a <= lo < hi <= self.b):
            raise ValueError(f"[{lo}, {hi}] is not a subinterval of [{self.a}, {self.b}]")
        inner = self.t[(self.t > lo) & (self.t < hi)]
        return self.resample(np.concatenate([[lo], inner, [hi]]))

    def map_frames(self, fn: Callable[[float, np.ndarray], np.ndarray], *, derivative=None,
                   meta=None) -> "SampledLagrangianPath":
        """Apply ``fn(t, Y)`` node-wise and to the evaluator; revalidates the frames."""
        frames = np.stack([fn(float(s), Y) for s, Y in zip(self.t, self.frames)])
        ev = None
        if self.evaluator is not None:
            base = self.evaluator

            def ev(s, _base=base, _fn=fn):
                return _fn(s, np.asarray(_base(s), dtype=float))

        return SampledLagrangianPath(
            self.t, frames, evaluator=ev, derivative=derivative,
            evaluator_threadsafe=self.evaluator_threadsafe,
            meta=dict(self.meta if meta is None else meta), tol=self.tol,
        )


def path_from_function(fn: FrameFn, times, *, derivative: FrameFn | None = None,
                       tol: Tolerances | None = None, meta=None) -> SampledLagrangianPath:
    times = np.asarray(times, dtype=float)
    frames = np.stack([np.asarray(fn(float(s)), dtype=float) for s in times])
    return SampledLagrangianPath(times, frames, evaluator=fn, derivative=derivative,
                                 evaluator_threadsafe=True, meta=dict(meta or {}),
                                 tol=tol or matlib.DEFAULT_TOL)


def constant_path(Y, times, tol: Tolerances | None = None) -> SampledLagrangianPath:
    Y = np.asarray(Y, dtype=float)
    zero = np.zeros_like(Y)
    return path_from_function(lambda s: Y, times, derivative=lambda s: zero, tol=tol,
                              meta={"kind": "constant"})


def _as_time_fn(M):
    if callable(M):
        return lambda s: np.asarray(M(s), dtype=float)
    M = np.asarray(M, dtype=float)
    return lambda s: M


def transform_path(path: SampledLagrangianPath, S) -> SampledLagrangianPath:
    """Node-wise S(t)^{-1} Y(t) for a constant or time-dependent symplectic S."""
    S_of_t = _as_time_fn(S)
    return path.map_frames(lambda s, Y: np.linalg.solve(S_of_t(s), Y),
                           meta={**path.meta, "transformed": True})


def apply_left(path: SampledLagrangianPath, S) -> SampledLagrangianPath:
    """Node-wise S(t) Y(t)."""
    S_of_t = _as_time_fn(S)
    return path.map_frames(lambda s, Y: S_of_t(s) @ Y, meta={**path.meta, "transformed": True})


def multiply_right(path: SampledLagrangianPath, C) -> SampledLagrangianPath:
    """Node-wise Y(t) C(t); C must be invertible at every node."""
    C_of_t = _as_time_fn(C)
    for s in path.t:
        Cs = C_of_t(float(s))
        if matlib.numeric_rank(Cs, path.tol) < path.n:
            raise SingularFactor(f"right factor is singular at t={float(s)!r}")
    return path.map_frames(lambda s, Y: Y @ C_of_t(s))


def common_grid(*paths: SampledLagrangianPath) -> list[SampledLagrangianPath]:
    """Resample paths onto the union of their grids (evaluators needed for new nodes)."""
    a, b = paths[0].a, paths[0].b
    for p in paths[1:]:
        if not (np.isclose(p.a, a, rtol=0, atol=1e-12) and np.isclose(p.b, b, rtol=0, atol=1e-12)):
            raise ValueError("paths are defined on different intervals")
    grid = np.unique(np.concatenate([p.t for p in paths]))
    out = []
    for p in paths:
        if p.t.size == grid.size and np.array_equal(p.t, grid):
            out.append(p)
        else:
            out.append(p.resample(grid))
    return out


def block_diag_path(p1: SampledLagrangianPath, p2: SampledLagrangianPath) -> SampledLagrangianPath:
    """The interleaved path Pi diag{Y1, Y2} on the union grid."""
    q1, q2 = common_grid(p1, p2)
    frames = np.stack([block_diag_frame(A, B) for A, B in zip(q1.frames, q2.frames)])
    ev = None
    if q1.evaluator is not None and q2.evaluator is not None:
        e1, e2 = q1.evaluator, q2.evaluator

        def ev(s):
            return block_diag_frame(e1(s), e2(s))

    der = None
    if q1.derivative is not None and q2.derivative is not None:
        d1, d2 = q1.derivative, q2.derivative

        def der(s):
            return block_diag_frame(d1(s), d2(s))

    return SampledLagrangianPath(q1.t, frames, evaluator=ev, derivative=der,
                                 meta={"kind": "block_diag"}, tol=q1.tol)


def refine_path(path: SampledLagrangianPath, criterion, max_depth: int = 20) -> SampledLagrangianPath:
    """Bisect every segment failing ``criterion(t0, Y0, t1, Y1)`` until all pass.

    Raises :class:`RefinementExhausted` naming the first segment still
    failing at ``max_depth``.
    """
    if path.evaluator is None:
        raise EvaluatorMissing("refinement needs an evaluator")
    times = [path.a]
    frames = [path.frames[0]]
    for i in range(path.t.size - 1):
        stack = [(float(path.t[i + 1]), path.frames[i + 1], 0)]
        t0, Y0 = times[-1], frames[-1]
        while stack:
            t1, Y1, depth = stack[-1]
            if criterion(t0, Y0, t1, Y1):
                times.append(t1)
                frames.append(Y1)
                t0, Y0 = t1, Y1
                stack.pop()
                continue
            if depth >= max_depth:
                raise RefinementExhausted(
                    f"segment [{t0!r}, {t1!r}] still fails after {max_depth} bisections",
                    segment=(t0, t1),
                )
            tm = 0.5 * (t0 + t1)
            stack[-1] = (t1, Y1, depth + 1)
            stack.append((tm, np.asarray(path.evaluator(tm), dtype=float), depth + 1))
    return path._replace(np.array(times), np.stack(frames), validate=True)


# -- path file format ---------------------------------------------------------

def path_to_dict(path: SampledLagrangianPath) -> dict:
    out = {
        "n": path.n,
        "t": [float(s) for s in path.t],
        "frames": [[float(v) for v in Y.ravel()] for Y in path.frames],
    }
    if path.meta:
        out["meta"] = path.meta
    return out


def path_from_dict(data: dict, tol: Tolerances | None = None) -> SampledLagrangianPath:
    """Parse ``{"n", "t", "frames"}``; frames are row-major 2n x n lists."""
    try:
        n = int(data["n"])
        t = np.asarray(data["t"], dtype=float)
        raw = np.asarray(data["frames"], dtype=float)
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed path document: {exc}") from exc
    if n < 1 or raw.ndim != 2 or raw.shape != (t.size, 2 * n * n):
        raise ValueError(f"frames must be {t.size} rows of {2 * n * n} numbers")
    return SampledLagrangianPath(t, raw.reshape(t.size, 2 * n, n), meta=dict(data.get("meta", {})),
                                 tol=tol or matlib.DEFAULT_TOL)


def save_path(path: SampledLagrangianPath, filename) -> None:
    Path(filename).write_text(json.dumps(path_to_dict(path), sort_keys=True) + "\n")


def load_path(filename, tol: Tolerances | None = None) -> SampledLagrangianPath:
    try:
        data = json.loads(Path(filename).read_text())
    except json.JSONDecodeError as exc:
        raise ValueError(f"{filename}: not valid JSON ({exc})") from exc
    return path_from_dict(data, tol)


__all__ = [
    "SampledLagrangianPath", "vertical_plane", "blocks", "check_frame", "wronskian",
    "normalize_frame", "z_frame", "factor_symplectic", "block_diag_frame", "path_from_function",
    "constant_path", "transform_path", "apply_left", "multiply_right", "common_grid",
    "block_diag_path", "refine_path", "path_to_dict", "path_from_dict", "save_path", "load_path",
    "canonical_j",
]
