"""Tolerance-aware dense linear algebra kernels.

Every integer produced by the package (ranks, inertia counts, indices)
is decided here, so all thresholds live in one place.  A threshold is
``rank_rtol * max(rows, cols) * scale`` where ``scale`` defaults to the
largest singular value of the argument.  Callers that know the natural
magnitude of a matrix (blocks of a frame with orthonormal columns have
magnitude 1) pass ``scale`` explicitly; otherwise a tiny matrix such as
``[1e-16]`` would be classified as having full rank.
"""

from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .errors import NonSymmetric, NotPositiveDefinite, ShapeMismatch


@dataclass(frozen=True)
class Tolerances:
    rank_rtol: float = 1e-10
    struct_atol: float = 1e-9
    angle_atol: float = 1e-9

    def __post_init__(self):
        for name in ("rank_rtol", "struct_atol", "angle_atol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive")

    @classmethod
    def from_env(cls, **overrides) -> "Tolerances":
        """Defaults, with ``OSK_TOL_RANK`` overriding ``rank_rtol``."""
        env = os.environ.get("OSK_TOL_RANK")
        if env is not None and "rank_rtol" not in overrides:
            overrides["rank_rtol"] = float(env)
        return cls(**overrides)


DEFAULT_TOL = Tolerances()


def _tol(tol):
    return DEFAULT_TOL if tol is None else tol


def canonical_j(n: int) -> np.ndarray:
    """The 2n x 2n matrix [[0, I], [-I, 0]]."""
    eye = np.eye(n)
    zero = np.zeros((n, n))
    return np.block([[zero, eye], [-eye, zero]])


def rank_threshold(shape, scale, tol=None) -> float:
    tol = _tol(tol)
    return tol.rank_rtol * max(shape) * scale


def numeric_rank(A, tol: Tolerances | None = None, scale: float | None = None) -> int:
    """Number of singular values above the rank threshold.

    With ``scale=None`` the threshold is relative to the largest singular
    value; the zero matrix has rank 0 either way.
    """
    A = np.atleast_2d(np.asarray(A, dtype=float))
    s = np.linalg.svd(A, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    ref = s[0] if scale is None else scale
    return int(np.count_nonzero(s > rank_threshold(A.shape, ref, tol)))


def pseudoinverse(A, tol: Tolerances | None = None, scale: float | None = None) -> np.ndarray:
    """Moore-Penrose pseudoinverse truncated with the ``numeric_rank`` cut."""
    A = np.atleast_2d(np.asarray(A, dtype=float))
    U, s, Vt = np.linalg.svd(A, full_matrices=False)
    if s.size == 0 or s[0] == 0.0:
        return np.zeros(A.T.shape)
    ref = s[0] if scale is None else scale
    keep = s > rank_threshold(A.shape, ref, tol)
    s_inv = np.zeros_like(s)
    s_inv[keep] = 1.0 / s[keep]
    return (Vt.T * s_inv) @ U.T


def _symmetrized(P, tol, scale):
    P = np.atleast_2d(np.asarray(P, dtype=float))
    if P.shape[0] != P.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {P.shape}")
    asym = np.max(np.abs(P - P.T)) if P.size else 0.0
    # asymmetry is judged relative to the magnitude of P; absolute for |P| <= 1
    mag = max(1.0, float(np.max(np.abs(P))) if P.size else 0.0, scale or 0.0)
    if asym > _tol(tol).struct_atol * mag:
        raise NonSymmetric(f"matrix asymmetric by {asym:.3e}")
    return 0.5 * (P + P.T)


def eigen_classification(P, tol: Tolerances | None = None, scale: float | None = None):
    """Inertia of a symmetric matrix together with its two classification margins.

    Returns ``(neg, zero, pos, largest_zero, smallest_nonzero)`` where the last
    two are the largest |eigenvalue| classified as zero and the smallest one
    classified as nonzero (``0.0`` and ``inf`` when the class is empty).
    """
    P = _symmetrized(P, tol, scale)
    ev = np.linalg.eigvalsh(P)
    if ev.size == 0:
        return 0, 0, 0, 0.0, float("inf")
    ref = np.max(np.abs(ev)) if scale is None else scale
    cut = rank_threshold(P.shape, ref, tol) if ref > 0 else 0.0
    mag = np.abs(ev)
    zero = mag <= cut
    neg = int(np.count_nonzero((ev < 0) & ~zero))
    pos = int(np.count_nonzero((ev > 0) & ~zero))
    largest_zero = float(mag[zero].max()) if zero.any() else 0.0
    smallest_nonzero = float(mag[~zero].min()) if (~zero).any() else float("inf")
    return neg, int(np.count_nonzero(zero)), pos, largest_zero, smallest_nonzero


def inertia(P, tol: Tolerances | None = None, scale: float | None = None) -> tuple[int, int, int]:
    """(negative, zero, positive) eigenvalue counts of a symmetric matrix."""
    return eigen_classification(P, tol, scale)[:3]


def negative_index(P, tol: Tolerances | None = None, scale: float | None = None) -> int:
    """Number of negative eigenvalues of the symmetric matrix P."""
    return inertia(P, tol, scale)[0]


def inv_sqrt_spd(G, tol: Tolerances | None = None) -> np.ndarray:
    """Symmetric positive definite K with K G K = I."""
    tol = _tol(tol)
    G = _symmetrized(G, tol, None)
    w, V = np.linalg.eigh(G)
    if w[0] <= tol.struct_atol:
        raise NotPositiveDefinite(f"smallest eigenvalue {w[0]:.3e}")
    return (V / np.sqrt(w)) @ V.T


def _check_square_even(S):
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1] or S.shape[0] % 2:
        raise ShapeMismatch(f"expected a 2n x 2n matrix, got {S.shape}")
    return S


def is_symplectic(S, tol: Tolerances | None = None) -> bool:
    S = _check_square_even(S)
    J = canonical_j(S.shape[0] // 2)
    scale = max(1.0, np.linalg.norm(S, 2) ** 2)
    return bool(np.max(np.abs(S.T @ J @ S - J)) <= _tol(tol).struct_atol * scale)


def is_orthogonal(S, tol: Tolerances | None = None) -> bool:
    S = np.asarray(S, dtype=float)
    if S.ndim != 2 or S.shape[0] != S.shape[1]:
        raise ShapeMismatch(f"expected a square matrix, got {S.shape}")
    return bool(np.max(np.abs(S.T @ S - np.eye(S.shape[0]))) <= _tol(tol).struct_atol)


def is_lagrangian_frame(Y, tol: Tolerances | None = None) -> bool:
    """Y^T J Y = 0 and rank Y = n, judged on the orthonormalized frame."""
    Y = np.asarray(Y, dtype=float)
    if Y.ndim != 2 or Y.shape[0] != 2 * Y.shape[1]:
        raise ShapeMismatch(f"expected a 2n x n matrix, got {Y.shape}")
    n = Y.shape[1]
    if numeric_rank(Y, tol) < n:
        return False
    Q, _ = np.linalg.qr(Y)
    iso = Q.T @ canonical_j(n) @ Q
    return bool(np.max(np.abs(iso)) <= _tol(tol).struct_atol)


def symplectic_inverse(S) -> np.ndarray:
    """S^{-1} = -J S^T J, exact for symplectic S."""
    S = np.asarray(S, dtype=float)
    J = canonical_j(S.shape[0] // 2)
    return -J @ S.T @ J
