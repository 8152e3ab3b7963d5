"""Comparative index and dual comparative index of two Lagrangian frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import matlib
from .errors import PreconditionViolated, ShapeMismatch
from .lagrangian import normalize_frame, vertical_plane, wronskian
from .matlib import Tolerances


@dataclass(frozen=True)
class ComparativeIndexBreakdown:
    """Integers entering mu and mu* plus the eigenvalue margins of P.

    ``p_zero_max`` is the largest |eigenvalue| of P that was classified as
    zero and ``p_nonzero_min`` the smallest one that was not; a small gap
    between them flags a borderline decision.
    """

    rank_M: int
    ind_P: int
    ind_negP: int
    rank_P: int
    n: int
    p_zero_max: float = 0.0
    p_nonzero_min: float = float("inf")

    @property
    def mu(self) -> int:
        return self.rank_M + self.ind_P

    @property
    def mu_star(self) -> int:
        return self.rank_M + self.ind_negP

    def as_dict(self) -> dict:
        return {
            "mu": self.mu,
            "mu_star": self.mu_star,
            "rank_M": self.rank_M,
            "ind_P": self.ind_P,
            "ind_negP": self.ind_negP,
            "rank_P": self.rank_P,
            "p_zero_max": self.p_zero_max,
            "p_nonzero_min": None if np.isinf(self.p_nonzero_min) else self.p_nonzero_min,
        }


def comparative_index(Y, Yhat, tol: Tolerances | None = None) -> ComparativeIndexBreakdown:
    """mu(Y, Yhat) and mu*(Y, Yhat) with their ingredients.

    Both frames are first normalized to orthonormal columns.  The index is
    invariant under right multiplication, and on normalized frames every
    block has magnitude at most one, so absolute rank cuts apply.
    """
    Y = np.asarray(Y, dtype=float)
    Yhat = np.asarray(Yhat, dtype=float)
    if Y.shape != Yhat.shape or Y.ndim != 2 or Y.shape[0] != 2 * Y.shape[1]:
        raise ShapeMismatch(f"incompatible frames {Y.shape} and {Yhat.shape}")
    n = Y.shape[1]
    Ys = normalize_frame(Y, tol)
    Yh = normalize_frame(Yhat, tol)
    X = Ys[:n]
    Xh = Yh[:n]
    W = wronskian(Ys, Yh)
    Xp = matlib.pseudoinverse(X, tol, scale=1.0)
    eye = np.eye(n)
    M = (eye - Xp @ X) @ W
    rank_M = matlib.numeric_rank(M, tol, scale=1.0)
    V = eye - matlib.pseudoinverse(M, tol, scale=1.0) @ M
    P = V @ W.T @ Xp @ Xh @ V
    scale = max(1.0, float(np.linalg.norm(Xp, 2)))
    neg, _, pos, zmax, nzmin = matlib.eigen_classification(P, tol, scale=scale)
    return ComparativeIndexBreakdown(
        rank_M=rank_M, ind_P=neg, ind_negP=pos, rank_P=neg + pos, n=n,
        p_zero_max=zmax, p_nonzero_min=nzmin,
    )


def mu(Y, Yhat, tol: Tolerances | None = None) -> int:
    return comparative_index(Y, Yhat, tol).mu


def mu_star(Y, Yhat, tol: Tolerances | None = None) -> int:
    return comparative_index(Y, Yhat, tol).mu_star


def _pair(b: ComparativeIndexBreakdown) -> tuple[int, int]:
    return b.mu, b.mu_star


def check_prop_right_mult(Y, Yhat, C1, C2, tol: Tolerances | None = None) -> bool:
    """mu and mu* are unchanged by invertible right factors."""
    n = np.asarray(Y).shape[1]
    for name, C in (("C1", C1), ("C2", C2)):
        if np.shape(C) != (n, n) or matlib.numeric_rank(C, tol) < n:
            raise PreconditionViolated(f"{name} is not an invertible {n}x{n} matrix")
    lhs = comparative_index(np.asarray(Y) @ C1, np.asarray(Yhat) @ C2, tol)
    return _pair(lhs) == _pair(comparative_index(Y, Yhat, tol))


def check_prop_lower_triangular(Y, Yhat, L, tol: Tolerances | None = None) -> bool:
    """mu(LY, L Yhat) = mu(Y, Yhat) for lower block triangular symplectic L."""
    L = np.asarray(L, dtype=float)
    n = np.asarray(Y).shape[1]
    if L.shape != (2 * n, 2 * n) or not matlib.is_symplectic(L, tol):
        raise PreconditionViolated("L is not symplectic")
    if np.max(np.abs(L[:n, n:])) > matlib._tol(tol).struct_atol * max(1.0, np.max(np.abs(L))):
        raise PreconditionViolated("L is not lower block triangular")
    lhs = comparative_index(L @ Y, L @ Yhat, tol)
    return _pair(lhs) == _pair(comparative_index(Y, Yhat, tol))


def check_prop_duality(Y, Yhat, Z, tol: Tolerances | None = None) -> bool:
    """mu(Y, Yhat) = mu*(Z^{-1}E, Z^{-1}Yhat) and the mirrored identity.

    Z must be symplectic with Z E spanning the same plane as Y; since the
    index only sees column spans, ``Z = z_frame(Y)`` qualifies.
    """
    Y = np.asarray(Y, dtype=float)
    Z = np.asarray(Z, dtype=float)
    n = Y.shape[1]
    if Z.shape != (2 * n, 2 * n) or not matlib.is_symplectic(Z, tol):
        raise PreconditionViolated("Z is not symplectic")
    E = vertical_plane(n)
    ZE = Z @ E
    Q, _ = np.linalg.qr(Y)
    resid = ZE - Q @ (Q.T @ ZE)
    if np.max(np.abs(resid)) > matlib._tol(tol).struct_atol * max(1.0, np.max(np.abs(ZE))):
        raise PreconditionViolated("Z E does not span the plane of Y")
    Zinv = matlib.symplectic_inverse(Z)
    base = comparative_index(Y, Yhat, tol)
    moved = comparative_index(Zinv @ E, Zinv @ Yhat, tol)
    return base.mu == moved.mu_star and base.mu_star == moved.mu
