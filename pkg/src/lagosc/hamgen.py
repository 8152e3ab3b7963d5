"""Test-path generators: rotations, linear Hamiltonian flows, F(Phi) families.

Also contains the construction of a path in F(Phi) with prescribed
oscillation numbers and the seeded random instance generators used by the
verification suites.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import matlib
from .errors import ConstructionFailed, OutOfRange, PreconditionViolated, StepFailure
from .lagrangian import SampledLagrangianPath, project_frame, vertical_plane
from .matlib import Tolerances, canonical_j

DEFAULT_STEP = 0.01
RANDOM_STEP = 0.02
# random flows keep cond(Phi) = |Phi|^2 below ~1e3 so rank decisions stay reliable
PHI_NORM_CAP = 30.0


# -- Hamiltonians -------------------------------------------------------------------

@dataclass
class HamiltonianSpec:
    """Symmetric H(t) on [a, b] with optional breakpoints of discontinuity.

    ``params`` keeps the JSON description H was built from (if any).
    """

    n: int
    H_of_t: Callable[[float], np.ndarray]
    interval: tuple[float, float]
    breakpoints: tuple[float, ...] = ()
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        a, b = map(float, self.interval)
        if not a < b:
            raise ValueError("interval must satisfy a < b")
        self.interval = (a, b)
        for s in (a, 0.5 * (a + b), b):
            H = np.asarray(self.H_of_t(s), dtype=float)
            if H.shape != (2 * self.n, 2 * self.n):
                raise ValueError(f"H(t) must be {2 * self.n}x{2 * self.n}, got {H.shape}")
            if np.max(np.abs(H - H.T)) > matlib.DEFAULT_TOL.struct_atol * max(1.0, np.max(np.abs(H))):
                raise ValueError(f"H(t) is not symmetric at t={s!r}")

    @classmethod
    def constant(cls, H, interval) -> "HamiltonianSpec":
        H = np.asarray(H, dtype=float)
        return cls(H.shape[0] // 2, lambda s: H, interval,
                   params={"kind": "constant", "H": H.tolist()})

    @classmethod
    def trig(cls, H0, H1, H2, omega: float, interval) -> "HamiltonianSpec":
        """H(t) = H0 + H1 cos(omega t) + H2 sin(omega t)."""
        H0, H1, H2 = (np.asarray(M, dtype=float) for M in (H0, H1, H2))

        def H(s):
            return H0 + H1 * math.cos(omega * s) + H2 * math.sin(omega * s)

        return cls(H0.shape[0] // 2, H, interval,
                   params={"kind": "trig", "H0": H0.tolist(), "H1": H1.tolist(), "H2": H2.tolist(),
                           "omega": float(omega)})

    @classmethod
    def from_dict(cls, data: dict) -> "HamiltonianSpec":
        try:
            kind = data["kind"]
            interval = tuple(float(v) for v in data["interval"])
            if kind == "constant":
                spec = cls.constant(data["H"], interval)
            elif kind == "trig":
                spec = cls.trig(data["H0"], data["H1"], data["H2"], float(data["omega"]), interval)
            else:
                raise ValueError(f"unknown Hamiltonian kind {kind!r}")
        except (KeyError, TypeError) as exc:
            raise ValueError(f"malformed Hamiltonian spec: {exc}") from exc
        if "n" in data and int(data["n"]) != spec.n:
            raise ValueError("declared n does not match the size of H")
        return spec

    def to_dict(self) -> dict:
        return {"n": self.n, "interval": list(self.interval), **self.params}


def _rk4_step(f, t, Y, h):
    k1 = f(t, Y)
    k2 = f(t + h / 2, Y + h / 2 * k1)
    k3 = f(t + h / 2, Y + h / 2 * k2)
    k4 = f(t + h, Y + h * k3)
    return Y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)


def _symplectic_correct(Phi, J, tol):
    """One step of Phi <- Phi (I + J E / 2) with E = Phi^T J Phi - J."""
    E = Phi.T @ J @ Phi - J
    # residuals are measured relative to |Phi|^2, the size of Phi^T J Phi
    scale = max(1.0, float(np.linalg.norm(Phi, 2)) ** 2)
    target = 100 * np.finfo(float).eps * scale
    if np.max(np.abs(E)) <= target:
        return Phi
    for _ in range(4):
        Phi = Phi @ (np.eye(J.shape[0]) + 0.5 * J @ E)
        E = Phi.T @ J @ Phi - J
        if np.max(np.abs(E)) <= target:
            return Phi
    if np.max(np.abs(E)) > tol.struct_atol * scale:
        raise StepFailure(f"symplectic residual {np.max(np.abs(E)):.3e} cannot be reduced")
    return Phi


# -- families Phi(t) C ----------------------------------------------------------------

@dataclass
class PhiFamily:
    """Continuous symplectic Phi(t) on [a, b] with a node grid and optional Phi'(t)."""

    Phi: Callable[[float], np.ndarray]
    interval: tuple[float, float]
    nodes: np.ndarray
    derivative: Callable[[float], np.ndarray] | None = None
    meta: dict = field(default_factory=dict)
    node_values: np.ndarray | None = None

    @property
    def n(self) -> int:
        return np.asarray(self.Phi(self.interval[0])).shape[0] // 2

    @property
    def a(self) -> float:
        return float(self.interval[0])

    @property
    def b(self) -> float:
        return float(self.interval[1])

    def at(self, s: float) -> np.ndarray:
        if self.node_values is not None:
            i = int(np.searchsorted(self.nodes, s))
            if i < self.nodes.size and self.nodes[i] == s:
                return self.node_values[i]
        return np.asarray(self.Phi(float(s)), dtype=float)

    def path(self, C, tol: Tolerances | None = None, meta: dict | None = None,
             anchor: float | None = None, anchor_frame=None) -> SampledLagrangianPath:
        """The path Phi(t) C, stored as well-conditioned frames spanning the same planes.

        Frames are ``project_frame(Phi(t) C) @ G`` with a constant G chosen so
        that the frame is close to Phi(anchor) C when ``anchor`` is given.
        ``anchor_frame`` is the exact Lagrangian value Phi(anchor) C should
        have (e.g. E); it is stored verbatim at the anchor node, which keeps
        rounding in Phi(anchor) Phi(anchor)^{-1} out of the endpoint.
        The time-dependent right factor changes neither oscillation numbers
        nor the form Y'^T J Y up to congruence; the attached derivative is
        Phi'(t) C K(t) G, which gives that form exactly.
        """
        C = np.asarray(C, dtype=float)
        G = np.eye(C.shape[1])
        if anchor is not None:
            Y0 = self.at(anchor) @ C if anchor_frame is None else np.asarray(anchor_frame, dtype=float)
            G = _sqrt_spd(Y0.T @ Y0)

        def frame(s, Phi_s):
            Y = Phi_s @ C
            return project_frame(Y, tol) @ G

        frames = np.stack([frame(s, self.at(s)) for s in self.nodes])
        if anchor is not None and anchor_frame is not None:
            k = int(np.argmin(np.abs(self.nodes - anchor)))
            if self.nodes[k] == anchor:
                frames[k] = Y0
        Phi = self.Phi
        der = None
        if self.derivative is not None:
            dPhi = self.derivative

            def der(s):
                Y = Phi(s) @ C
                return dPhi(s) @ C @ matlib.inv_sqrt_spd(Y.T @ Y, tol) @ G

        info = dict(meta or {})
        info.setdefault("C", C.tolist())
        return SampledLagrangianPath(self.nodes, frames, evaluator=lambda s: frame(s, Phi(s)), derivative=der,
                                     evaluator_threadsafe=True, meta=info, tol=tol or matlib.DEFAULT_TOL)


def _sqrt_spd(G):
    w, V = np.linalg.eigh(0.5 * (G + G.T))
    return (V * np.sqrt(np.maximum(w, 0.0))) @ V.T


class HamiltonianFlow(PhiFamily):
    """Fundamental matrix of y' = J H(t) y with Phi(a) = I, integrated by RK4."""

    def __init__(self, spec: HamiltonianSpec, step: float = DEFAULT_STEP, tol: Tolerances | None = None):
        self.spec = spec
        self.step = float(step)
        self.tol = tol or matlib.DEFAULT_TOL
        n = spec.n
        J = canonical_j(n)
        self._J = J
        a, b = spec.interval
        cuts = sorted({a, b, *(float(c) for c in spec.breakpoints if a < c < b)})
        nodes = [a]
        for lo, hi in zip(cuts[:-1], cuts[1:]):
            k = max(1, math.ceil((hi - lo) / self.step - 1e-9))
            nodes.extend(lo + (hi - lo) * np.arange(1, k + 1) / k)
            nodes[-1] = hi
        nodes = np.array(nodes)
        Phi = np.eye(2 * n)
        values = [Phi]
        for t0, t1 in zip(nodes[:-1], nodes[1:]):
            Phi = _symplectic_correct(_rk4_step(self._rhs, t0, Phi, t1 - t0), J, self.tol)
            values.append(Phi)
        super().__init__(self._evaluate, (a, b), nodes, derivative=self._derivative,
                         meta={"hamiltonian": spec.to_dict(), "step": self.step},
                         node_values=np.array(values))

    def _rhs(self, s, Y):
        return self._J @ (np.asarray(self.spec.H_of_t(s), dtype=float) @ Y)

    def _evaluate(self, s: float) -> np.ndarray:
        s = float(s)
        i = int(np.searchsorted(self.nodes, s, side="right")) - 1
        i = min(max(i, 0), self.nodes.size - 1)
        t0 = float(self.nodes[i])
        Phi = self.node_values[i]
        if s == t0:
            return Phi
        k = max(1, math.ceil(abs(s - t0) / self.step))
        h = (s - t0) / k
        for j in range(k):
            Phi = _rk4_step(self._rhs, t0 + j * h, Phi, h)
        return _symplectic_correct(Phi, self._J, self.tol)

    def _derivative(self, s: float) -> np.ndarray:
        return self._rhs(s, self._evaluate(s))


def rotation_family(n: int, interval, nodes: int | None = None, speed: float = 1.0) -> PhiFamily:
    """Closed-form flow of H = speed * I: Phi(t) = [[cos, sin], [-sin, cos]](speed t)."""
    a, b = map(float, interval)
    m = nodes or max(2, int(math.ceil((b - a) / DEFAULT_STEP)) + 1)
    eye = np.eye(n)

    def Phi(s):
        c, si = math.cos(speed * s), math.sin(speed * s)
        return np.block([[c * eye, si * eye], [-si * eye, c * eye]])

    def dPhi(s):
        c, si = math.cos(speed * s), math.sin(speed * s)
        return speed * np.block([[-si * eye, c * eye], [-c * eye, -si * eye]])

    return PhiFamily(Phi, (a, b), np.linspace(a, b, m), derivative=dPhi,
                     meta={"kind": "rotation", "speed": speed})


def rotation_path(n: int = 1, speeds=None, interval=(0.0, 1.5 * math.pi), nodes: int | None = None,
                  tol: Tolerances | None = None) -> SampledLagrangianPath:
    """X = diag(sin(w_j t)), U = diag(cos(w_j t)) with an exact derivative."""
    w = np.ones(n) if speeds is None else np.asarray(speeds, dtype=float).reshape(-1)
    if w.size != n or not np.all(np.isfinite(w)):
        raise ValueError("need n finite speeds")
    a, b = map(float, interval)
    m = nodes or max(2, int(math.ceil((b - a) * max(1.0, float(np.max(np.abs(w)))) / 0.05)) + 1)

    def Y(s):
        return np.vstack([np.diag(np.sin(w * s)), np.diag(np.cos(w * s))])

    def dY(s):
        return np.vstack([np.diag(w * np.cos(w * s)), np.diag(-w * np.sin(w * s))])

    t = np.linspace(a, b, m)
    return SampledLagrangianPath(t, np.stack([Y(s) for s in t]), evaluator=Y, derivative=dY,
                                 evaluator_threadsafe=True,
                                 meta={"kind": "rotation", "speeds": [float(v) for v in w]},
                                 tol=tol or matlib.DEFAULT_TOL)


def integrate_conjoined_basis(spec: HamiltonianSpec, Y_init=None, step: float = DEFAULT_STEP,
                              tol: Tolerances | None = None) -> SampledLagrangianPath:
    """Conjoined basis Y(t) = Phi(t) Y_init of y' = J H(t) y."""
    flow = HamiltonianFlow(spec, step, tol)
    Y0 = vertical_plane(spec.n) if Y_init is None else np.asarray(Y_init, dtype=float)
    if not matlib.is_lagrangian_frame(Y0, tol):
        raise ValueError("initial frame is not Lagrangian")
    return flow.path(Y0, tol, meta={"hamiltonian": spec.to_dict()})


def principal_paths(family: PhiFamily, tol: Tolerances | None = None
                    ) -> tuple[SampledLagrangianPath, SampledLagrangianPath]:
    """(Y_a, Y_b) with Y_a(a) = E = Y_b(b)."""
    E = vertical_plane(family.n)
    Ca = matlib.symplectic_inverse(family.at(family.a)) @ E
    Cb = matlib.symplectic_inverse(family.at(family.b)) @ E
    return (family.path(Ca, tol, meta={"principal": "a"}, anchor=family.a, anchor_frame=E),
            family.path(Cb, tol, meta={"principal": "b"}, anchor=family.b, anchor_frame=E))


# -- prescribed oscillation numbers -----------------------------------------------------

def _ordered_projector_basis(R):
    """Orthogonal L with R = L diag(I_w, 0) L^T, eigenvalue-1 vectors first."""
    w, V = np.linalg.eigh(0.5 * (R + R.T))
    order = sorted(range(w.size), key=lambda k: (-round(float(w[k])), k))
    return V[:, order]


def _endpoint_constant(Yend, first: int, second: int, w: int, tol):
    """(I; D + R U X^+) with D = L diag(-I_first, I_second, 0) L^T."""
    n = Yend.shape[1]
    X, U = Yend[:n], Yend[n:]
    Xp = matlib.pseudoinverse(X, tol)
    R = X @ Xp
    L = _ordered_projector_basis(R)
    d = np.zeros(n)
    d[:first] = -1.0
    d[first:first + second] = 1.0
    if first + second > w:
        raise ConstructionFailed("diagonal pattern exceeds the rank of W(Y_a, Y_b)")
    D = (L * d) @ L.T
    B = D + R @ U @ Xp
    return np.vstack([np.eye(n), 0.5 * (B + B.T)])


def oscillation_rectangle(family: PhiFamily, tol: Tolerances | None = None) -> dict:
    """Bounds for (ell, r) over F(Phi) with the principal-path data."""
    from .oscnum import oscillation_pair, wronskian_rank

    Ya, Yb = principal_paths(family, tol)
    Na, Nsa = oscillation_pair(Ya, tol)
    Nb, Nsb = oscillation_pair(Yb, tol)
    w = wronskian_rank(Ya.frames[0], Yb.frames[0], tol)
    return {"Ya": Ya, "Yb": Yb, "N_a": Na, "Nstar_a": Nsa, "N_b": Nb, "Nstar_b": Nsb, "w": w,
            "ell": (Na, Nb), "r": (Nsb, Nsa)}


def prescribed_oscillation_path(family: PhiFamily, ell: int, r: int, tol: Tolerances | None = None,
                                rect: dict | None = None, anchor: str | None = None) -> SampledLagrangianPath:
    """Path Y in F(Phi) with N(Y) = ell and N*(Y) = r.

    The constant is fixed at ``anchor``: "a" gives X(a) = I and needs
    ell >= r, "b" gives X(b) = I and needs ell <= r.  By default "a" is
    used when ell >= r.  The result is verified before it is returned.
    """
    from .oscnum import oscillation_pair

    tol = tol or matlib.DEFAULT_TOL
    rect = rect or oscillation_rectangle(family, tol)
    lo_l, hi_l = rect["ell"]
    lo_r, hi_r = rect["r"]
    box = (lo_l, hi_l, lo_r, hi_r)
    if not (lo_l <= ell <= hi_l and lo_r <= r <= hi_r):
        raise OutOfRange(f"(ell, r) = ({ell}, {r}) outside [{lo_l}, {hi_l}] x [{lo_r}, {hi_r}]",
                         rectangle=box)
    p = ell - rect["N_a"]
    q = r - rect["Nstar_b"]
    w = rect["w"]
    E = vertical_plane(family.n)
    Phi_a, Phi_b = family.at(family.a), family.at(family.b)
    if anchor is None:
        anchor = "a" if ell >= r else "b"
    if anchor not in ("a", "b"):
        raise ValueError("anchor must be 'a' or 'b'")
    if (anchor == "a" and ell < r) or (anchor == "b" and ell > r):
        raise PreconditionViolated(f"anchor {anchor!r} is not available for (ell, r) = ({ell}, {r})")
    if anchor == "a":
        Yend = Phi_a @ matlib.symplectic_inverse(Phi_b) @ E
        Y0 = _endpoint_constant(Yend, q, w - p, w, tol)
        C = matlib.symplectic_inverse(Phi_a) @ Y0
    else:
        Yend = Phi_b @ matlib.symplectic_inverse(Phi_a) @ E
        Y0 = _endpoint_constant(Yend, w - q, p, w, tol)
        C = matlib.symplectic_inverse(Phi_b) @ Y0
    path = family.path(C, tol, meta={"prescribed": {"ell": int(ell), "r": int(r), "anchor": anchor},
                                     **family.meta}, anchor=family.a if anchor == "a" else family.b,
                       anchor_frame=Y0)
    got = oscillation_pair(path, tol)
    if got != (ell, r):
        raise ConstructionFailed(f"constructed path has (N, N*) = {got}, wanted {(ell, r)}")
    return path


# -- random instances -------------------------------------------------------------------

def random_orthogonal(n: int, rng) -> np.ndarray:
    Q, R = np.linalg.qr(rng.normal(size=(n, n)))
    return Q * np.sign(np.diag(R))


def random_symmetric(n: int, rng, scale: float = 1.0) -> np.ndarray:
    A = rng.normal(size=(n, n)) * scale
    return 0.5 * (A + A.T)


def random_invertible(n: int, rng) -> np.ndarray:
    """Well-conditioned random matrix: orthogonal times diag in [0.5, 2] times orthogonal."""
    return random_orthogonal(n, rng) @ np.diag(rng.uniform(0.5, 2.0, n)) @ random_orthogonal(n, rng)


def frame_from_angles(O, alpha) -> np.ndarray:
    """(O diag(sin a); O diag(cos a)); every Lagrangian plane has this form."""
    return np.vstack([O * np.sin(alpha), O * np.cos(alpha)])


def random_angles(n: int, rng, degenerate: float = 0.3) -> np.ndarray:
    a = rng.uniform(0.0, 2 * math.pi, n)
    mask = rng.random(n) < degenerate
    a[mask] = rng.choice([0.0, math.pi / 2, math.pi], size=int(mask.sum()))
    return a


def random_frame(n: int, rng, degenerate: float = 0.3, mix: bool = True) -> np.ndarray:
    """Random Lagrangian frame; a fraction of draws has singular X or U."""
    Y = frame_from_angles(random_orthogonal(n, rng), random_angles(n, rng, degenerate))
    return Y @ random_invertible(n, rng) if mix else Y


def random_frame_pair(n: int, rng, degenerate: float = 0.3) -> tuple[np.ndarray, np.ndarray]:
    """Two frames; sometimes sharing a basis or angles so W and M lose rank."""
    u = rng.random()
    O = random_orthogonal(n, rng)
    a = random_angles(n, rng, degenerate)
    if u < 0.3:
        b = a.copy()
        k = rng.integers(0, n + 1)
        b[k:] = random_angles(n - k, rng, degenerate)
        pair = frame_from_angles(O, a), frame_from_angles(O, rng.permutation(b) if rng.random() < 0.2 else b)
    elif u < 0.4:
        Y = frame_from_angles(O, a)
        pair = Y, Y
    else:
        pair = frame_from_angles(O, a), frame_from_angles(random_orthogonal(n, rng),
                                                          random_angles(n, rng, degenerate))
    return pair[0] @ random_invertible(n, rng), pair[1] @ random_invertible(n, rng)


def orthogonal_symplectic(Q) -> np.ndarray:
    A, B = Q.real, Q.imag
    return np.block([[A, -B], [B, A]])


def random_unitary(n: int, rng) -> np.ndarray:
    Z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def random_lower_triangular(n: int, rng) -> np.ndarray:
    """[[A, 0], [C, A^{-T}]] with A^T C symmetric."""
    A = random_invertible(n, rng)
    AinvT = np.linalg.inv(A).T
    C = AinvT @ random_symmetric(n, rng)
    return np.block([[A, np.zeros((n, n))], [C, AinvT]])


def random_symplectic(n: int, rng) -> np.ndarray:
    return orthogonal_symplectic(random_unitary(n, rng)) @ random_lower_triangular(n, rng)


def random_trig_spec(n: int, rng, interval=None, psd: bool = False, amplitude: float = 1.0,
                     legendre: bool = False) -> HamiltonianSpec:
    """H(t) = H0 + H1 cos(w t) + H2 sin(w t) with bounded random coefficients.

    ``psd=True`` makes H(t) positive semidefinite for every t.
    """
    m = 2 * n
    if interval is None:
        interval = (0.0, float(rng.uniform(1.5, 4.0)))
    H1 = random_symmetric(m, rng, 0.5 * amplitude)
    H2 = random_symmetric(m, rng, 0.5 * amplitude)
    if psd:
        G = rng.normal(size=(m, m)) * (amplitude / math.sqrt(m))
        shift = np.linalg.norm(H1, 2) + np.linalg.norm(H2, 2) + 0.05
        H0 = G.T @ G + shift * np.eye(m)
    else:
        H0 = random_symmetric(m, rng, amplitude)
    if legendre and not psd:
        # lower-right block positive definite
        B = rng.normal(size=(n, n))
        H0[n:, n:] = B @ B.T + (np.linalg.norm(H1, 2) + np.linalg.norm(H2, 2) + 0.1) * np.eye(n)
    return HamiltonianSpec.trig(H0, H1, H2, float(rng.uniform(0.5, 3.0)), interval)


def _scaled_trig(spec: HamiltonianSpec, c: float) -> HamiltonianSpec:
    p = spec.params
    return HamiltonianSpec.trig(*(c * np.asarray(p[k]) for k in ("H0", "H1", "H2")), p["omega"], spec.interval)


def random_flow(n: int, rng, psd: bool = False, step: float = RANDOM_STEP, norm_cap: float = PHI_NORM_CAP,
                **kw) -> HamiltonianFlow:
    """Flow of a random trigonometric H, shrunk until |Phi(t)| <= norm_cap on the grid."""
    spec = random_trig_spec(n, rng, psd=psd, **kw)
    flow = HamiltonianFlow(spec, step)
    while max(np.linalg.norm(P, 2) for P in flow.node_values) > norm_cap:
        spec = _scaled_trig(spec, 0.7)
        flow = HamiltonianFlow(spec, step)
    return flow


def random_hamiltonian_path(n: int, rng, psd: bool = False, step: float = RANDOM_STEP,
                            **kw) -> SampledLagrangianPath:
    flow = random_flow(n, rng, psd=psd, step=step, **kw)
    return flow.path(random_frame(n, rng), meta={"hamiltonian": flow.spec.to_dict()})
