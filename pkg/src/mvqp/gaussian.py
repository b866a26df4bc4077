"""Grid-free symplectic machinery for pure Gaussian states.

A Gaussian pure state is encoded by the symplectic matrix that maps the
vacuum-like reference state onto it, plus the phase-space mean.  All
covariances, the quantum potential, and quadratic-Hamiltonian evolution
come out in closed form; the grid modules only enter through
:func:`to_polar` for cross-checks.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from . import numerics, states
from .errors import ExpDivergence, SingularBlock
from .numerics import Grid

BLOCK_TOL = 1e-10
MAX_EXP_NORM = 500.0


def _as_matrix(x, n) -> np.ndarray:
    a = np.asarray(x, dtype=float)
    if a.ndim == 0:
        a = a * np.eye(n)
    return a


@dataclass(frozen=True)
class QuadraticHamiltonian:
    """Quadratic Hamiltonian p.Mp/2 + q.Cp + q.Lq/2 + xi_p.p + xi_q.q + H0."""

    m: np.ndarray
    c: np.ndarray | None = None
    l: np.ndarray | None = None
    xi_p: np.ndarray | None = None
    xi_q: np.ndarray | None = None
    h0: float = 0.0

    def __post_init__(self):
        m = np.atleast_2d(np.asarray(self.m, dtype=float))
        n = m.shape[0]
        numerics.require_spd(m)
        c = np.zeros((n, n)) if self.c is None else _as_matrix(self.c, n)
        l = np.zeros((n, n)) if self.l is None else numerics.require_symmetric(_as_matrix(self.l, n))
        xi_p = np.zeros(n) if self.xi_p is None else np.atleast_1d(np.asarray(self.xi_p, dtype=float))
        xi_q = np.zeros(n) if self.xi_q is None else np.atleast_1d(np.asarray(self.xi_q, dtype=float))
        object.__setattr__(self, "m", m)
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "l", l)
        object.__setattr__(self, "xi_p", xi_p)
        object.__setattr__(self, "xi_q", xi_q)

    @property
    def dim(self) -> int:
        return self.m.shape[0]

    def block_matrix(self) -> np.ndarray:
        """The 2n x 2n generator block [[L, C], [C^T, M]]."""
        return np.block([[self.l, self.c], [self.c.T, self.m]])

    def xi(self) -> np.ndarray:
        return np.concatenate([self.xi_q, self.xi_p])


def j_matrix(n: int) -> np.ndarray:
    z = np.zeros((n, n))
    i = np.eye(n)
    return np.block([[z, i], [-i, z]])


@dataclass(frozen=True)
class SymplecticMatrix:
    a: np.ndarray
    b: np.ndarray
    c: np.ndarray
    d: np.ndarray

    def __post_init__(self):
        blocks = []
        for name in "abcd":
            blk = np.atleast_2d(np.asarray(getattr(self, name), dtype=float))
            blocks.append(blk)
        n = blocks[0].shape[0]
        for name, blk in zip("abcd", blocks):
            if blk.shape != (n, n):
                raise ValueError(f"block {name} must be {n}x{n}")
            object.__setattr__(self, name, blk)
        err = self.constraint_residual()
        if err > BLOCK_TOL:
            raise ValueError(f"symplectic block constraints violated by {err}")

    @classmethod
    def from_matrix(cls, s: np.ndarray) -> "SymplecticMatrix":
        s = np.asarray(s, dtype=float)
        n = s.shape[0] // 2
        return cls(s[:n, :n], s[:n, n:], s[n:, :n], s[n:, n:])

    @classmethod
    def identity(cls, n: int) -> "SymplecticMatrix":
        z = np.zeros((n, n))
        i = np.eye(n)
        return cls(i, z, z, i)

    @property
    def dim(self) -> int:
        return self.a.shape[0]

    def matrix(self) -> np.ndarray:
        return np.block([[self.a, self.b], [self.c, self.d]])

    def constraint_residual(self) -> float:
        a, b, c, d = self.a, self.b, self.c, self.d
        i = np.eye(self.dim)
        residuals = [
            a @ d.T - b @ c.T - i,
            a.T @ d - c.T @ b - i,
            a.T @ c - c.T @ a,
            a @ b.T - b @ a.T,
            c @ d.T - d @ c.T,
            b.T @ d - d.T @ b,
        ]
        s = self.matrix()
        j = j_matrix(self.dim)
        residuals.append(s.T @ j @ s - j)
        return max(float(np.abs(r).max()) for r in residuals)

    def __matmul__(self, other: "SymplecticMatrix") -> "SymplecticMatrix":
        return SymplecticMatrix.from_matrix(self.matrix() @ other.matrix())


def _resymplectify(s: np.ndarray) -> np.ndarray:
    """One Newton step back onto S^T J S = J; roundoff cleanup only."""
    n = s.shape[0] // 2
    j = j_matrix(n)
    e = s.T @ j @ s - j
    if np.abs(e).max() <= 1e-10:
        return s
    return s @ (np.eye(2 * n) + 0.5 * (j @ e))


def symplectic_propagator(h: QuadraticHamiltonian, t: float) -> SymplecticMatrix:
    """exp(J H t) for the quadratic generator ``h``."""
    n = h.dim
    arg = j_matrix(n) @ h.block_matrix() * t
    norm = float(np.abs(arg).max())
    if norm > MAX_EXP_NORM:
        raise ExpDivergence(f"generator norm {norm} too large for exponentiation")
    s = expm(arg)
    s = _resymplectify(s)
    return SymplecticMatrix.from_matrix(s)


@dataclass(frozen=True)
class GaussianPureState:
    s: SymplecticMatrix
    eta_q: np.ndarray
    eta_p: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        n = self.s.dim
        eta_q = np.atleast_1d(np.asarray(self.eta_q, dtype=float))
        eta_p = np.atleast_1d(np.asarray(self.eta_p, dtype=float))
        if eta_q.shape != (n,) or eta_p.shape != (n,):
            raise ValueError(f"means must be length-{n} vectors")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        numerics.require_spd(sigma_matrix(self.s).real)
        object.__setattr__(self, "eta_q", eta_q)
        object.__setattr__(self, "eta_p", eta_p)

    @classmethod
    def coherent(cls, n: int, eta_q=None, eta_p=None, hbar: float = 1.0):
        return cls(
            SymplecticMatrix.identity(n),
            np.zeros(n) if eta_q is None else eta_q,
            np.zeros(n) if eta_p is None else eta_p,
            hbar,
        )

    @property
    def dim(self) -> int:
        return self.s.dim


def sigma_matrix(s: SymplecticMatrix) -> np.ndarray:
    """Complex width matrix [I - i(ca^T + db^T)] (aa^T + bb^T)^-1."""
    a, b, c, d = s.a, s.b, s.c, s.d
    gram = a @ a.T + b @ b.T
    try:
        inv = np.linalg.inv(gram)
    except np.linalg.LinAlgError as exc:
        raise SingularBlock("aa^T + bb^T numerically singular") from exc
    return (np.eye(s.dim) - 1j * (c @ a.T + d @ b.T)) @ inv


def position_cov(g: GaussianPureState) -> np.ndarray:
    """(hbar/2)(aa^T + bb^T)."""
    a, b = g.s.a, g.s.b
    v = 0.5 * g.hbar * (a @ a.T + b @ b.T)
    return 0.5 * (v + v.T)


def momentum_cov(g: GaussianPureState) -> np.ndarray:
    c, d = g.s.c, g.s.d
    vt = 0.5 * g.hbar * (c @ c.T + d @ d.T)
    return 0.5 * (vt + vt.T)


def position_momentum_cov(g: GaussianPureState) -> np.ndarray:
    a, b, c, d = g.s.a, g.s.b, g.s.c, g.s.d
    return 0.5 * g.hbar * (a @ c.T + b @ d.T)


def nonclassical_cov(g: GaussianPureState) -> np.ndarray:
    """(hbar^2/4) V^-1 — the exact Gaussian relation."""
    v = position_cov(g)
    vnc = 0.25 * g.hbar**2 * np.linalg.inv(v)
    return 0.5 * (vnc + vnc.T)


def evolve(g: GaussianPureState, h: QuadraticHamiltonian, t: float) -> GaussianPureState:
    """Propagate under the quadratic Hamiltonian for time ``t``."""
    st = symplectic_propagator(h, t)
    mean = st.matrix() @ np.concatenate([g.eta_q, g.eta_p])
    xi = h.xi()
    if np.any(xi != 0.0) and t != 0.0:
        mean = mean + _mean_shift(h, t, xi)
    n = g.dim
    return GaussianPureState(st @ g.s, mean[:n], mean[n:], g.hbar)


def _mean_shift(h: QuadraticHamiltonian, t: float, xi: np.ndarray) -> np.ndarray:
    """int_0^t S_t' J xi dt' by composite Simpson with step refinement."""
    j = j_matrix(h.dim)
    jxi = j @ xi

    def value(count: int) -> np.ndarray:
        ts = np.linspace(0.0, t, count)
        ys = np.array([symplectic_propagator(h, tp).matrix() @ jxi for tp in ts])
        w = np.full(count, 2.0)
        w[1::2] = 4.0
        w[0] = w[-1] = 1.0
        return (ts[1] - ts[0]) / 3.0 * np.tensordot(w, ys, axes=1)

    count = 33
    prev = value(count)
    for _ in range(6):
        count = 2 * (count - 1) + 1
        cur = value(count)
        if np.abs(cur - prev).max() <= 1e-11 * max(np.abs(cur).max(), 1.0):
            return cur
        prev = cur
    return prev


def gaussian_qp(g: GaussianPureState, m: np.ndarray, q) -> float:
    """Pointwise quantum potential of the Gaussian state at position q."""
    m = numerics.require_spd(_as_matrix(m, g.dim))
    v = position_cov(g)
    vinv = np.linalg.inv(v)
    dq = np.atleast_1d(np.asarray(q, dtype=float)) - g.eta_q
    h2 = g.hbar**2
    return float(
        h2 / 4.0 * np.trace(vinv @ m) - h2 / 8.0 * dq @ (vinv @ m @ vinv) @ dq
    )


def gaussian_mvqp(g: GaussianPureState, m: np.ndarray) -> float:
    """(hbar^2/8) Tr(V^-1 M)."""
    m = numerics.require_spd(_as_matrix(m, g.dim))
    v = position_cov(g)
    return float(g.hbar**2 / 8.0 * np.trace(np.linalg.solve(v, m)))


def to_polar(g: GaussianPureState, grid: Grid) -> states.PolarState:
    """Sample amplitude and phase on a grid, global phase included."""
    sigma = sigma_matrix(g.s)
    v = position_cov(g)
    omega_state = states.gaussian_polar(v, g.eta_q, grid, hbar=g.hbar)
    im_sigma = sigma.imag
    dq = [x - g.eta_q[i] for i, x in enumerate(grid.mesh)]
    phase = np.zeros(grid.shape)
    for i in range(g.dim):
        for j in range(g.dim):
            # exponent -(1/2 hbar) dq.(Re + i Im)Sigma dq carries phase
            # -(1/2) dq.Im(Sigma) dq in action units
            phase -= 0.5 * dq[i] * im_sigma[i, j] * dq[j]
        phase += g.eta_p[i] * grid.mesh[i]
    phase -= 0.5 * float(g.eta_q @ g.eta_p)
    det = np.linalg.det(g.s.a + 1j * g.s.b)
    phase -= 0.5 * g.hbar * math.atan2(det.imag, det.real)
    if np.abs(im_sigma).max() < 1e-14 and np.abs(g.eta_p).max() == 0.0:
        # purely real wavefunction up to a global constant
        return states.PolarState(
            grid, omega_state.omega, phase, g.hbar, real_wavefunction=True
        )
    return states.PolarState(grid, omega_state.omega, phase, g.hbar)
