"""Pure states in polar form on rectangular grids.

A state is an amplitude field ``omega >= 0`` plus a phase field (action
units).  Real wavefunctions with sign changes are stored with a phase that
jumps by pi*hbar across nodes and flagged ``real_wavefunction``; their
classical momentum statistics are exactly zero by convention, and all
derivative quadratures go through the signed wavefunction so that node
kinks in ``|psi|`` never meet a finite-difference stencil.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from . import numerics, specfun
from .errors import (
    BoxTooSmall,
    GridMismatch,
    InvalidOrder,
    NotNormalized,
    NotPositiveDefinite,
    UnwrapFailure,
)
from .numerics import Grid, ScalarField

NORMALIZATION_TOL = 1e-6
BOUNDARY_TOL = 1e-6
PHASE_NODE_THRESHOLD = 1e-10
DERIVATIVE_ORDER = 6


@dataclass(frozen=True)
class PolarState:
    grid: Grid
    omega: np.ndarray
    phase: np.ndarray
    hbar: float = 1.0
    real_wavefunction: bool = False

    def __post_init__(self):
        om = np.asarray(self.omega, dtype=float)
        ph = np.asarray(self.phase, dtype=float)
        if om.shape != self.grid.shape or ph.shape != self.grid.shape:
            raise GridMismatch("omega/phase shape does not match the grid")
        if self.hbar <= 0:
            raise ValueError("hbar must be positive")
        if np.any(om < 0):
            raise ValueError("amplitude must be nonnegative")
        norm = numerics.integrate_values(self.grid, om * om)
        if abs(norm - 1.0) > NORMALIZATION_TOL:
            raise NotNormalized(f"integral of omega^2 is {norm}")
        if _boundary_max(om) > BOUNDARY_TOL * om.max():
            raise BoxTooSmall("amplitude not negligible at the grid boundary")
        object.__setattr__(self, "omega", om)
        object.__setattr__(self, "phase", ph)

    @property
    def density(self) -> np.ndarray:
        return self.omega * self.omega

    def wavefunction(self) -> np.ndarray:
        return self.omega * np.exp(1j * self.phase / self.hbar)

    def signed_amplitude(self) -> np.ndarray:
        """Omega with the node sign restored; equals the wavefunction when real."""
        if self.real_wavefunction:
            return self.omega * np.cos(self.phase / self.hbar)
        return self.omega

    def omega_gradient(self) -> list[np.ndarray]:
        """Per-axis derivative of the amplitude, safe across sign nodes.

        For real wavefunctions the signed amplitude is differenced; its
        gradient squares to the same integrands as the kinked |psi|.
        """
        return numerics.gradient_values(
            self.grid, self.signed_amplitude(), order=DERIVATIVE_ORDER
        )

    def phase_gradient(self) -> list[np.ndarray]:
        if self.real_wavefunction:
            return [np.zeros(self.grid.shape) for _ in range(self.grid.dim)]
        return numerics.gradient_values(self.grid, self.phase, order=DERIVATIVE_ORDER)


def _boundary_max(values: np.ndarray) -> float:
    out = 0.0
    for axis in range(values.ndim):
        v = np.moveaxis(values, axis, 0)
        out = max(out, float(np.abs(v[0]).max()), float(np.abs(v[-1]).max()))
    return out


# --- measure statistics -----------------------------------------------------

def weighted_mean(state: PolarState, values: np.ndarray) -> float:
    return numerics.integrate_values(state.grid, state.density * values)


def weighted_cov(state: PolarState, f: np.ndarray, g: np.ndarray) -> float:
    # mean-subtracted form avoids cancellation for near-constant inputs
    df = f - weighted_mean(state, f)
    dg = g - weighted_mean(state, g)
    return weighted_mean(state, df * dg)


def position_mean(state: PolarState) -> np.ndarray:
    return np.array([weighted_mean(state, x) for x in state.grid.mesh])


def position_cov(state: PolarState) -> np.ndarray:
    mesh = state.grid.mesh
    n = state.grid.dim
    v = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            v[i, j] = v[j, i] = weighted_cov(state, mesh[i], mesh[j])
    return v


# --- constructors -----------------------------------------------------------

def polar_decompose(re: ScalarField, im: ScalarField, hbar: float = 1.0) -> PolarState:
    """Split a complex wavefunction into amplitude and unwrapped phase."""
    grid = numerics.same_grid(re, im)
    norm = numerics.integrate_values(grid, re.values**2 + im.values**2)
    if abs(norm - 1.0) > NORMALIZATION_TOL:
        raise NotNormalized(f"integral of |psi|^2 is {norm}")
    omega = np.hypot(re.values, im.values)
    theta = np.arctan2(im.values, re.values)
    high = omega > PHASE_NODE_THRESHOLD * omega.max()
    theta = _unwrap_from_peak(theta, omega)
    _check_unwrap(theta, omega)
    theta = np.where(high, theta, 0.0)
    imag_mass = numerics.integrate_values(grid, im.values**2)
    real_valued = imag_mass < 1e-14
    return PolarState(grid, omega, hbar * theta, hbar, real_wavefunction=real_valued)


def _unwrap_from_peak(theta: np.ndarray, omega: np.ndarray) -> np.ndarray:
    """Axis-by-axis unwrap anchored at the maximum-amplitude node."""
    peak = np.unravel_index(int(np.argmax(omega)), omega.shape)
    out = theta.copy()
    for axis, anchor in enumerate(peak):
        ref = out[(slice(None),) * axis + (anchor,)]
        out = np.unwrap(out, axis=axis)
        shift = ref - out[(slice(None),) * axis + (anchor,)]
        out = out + np.expand_dims(shift, axis=axis)
    return out


def _check_unwrap(theta: np.ndarray, omega: np.ndarray):
    high = omega > 0.1 * omega.max()
    for axis in range(theta.ndim):
        t = np.moveaxis(theta, axis, 0)
        m = np.moveaxis(high, axis, 0)
        jump = np.abs(np.diff(t, axis=0))
        adjacent = m[:-1] & m[1:]
        if np.any(adjacent & (jump > 1.9 * math.pi)):
            raise UnwrapFailure("2-pi jump next to a high-amplitude cell")


def ho_eigenstate(n: int, dq0: float, grid: Grid, hbar: float = 1.0) -> PolarState:
    """Harmonic-oscillator eigenstate with ground-state variance dq0^2."""
    if grid.dim != 1:
        raise GridMismatch("harmonic-oscillator states are one dimensional")
    if dq0 <= 0:
        raise ValueError("dq0 must be positive")
    ax = grid.axes[0]
    needed = (8.0 + 2.0 * math.sqrt(n)) * dq0
    if ax.hi < needed or ax.lo > -needed:
        raise BoxTooSmall(f"box must reach +-{needed} for n={n}")
    q = grid.mesh[0]
    u = q / (math.sqrt(2.0) * dq0)
    log_norm = -0.25 * math.log(2.0 * math.pi * dq0 * dq0) - 0.5 * (
        n * math.log(2.0) + specfun.ln_gamma(n + 1.0)
    )
    psi = math.exp(log_norm) * np.exp(-(q * q) / (4.0 * dq0 * dq0)) * specfun.hermite(n, u)
    return _from_real_wavefunction(grid, psi, hbar)


def ho_recommended_grid(n: int, dq0: float, count: int = 513) -> Grid:
    half = (8.0 + 2.0 * math.sqrt(n)) * dq0
    return Grid.line(-half, half, count)


def poschl_teller_state(lam: int, mu: int, grid: Grid, hbar: float = 1.0) -> PolarState:
    """Sech-well eigenstate built from associated Legendre of tanh(q)."""
    if not 1 <= mu <= lam:
        raise InvalidOrder("need 1 <= mu <= lam")
    if grid.dim != 1:
        raise GridMismatch("sech-well states are one dimensional")
    ax = grid.axes[0]
    if ax.lo > -25.0 or ax.hi < 25.0:
        raise BoxTooSmall("sech-well grid must span at least [-25, 25]")
    q = grid.mesh[0]
    if lam == mu:
        # log-space closed form: psi^2 = Gamma(mu+1/2)/(sqrt(pi) Gamma(mu)) sech^{2mu}
        log_sech = -np.logaddexp(q, -q) + math.log(2.0)
        log_norm = 0.5 * (
            specfun.ln_gamma(mu + 0.5)
            - 0.5 * math.log(math.pi)
            - specfun.ln_gamma(float(mu))
        )
        psi = ((-1.0) ** mu) * np.exp(log_norm + mu * log_sech)
    else:
        log_norm = 0.5 * (
            math.log(mu)
            + specfun.ln_gamma(lam - mu + 1.0)
            - specfun.ln_gamma(lam + mu + 1.0)
        )
        psi = math.exp(log_norm) * specfun.assoc_legendre(lam, mu, np.tanh(q))
    norm = numerics.integrate_values(grid, psi * psi)
    if abs(norm - 1.0) > 1e-8:
        raise NotNormalized(f"sech-well quadrature norm is {norm}")
    return _from_real_wavefunction(grid, psi, hbar)


def pt_recommended_grid(count: int = 2049, half: float = 25.0) -> Grid:
    return Grid.line(-half, half, count)


def gaussian_polar(
    v: np.ndarray, eta_q: np.ndarray, grid: Grid, hbar: float = 1.0
) -> PolarState:
    """Zero-phase Gaussian amplitude with position covariance ``v``."""
    v = np.atleast_2d(np.asarray(v, dtype=float))
    eta_q = np.atleast_1d(np.asarray(eta_q, dtype=float))
    n = grid.dim
    if v.shape != (n, n) or eta_q.shape != (n,):
        raise GridMismatch("covariance/mean size does not match the grid dim")
    numerics.require_spd(v)
    sig = np.sqrt(np.diag(v))
    for i, ax in enumerate(grid.axes):
        if ax.hi < eta_q[i] + 8.0 * sig[i] or ax.lo > eta_q[i] - 8.0 * sig[i]:
            raise BoxTooSmall(f"axis {i} must reach +-8 sigma around the mean")
    vinv = np.linalg.inv(v)
    dq = [x - eta_q[i] for i, x in enumerate(grid.mesh)]
    quad = np.zeros(grid.shape)
    for i in range(n):
        for j in range(n):
            quad += dq[i] * vinv[i, j] * dq[j]
    sign, logdet = np.linalg.slogdet(v)
    if sign <= 0:
        raise NotPositiveDefinite("covariance determinant not positive")
    log_norm = -0.25 * (n * math.log(2.0 * math.pi) + logdet)
    omega = np.exp(log_norm - 0.25 * quad)
    return PolarState(grid, omega, np.zeros(grid.shape), hbar, real_wavefunction=True)


def gaussian_recommended_grid(
    v: np.ndarray, eta_q: np.ndarray, counts
) -> Grid:
    v = np.atleast_2d(np.asarray(v, dtype=float))
    eta_q = np.atleast_1d(np.asarray(eta_q, dtype=float))
    sig = np.sqrt(np.diag(v))
    if np.isscalar(counts):
        counts = [counts] * len(sig)
    return Grid.box(
        (eta_q[i] - 8.0 * sig[i], eta_q[i] + 8.0 * sig[i], counts[i])
        for i in range(len(sig))
    )


def with_phase(state: PolarState, phase: np.ndarray) -> PolarState:
    """Attach a (smooth) phase field to an existing amplitude."""
    return PolarState(state.grid, state.omega, np.asarray(phase, dtype=float), state.hbar)


def _from_real_wavefunction(grid: Grid, psi: np.ndarray, hbar: float) -> PolarState:
    phase = np.where(psi < 0.0, math.pi * hbar, 0.0)
    return PolarState(grid, np.abs(psi), phase, hbar, real_wavefunction=True)


# --- CSV import/export ------------------------------------------------------

def save_state_csv(state: PolarState, path):
    """Write the complex wavefunction with grid metadata in comment rows."""
    psi = state.wavefunction()
    with open(path, "w", newline="") as fh:
        fh.write(f"# hbar={state.hbar!r}\n")
        for i, ax in enumerate(state.grid.axes):
            fh.write(f"# axis{i}={ax.lo!r},{ax.hi!r},{ax.count}\n")
        writer = csv.writer(fh)
        writer.writerow([f"q{i+1}" for i in range(state.grid.dim)] + ["re", "im"])
        mesh = [m.ravel() for m in state.grid.mesh]
        for idx in range(state.grid.size):
            row = [repr(float(m[idx])) for m in mesh]
            row += [repr(float(psi.real.ravel()[idx])), repr(float(psi.imag.ravel()[idx]))]
            writer.writerow(row)


def load_state_csv(path) -> PolarState:
    hbar = None
    axes = []
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line.lstrip("# ").partition("=")
                if key == "hbar":
                    hbar = float(val)
                elif key.startswith("axis"):
                    lo, hi, count = val.split(",")
                    axes.append((float(lo), float(hi), int(count)))
                continue
            rows.append(line)
    if hbar is None or not axes:
        raise ValueError("state CSV must carry hbar and axis metadata headers")
    grid = Grid.box(axes)
    header = rows[0].split(",")
    expected = [f"q{i+1}" for i in range(grid.dim)] + ["re", "im"]
    if header != expected:
        raise ValueError(f"state CSV columns must be exactly {expected}")
    data = np.array([[float(c) for c in r.split(",")] for r in rows[1:]])
    if data.shape[0] != grid.size:
        raise ValueError("state CSV row count does not match the grid")
    re = ScalarField(grid, data[:, grid.dim].reshape(grid.shape))
    im = ScalarField(grid, data[:, grid.dim + 1].reshape(grid.shape))
    return polar_decompose(re, im, hbar=hbar)
