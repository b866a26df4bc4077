"""Mixed states: convex mixtures, density grids, and their quantum potential.

A mixture is a set of pure grid states with convex weights.  For one
degree of freedom the position-representation density matrix is held as a
dense complex matrix, on which the mean quantum potential is evaluated by
differencing its amplitude along the first index before reading the
diagonal — the derivative does not commute with the diagonal restriction,
and the half-factor identity between the two orderings is exposed for
testing.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from . import numerics, qpotential, states
from .errors import (
    DimensionUnsupported,
    GridMismatch,
    MaskDominated,
    TruncationInsufficient,
    WrongDimension,
)
from .numerics import Grid
from .states import PolarState

WEIGHT_TOL = 1e-10
TRUNCATION_TOL = 1e-8
MASK_THRESHOLD = 1e-8
MASK_MASS_LIMIT = 0.05
DERIVATIVE_ORDER = 6


@dataclass(frozen=True)
class MixedState:
    weights: np.ndarray
    components: tuple[PolarState, ...]
    hbar: float = 1.0

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        comps = tuple(self.components)
        if len(w) != len(comps) or len(comps) == 0:
            raise ValueError("need one weight per component")
        if np.any(w < 0.0):
            raise ValueError("weights must be nonnegative")
        if abs(float(w.sum()) - 1.0) > WEIGHT_TOL:
            raise ValueError(f"weights sum to {w.sum()}, not 1")
        grid = comps[0].grid
        for c in comps[1:]:
            if c.grid != grid:
                raise GridMismatch("mixture components live on different grids")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "components", comps)

    @property
    def grid(self) -> Grid:
        return self.components[0].grid

    @property
    def size(self) -> int:
        return len(self.components)

    def diagonal_density(self) -> np.ndarray:
        """Position density sum_k w_k Omega_k^2."""
        out = np.zeros(self.grid.shape)
        for w, c in zip(self.weights, self.components):
            out += w * c.density
        return out


@dataclass(frozen=True)
class DensityGrid:
    grid: Grid
    values: np.ndarray
    hbar: float = 1.0

    def __post_init__(self):
        if self.grid.dim != 1:
            raise DimensionUnsupported("density grids support one degree of freedom")
        vals = np.asarray(self.values, dtype=complex)
        n = self.grid.shape[0]
        if vals.shape != (n, n):
            raise GridMismatch(f"density must be {n}x{n}")
        scale = max(float(np.abs(vals).max()), 1e-300)
        if np.abs(vals - vals.conj().T).max() > 1e-10 * scale:
            raise ValueError("density matrix is not Hermitian")
        diag = np.diagonal(vals)
        if np.abs(diag.imag).max() > 1e-10 * scale or np.any(diag.real < -1e-12 * scale):
            raise ValueError("density diagonal must be real nonnegative")
        tr = numerics.integrate_values(self.grid, diag.real)
        if abs(tr - 1.0) > 1e-6:
            raise ValueError(f"density diagonal integrates to {tr}, not 1")
        object.__setattr__(self, "values", vals)

    def amplitude(self) -> np.ndarray:
        """The polar amplitude |rho(q, q')|."""
        return np.abs(self.values)


def assemble_density(ms: MixedState) -> DensityGrid:
    """rho(q, q') = sum_k w_k psi_k(q) psi_k(q')* (one degree of freedom)."""
    if ms.grid.dim != 1:
        raise DimensionUnsupported("density grids support one degree of freedom")
    n = ms.grid.shape[0]
    rho = np.zeros((n, n), dtype=complex)
    for w, c in zip(ms.weights, ms.components):
        psi = c.wavefunction()
        if c.real_wavefunction:
            psi = c.signed_amplitude().astype(complex)
        rho += w * np.outer(psi, psi.conj())
    return DensityGrid(ms.grid, rho, ms.hbar)


def _diag_after_derivative(d: DensityGrid, order: int = 2) -> np.ndarray:
    """Derivative of |rho| along the first index, then the diagonal."""
    om = d.amplitude()
    h = d.grid.axes[0].spacing
    der = numerics._diff_axis(om, h, 0, DERIVATIVE_ORDER)
    for _ in range(order - 1):
        der = numerics._diff_axis(der, h, 0, DERIVATIVE_ORDER)
    return np.diagonal(der).copy()


KINK_NEIGHBOR_RATIO = 0.5
STENCIL_REACH = DERIVATIVE_ORDER + 1


def _diagonal_mask(d: DensityGrid) -> np.ndarray:
    amp = d.amplitude()
    diag = np.diagonal(amp)
    mask = diag >= MASK_THRESHOLD * amp.max()
    # |rho| is non-smooth along its zero curves; a crossing shows up as a
    # deep local minimum of the amplitude along the differencing axis and
    # contaminates every stencil that straddles it, so diagonal cells
    # within stencil reach of such a minimum in their own column are
    # excluded from the quadrature
    kink = np.zeros(amp.shape, dtype=bool)
    kink[1:-1] = (
        (amp[1:-1] < amp[:-2])
        & (amp[1:-1] < amp[2:])
        & (amp[1:-1] < KINK_NEIGHBOR_RATIO * np.maximum(amp[:-2], amp[2:]))
    )
    n = amp.shape[0]
    idx = np.arange(n)
    for off in range(-STENCIL_REACH, STENCIL_REACH + 1):
        rows = np.clip(idx + off, 0, n - 1)
        mask &= ~kink[rows, idx]
    masked_mass = numerics.integrate_values(
        d.grid, np.where(mask, 0.0, np.diagonal(d.values).real)
    )
    if masked_mass > MASK_MASS_LIMIT:
        raise MaskDominated(
            f"{masked_mass} of the density diagonal is amplitude-masked"
        )
    return mask


def _fill_masked_runs(grid: Grid, values: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Bridge interior masked runs of a 1-D integrand by local polynomial fit.

    The diagonal integrand is analytic across amplitude-zero crossings even
    though its finite-difference samples there are not usable, so interior
    masked runs flanked by good cells on both sides are filled from a fit
    to the nearest flanking samples; edge (tail) runs stay zeroed.
    """
    out = np.where(mask, values, 0.0)
    q = grid.mesh[0]
    n = values.size
    i = 0
    while i < n:
        if mask[i]:
            i += 1
            continue
        j = i
        while j < n and not mask[j]:
            j += 1
        if i > 0 and j < n:
            left = np.arange(max(0, i - 10), i)
            right = np.arange(j, min(n, j + 10))
            idxs = np.concatenate([left, right])
            idxs = idxs[mask[idxs]]
            if idxs.size >= 4:
                center = 0.5 * (q[i] + q[j - 1])
                scale = max(q[idxs].max() - q[idxs].min(), grid.axes[0].spacing)
                coef = np.polynomial.polynomial.polyfit(
                    (q[idxs] - center) / scale, values[idxs], min(9, idxs.size - 1)
                )
                out[i:j] = np.polynomial.polynomial.polyval(
                    (q[i:j] - center) / scale, coef
                )
        i = j
    return out


def mixed_mvqp(d: DensityGrid, m: float) -> float:
    """Mean quantum potential of a density grid, diagonal-after-derivative.

    The amplitude in the denominator of the pointwise quantum potential
    cancels against the diagonal measure, leaving
    -(hbar^2 m_kin / 2) * integral of d^2|rho|/dq^2 restricted to q' = q.
    """
    if m <= 0.0:
        raise ValueError("kinetic coefficient must be positive")
    mask = _diagonal_mask(d)
    integrand = _fill_masked_runs(d.grid, _diag_after_derivative(d, order=2), mask)
    return -0.5 * d.hbar**2 * m * numerics.integrate_values(d.grid, integrand)


def density_vnc(d: DensityGrid) -> np.ndarray:
    """Nonclassical covariance of a 1-DF density grid (diagonal-derivative form)."""
    mask = _diagonal_mask(d)
    integrand = _fill_masked_runs(d.grid, _diag_after_derivative(d, order=2), mask)
    return np.array([[-d.hbar**2 * numerics.integrate_values(d.grid, integrand)]])


def diagonal_derivative_identity(d: DensityGrid) -> tuple[np.ndarray, np.ndarray]:
    """Both orderings of derivative and diagonal restriction of the amplitude.

    Returns (derivative-then-diagonal, half the derivative of the diagonal
    function); for a valid density these agree pointwise.
    """
    lhs = _diag_after_derivative(d, order=1)
    diag_fn = np.diagonal(d.amplitude()).copy()
    rhs = 0.5 * numerics._diff_axis(diag_fn, d.grid.axes[0].spacing, 0, DERIVATIVE_ORDER)
    return lhs, rhs


def mean_phase_gradient(ms: MixedState) -> list[np.ndarray]:
    """Diagonal phase gradient sum_k w_k Omega_k^2 grad(S_k) / rho(q, q)."""
    diag = ms.diagonal_density()
    n = ms.grid.dim
    acc = [np.zeros(ms.grid.shape) for _ in range(n)]
    for w, c in zip(ms.weights, ms.components):
        sg = c.phase_gradient()
        for i in range(n):
            acc[i] += w * c.density * sg[i]
    mask = diag >= MASK_THRESHOLD * diag.max()
    out = []
    for a in acc:
        g = np.zeros(ms.grid.shape)
        np.divide(a, diag, out=g, where=mask)
        out.append(g)
    return out


def delta_vnc(ms: MixedState) -> np.ndarray:
    """Mixture-induced positive-semidefinite correction to Vnc.

    The weighted covariance of the per-component phase gradients around
    the density-weighted mean phase gradient.
    """
    n = ms.grid.dim
    sbar = mean_phase_gradient(ms)
    out = np.zeros((n, n))
    for w, c in zip(ms.weights, ms.components):
        sg = c.phase_gradient()
        diffs = [sg[i] - sbar[i] for i in range(n)]
        for i in range(n):
            for j in range(i, n):
                val = w * numerics.integrate_values(
                    ms.grid, c.density * diffs[i] * diffs[j]
                )
                out[i, j] += val
                if j != i:
                    out[j, i] += val
    return out


def vnc_convex_decomposition(ms: MixedState) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(convex sum of component Vnc, delta correction, their total)."""
    n = ms.grid.dim
    sum_k = np.zeros((n, n))
    for w, c in zip(ms.weights, ms.components):
        sum_k += w * qpotential.vnc(c)
    delta = delta_vnc(ms)
    return sum_k, delta, sum_k + delta


def mixed_mvqp_components(ms: MixedState, m) -> float:
    """Mean quantum potential through the convex decomposition (any dim)."""
    mm = qpotential._mass_matrix(m, ms.grid.dim)
    _, _, total = vnc_convex_decomposition(ms)
    return 0.5 * float(np.tensordot(total, mm))


def theorem3_bound(ms: MixedState, m) -> float:
    """(hbar^2/8) sum_k w_k lambda_max((V^k)^-1 M)."""
    mm = qpotential._mass_matrix(m, ms.grid.dim)
    total = 0.0
    for w, c in zip(ms.weights, ms.components):
        v = numerics.require_spd(states.position_cov(c))
        eig = numerics.gen_eig_spd(mm, v)
        total += w * float(eig[-1])
    return ms.hbar**2 / 8.0 * total


def mixed_min_correlation(ms: MixedState, m) -> bool:
    """Eigenvalue chain Tr[Vnc M] >= sum_k w_k lam_max^k >= lam_max of the sum."""
    mm = qpotential._mass_matrix(m, ms.grid.dim)
    minv = np.linalg.inv(mm)
    minv = 0.5 * (minv + minv.T)
    _, _, total = vnc_convex_decomposition(ms)
    trace = float(np.tensordot(total, mm))
    sum_lam = 0.0
    sum_vnc = np.zeros_like(total)
    for w, c in zip(ms.weights, ms.components):
        vk = qpotential.vnc(c)
        sum_vnc += w * vk
        sum_lam += w * float(numerics.gen_eig_spd(0.5 * (vk + vk.T), minv)[-1])
    lam_sum = float(numerics.gen_eig_spd(0.5 * (sum_vnc + sum_vnc.T), minv)[-1])
    tol = 1e-6 * max(abs(trace), 1e-300)
    return trace >= sum_lam - tol and sum_lam >= lam_sum - tol


def thermal_state(
    beta: float,
    nu: float,
    dq0: float,
    k: int | None = None,
    grid: Grid | None = None,
    hbar: float = 1.0,
) -> MixedState:
    """Truncated thermal oscillator mixture with Boltzmann weights.

    The truncation order is chosen adaptively (residual weight below
    ``TRUNCATION_TOL``) unless given; a given order that leaves more
    residual weight is rejected.
    """
    if beta <= 0 or nu <= 0 or dq0 <= 0:
        raise ValueError("beta, nu, dq0 must be positive")
    x = hbar * beta * nu
    if k is None:
        k = max(2, math.ceil(-math.log(TRUNCATION_TOL) / x) + 1)
    residual = math.exp(-x * k)
    if residual >= TRUNCATION_TOL:
        raise TruncationInsufficient(
            f"truncation at {k} terms leaves weight {residual}"
        )
    if grid is None:
        grid = states.ho_recommended_grid(k - 1, dq0, count=513)
    raw = np.exp(-x * np.arange(k))
    weights = raw / raw.sum()
    comps = tuple(states.ho_eigenstate(n, dq0, grid, hbar=hbar) for n in range(k))
    return MixedState(weights, comps, hbar)


def thermal_mvqp_exact(beta: float, nu: float, dq0: float, hbar: float = 1.0) -> float:
    """Closed-form thermal mean quantum potential, (hbar^2 nu / 8 dq0^2) coth."""
    x = 0.5 * hbar * beta * nu
    return hbar**2 * nu / (8.0 * dq0 * dq0) / math.tanh(x)


# --- mixture JSON loader ------------------------------------------------------

def load_mixture(path, grid: Grid | None = None) -> MixedState:
    """Build a MixedState from a JSON mixture description file.

    Format: {"hbar": 1.0, "grid": [lo, hi, count], "components": [
    {"weight": w, "type": "ho"|"pt"|"gaussian"|"csv", ...params}]} where
    "ho" takes n and dq0, "pt" takes lam and mu, "gaussian" takes v and
    eta_q, and "csv" takes a path to a state CSV file.
    """
    with open(path) as fh:
        payload = json.load(fh)
    hbar = float(payload.get("hbar", 1.0))
    if grid is None:
        if "grid" not in payload:
            raise ValueError("mixture file needs a 'grid' entry or an explicit grid")
        g = payload["grid"]
        grid = Grid.box(g if isinstance(g[0], (list, tuple)) else [g])
    comps = []
    weights = []
    for i, entry in enumerate(payload.get("components", [])):
        if "weight" not in entry or "type" not in entry:
            raise ValueError(f"component {i} must carry 'weight' and 'type'")
        weights.append(float(entry["weight"]))
        kind = entry["type"]
        if kind == "ho":
            comps.append(
                states.ho_eigenstate(int(entry["n"]), float(entry["dq0"]), grid, hbar)
            )
        elif kind == "pt":
            comps.append(
                states.poschl_teller_state(int(entry["lam"]), int(entry["mu"]), grid, hbar)
            )
        elif kind == "gaussian":
            comps.append(
                states.gaussian_polar(entry["v"], entry["eta_q"], grid, hbar)
            )
        elif kind == "csv":
            comps.append(states.load_state_csv(entry["path"]))
        else:
            raise ValueError(f"component {i} has unknown type {kind!r}")
    return MixedState(np.asarray(weights), tuple(comps), hbar)
