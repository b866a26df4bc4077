"""Lower bounds on the mean quantum potential from test functions.

The central object is the bound functional

    L_Q(T0) = (hbar^2/8) <grad T0>.M <grad T0> / Cov(T0, T0),

which never exceeds the mean quantum potential for any test function T0
square-integrable under the probability density.  Linear test functions
reduce it to a generalized eigenvalue problem on the position covariance;
the curvature-matrix eigenvalue bound is its extremal version.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import gaussian as gaussian_mod
from . import numerics, qpotential, specfun, states
from .errors import DegenerateTestFunction, NodeDominatedState, OutOfRange
from .states import PolarState

COV_FLOOR = 1e-14
NODE_MASS_LIMIT = 0.05
DERIVATIVE_ORDER = 6


@dataclass(frozen=True)
class BoundEvaluation:
    value: float
    t0_label: str
    mvqp: float

    @property
    def slack(self) -> float:
        return self.mvqp - self.value


def _gradient(state: PolarState, values: np.ndarray) -> list[np.ndarray]:
    return numerics.gradient_values(state.grid, values, order=DERIVATIVE_ORDER)


def bound_functional(
    state: PolarState, m, t0: np.ndarray, label: str = "T0"
) -> BoundEvaluation:
    """Evaluate the test-function bound and its slack against the mean QP."""
    mm = qpotential._mass_matrix(m, state.grid.dim)
    t0 = np.asarray(t0, dtype=float)
    var = states.weighted_cov(state, t0, t0)
    if var <= COV_FLOOR:
        raise DegenerateTestFunction(
            f"test-function variance {var} below {COV_FLOOR}"
        )
    grads = _gradient(state, t0)
    mean_grad = np.array([states.weighted_mean(state, g) for g in grads])
    value = state.hbar**2 / 8.0 * float(mean_grad @ mm @ mean_grad) / var
    return BoundEvaluation(value, label, qpotential.mvqp(state, mm))


def log_density_gradient(state: PolarState) -> tuple[list[np.ndarray], np.ndarray]:
    """Per-axis derivative of log(Omega^2), zeroed on the node mask.

    Raises when more than ``NODE_MASS_LIMIT`` of the probability mass sits
    in masked cells, where the logarithmic derivative is unreliable.
    """
    psi = state.signed_amplitude()
    mask = state.omega >= qpotential.NODE_MASK_THRESHOLD * state.omega.max()
    masked_mass = numerics.integrate_values(
        state.grid, np.where(mask, 0.0, state.density)
    )
    if masked_mass > NODE_MASS_LIMIT:
        raise NodeDominatedState(
            f"{masked_mass} of the probability mass is amplitude-masked"
        )
    grads = _gradient(state, psi)
    out = []
    for g in grads:
        d = np.zeros(state.grid.shape)
        np.divide(2.0 * g, psi, out=d, where=mask & (psi != 0.0))
        out.append(d)
    return out, mask


def auxiliary_ti(state: PolarState, m) -> list[np.ndarray]:
    """Decomposition functions T_i whose variances sum to the mean QP.

    With M = O diag(lam) O^T, T_i = sqrt(lam_i) (O^T grad log Omega^2)_i;
    each has zero mean and (hbar^2/8) sum_i Cov(T_i, T_i) equals the mean
    quantum potential.
    """
    mm = qpotential._mass_matrix(m, state.grid.dim)
    lam, vecs = numerics.sym_eig(mm)
    grads, _ = log_density_gradient(state)
    out = []
    for i in range(state.grid.dim):
        t = np.zeros(state.grid.shape)
        for k in range(state.grid.dim):
            t += vecs[k, i] * grads[k]
        out.append(np.sqrt(lam[i]) * t)
    return out


def auxiliary_covariance(state: PolarState, m) -> np.ndarray:
    """Covariance matrix of the decomposition functions under the density.

    Works through the amplitude-weighted products Omega T_i, which stay
    bounded across amplitude nodes where the pointwise T_i samples are
    masked; (hbar^2/8) times the trace equals the mean quantum potential
    to quadrature accuracy on every state, noded or not.
    """
    mm = qpotential._mass_matrix(m, state.grid.dim)
    lam, vecs = numerics.sym_eig(mm)
    n = state.grid.dim
    psi = state.signed_amplitude()
    grads = _gradient(state, psi)
    u = []
    # strict +-1 sign: sign(psi)=0 at a node would wrongly zero the cell
    sign = np.where(psi >= 0.0, 1.0, -1.0)
    for i in range(n):
        acc = np.zeros(state.grid.shape)
        for k in range(n):
            acc += vecs[k, i] * grads[k]
        u.append(2.0 * np.sqrt(lam[i]) * acc * sign)
    means = np.array(
        [numerics.integrate_values(state.grid, state.omega * ui) for ui in u]
    )
    cov = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            cov[i, j] = cov[j, i] = (
                numerics.integrate_values(state.grid, u[i] * u[j])
                - means[i] * means[j]
            )
    return cov


def theorem2_bound(state: PolarState, m) -> float:
    """(hbar^2/8) times the top curvature-matrix eigenvalue.

    Exact for one degree of freedom, where the extremal test function
    saturates the bound; for several degrees of freedom on non-Gaussian
    states it is an extremal candidate.
    """
    eig = qpotential.q_matrix_eigenvalues(state, m)
    return state.hbar**2 / 8.0 * float(eig[-1])


def linear_bound(state, m) -> tuple[float, float, float]:
    """(hbar^2/8) (min, max) eigenvalues of the (V, M) pencil, plus the bound.

    Accepts either a grid state or a Gaussian state; the returned bound is
    the upper value, which every linear test function's functional value
    stays between (lower) and (upper).
    """
    if isinstance(state, gaussian_mod.GaussianPureState):
        v = gaussian_mod.position_cov(state)
        hbar = state.hbar
        n = state.dim
    else:
        v = states.position_cov(state)
        hbar = state.hbar
        n = state.grid.dim
    mm = qpotential._mass_matrix(m, n)
    eig = numerics.gen_eig_spd(mm, numerics.require_spd(v))
    lower = hbar**2 / 8.0 * float(eig[0])
    upper = hbar**2 / 8.0 * float(eig[-1])
    return lower, upper, upper


def extremal_residual(state: PolarState, m, t: np.ndarray) -> float:
    """Normalized weighted L2 residual of the extremal self-consistency map.

    An extremizer T satisfies T = <T> - (hbar^2/8) grad(log Omega^2).M
    <grad T> / L_Q(T); a near-zero residual certifies T as extremal.
    """
    mm = qpotential._mass_matrix(m, state.grid.dim)
    t = np.asarray(t, dtype=float)
    var = states.weighted_cov(state, t, t)
    if var <= COV_FLOOR:
        raise DegenerateTestFunction("test function almost-everywhere constant")
    rhs, mask = _extremal_map(state, mm, t)
    diff = np.where(mask, t - rhs, 0.0)
    return float(np.sqrt(states.weighted_mean(state, diff * diff) / var))


def _extremal_map(state: PolarState, mm: np.ndarray, t: np.ndarray):
    ev = bound_functional(state, mm, t)
    grads = _gradient(state, t)
    mean_grad = np.array([states.weighted_mean(state, g) for g in grads])
    log_grads, mask = log_density_gradient(state)
    mg = mm @ mean_grad
    acc = np.zeros(state.grid.shape)
    for k in range(state.grid.dim):
        acc += log_grads[k] * mg[k]
    rhs = states.weighted_mean(state, t) - state.hbar**2 / 8.0 * acc / ev.value
    return rhs, mask


def extremal_fixed_point(
    state: PolarState, m, t0: np.ndarray, damping: float = 0.5, max_iter: int = 200
) -> tuple[np.ndarray, float]:
    """Damped fixed-point iteration on the extremal map (experimental).

    No convergence guarantee; returns the final iterate and its residual.
    """
    mm = qpotential._mass_matrix(m, state.grid.dim)
    t = np.asarray(t0, dtype=float).copy()
    for _ in range(max_iter):
        rhs, mask = _extremal_map(state, mm, t)
        new = np.where(mask, (1.0 - damping) * t + damping * rhs, t)
        if np.abs(new - t).max() <= 1e-12 * max(np.abs(new).max(), 1.0):
            t = new
            break
        t = new
    return t, extremal_residual(state, mm, t)


def powerlaw_coefficients(k: int) -> float:
    """Variance-ratio coefficient C_k = (k!!)^2 / (2k-1)!! for odd k, 0 even."""
    if not 1 <= k <= 99:
        raise OutOfRange(f"power-law exponent {k} outside [1, 99]")
    if k % 2 == 0:
        return 0.0
    df = specfun.double_factorial
    return df(k) ** 2 / df(2 * k - 1)


def pt_bound_tanh_n(mu: int, n: int, mass: float = 1.0, hbar: float = 1.0) -> float:
    """Closed form of the tanh^n bound for the top sech-well eigenstate.

    Vanishes for even n by parity; for odd n the value is a gamma-function
    ratio that must agree with the quadrature bound functional.
    """
    if mu < 1 or n < 1:
        raise OutOfRange("need well order >= 1 and test-function power >= 1")
    if n % 2 == 0:
        return 0.0
    lg = specfun.ln_gamma
    log_val = (
        lg(mu + 0.5)
        + lg(n + mu + 0.5)
        + 2.0 * lg(n / 2.0 + 1.0)
        - 0.5 * np.log(np.pi)
        - lg(n + 0.5)
        - 2.0 * lg(n / 2.0 + mu + 1.0)
    )
    return mu * mu * hbar * hbar / (2.0 * mass) * float(np.exp(log_val))


def random_test_functions(
    state: PolarState, count: int, seed: int, degree: int = 6
) -> list[np.ndarray]:
    """Seeded random smooth test functions in L2 of the density.

    Each is a sum of random per-axis polynomials of the given degree with
    coefficients uniform in [-1, 1], damped by exp(-(q/half_width)^4) so
    the tails stay integrable against any of the built-in densities.
    """
    rng = np.random.default_rng(seed)
    envelope = np.ones(state.grid.shape)
    for i, ax in enumerate(state.grid.axes):
        half = 0.5 * (ax.hi - ax.lo)
        center = 0.5 * (ax.hi + ax.lo)
        envelope *= np.exp(-(((state.grid.mesh[i] - center) / half) ** 4))
    out = []
    for _ in range(count):
        poly = np.zeros(state.grid.shape)
        for i in range(state.grid.dim):
            coeffs = rng.uniform(-1.0, 1.0, degree + 1)
            scale = max(abs(state.grid.axes[i].lo), abs(state.grid.axes[i].hi))
            u = state.grid.mesh[i] / scale
            poly += np.polynomial.polynomial.polyval(u, coeffs)
        out.append(poly * envelope)
    return out
