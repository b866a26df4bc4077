"""Special functions used by the analytic benchmark states.

Hermite and associated Legendre go through their three-term recurrences;
log-gamma delegates to the C library via :func:`math.lgamma`.  The
position variance of the sech-well top states is evaluated by quadrature
of its defining integral rather than by a hypergeometric series: the
quadrature doubles as the independent oracle for every closed form built
on top of it, and avoids series convergence at unit argument.

Note on the sech-well ("Poschl-Teller") energies: the eigenvalue equation
for ``P_lambda^mu(tanh q)`` fixes ``E_mu = -hbar^2 mu^2 / (2m)``; some
sources misprint the exponent.  :func:`pt_energy` returns the value
consistent with the eigenvalue equation (and with every quadrature in
this package).
"""

from __future__ import annotations

import math

import numpy as np

from .errors import (
    ArgumentOutOfDomain,
    DegreeOutOfRange,
    DomainError,
    InvalidOrder,
    OrderOutOfRange,
)

MAX_HERMITE_DEGREE = 200
MAX_LEGENDRE_DEGREE = 100
MAX_PT_ORDER = 200


def hermite(n: int, x):
    """Physicists' Hermite polynomial H_n(x) by upward recurrence."""
    if not 0 <= n <= MAX_HERMITE_DEGREE:
        raise DegreeOutOfRange(f"hermite degree {n} outside [0, {MAX_HERMITE_DEGREE}]")
    x = np.asarray(x, dtype=float)
    h_prev = np.ones_like(x)
    if n == 0:
        return h_prev if h_prev.ndim else float(h_prev)
    h = 2.0 * x
    for k in range(1, n):
        h_prev, h = h, 2.0 * x * h - 2.0 * k * h_prev
    return h if h.ndim else float(h)


def assoc_legendre(lam: int, mu: int, x):
    """Associated Legendre P_lam^mu(x), Condon-Shortley phase.

    Seeds at P_mu^mu(x) = (-1)^mu (2 mu - 1)!! (1 - x^2)^(mu/2) and climbs
    in degree with the standard three-term recurrence.
    """
    if not (0 <= mu <= lam <= MAX_LEGENDRE_DEGREE):
        raise InvalidOrder(f"need 0 <= mu <= lam <= {MAX_LEGENDRE_DEGREE}")
    x = np.asarray(x, dtype=float)
    if np.any(np.abs(x) > 1.0):
        raise ArgumentOutOfDomain("associated Legendre argument outside [-1, 1]")
    p_mm = ((-1.0) ** mu) * double_factorial(2 * mu - 1) * (1.0 - x * x) ** (mu / 2.0)
    if lam == mu:
        return p_mm if p_mm.ndim else float(p_mm)
    p_prev = p_mm
    p = (2.0 * mu + 1.0) * x * p_mm
    for ell in range(mu + 1, lam):
        p_prev, p = p, (
            (2.0 * ell + 1.0) * x * p - (ell + mu) * p_prev
        ) / (ell - mu + 1.0)
    return p if p.ndim else float(p)


def ln_gamma(x: float) -> float:
    if x <= 0.0:
        raise DomainError(f"ln_gamma requires x > 0, got {x}")
    return math.lgamma(x)


def double_factorial(k: int) -> float:
    """k!! with the empty-product convention (-1)!! = 0!! = 1."""
    if k < -1:
        raise DomainError(f"double factorial undefined for {k}")
    if k > 300:
        raise DomainError(f"double factorial overflows for {k}")
    out = 1.0
    while k > 1:
        out *= k
        k -= 2
    return out


def pt_energy(mu: int, mass: float = 1.0, hbar: float = 1.0) -> float:
    """Bound-state energy of the sech-well top state, -hbar^2 mu^2 / (2m)."""
    if mu < 1:
        raise OrderOutOfRange("well order must be >= 1")
    return -hbar * hbar * mu * mu / (2.0 * mass)


def _sech_q2_halfline(mu: int, count: int) -> float:
    """Simpson value of the defining integral on [0, qmax]."""
    # integrand ~ exp(-2 mu q) q^2 for large q; qmax keeps the tail < 1e-14
    qmax = 40.0 / mu + 10.0 / math.sqrt(mu)
    q = np.linspace(0.0, qmax, count)
    h = q[1] - q[0]
    # sech^{2 mu} in log space so mu up to MAX_PT_ORDER cannot underflow early
    log_sech = -np.logaddexp(q, -q) + math.log(2.0)
    y = np.exp(2.0 * mu * log_sech) * q * q
    w = np.full(count, 2.0, dtype=float)
    w[1::2] = 4.0
    w[0] = w[-1] = 1.0
    return float(np.sum(w * y) * h / 3.0)


def pt_position_variance(mu: int, rtol: float = 1e-11) -> float:
    """Position variance of the top (lambda = mu) sech-well eigenstate.

    The density is [Gamma(mu+1/2)/(sqrt(pi) Gamma(mu))] sech^{2 mu}(q), so
    the variance is twice its normalization constant times the half-line
    integral int_0^inf sech^{2 mu}(q) q^2 dq, evaluated by composite
    Simpson with grid doubling until successive refinements agree to
    ``rtol``.  The gamma ratio is taken in log space.
    """
    if not 1 <= mu <= MAX_PT_ORDER:
        raise OrderOutOfRange(f"well order {mu} outside [1, {MAX_PT_ORDER}]")
    log_ratio = ln_gamma(mu + 0.5) - 0.5 * math.log(math.pi) - ln_gamma(mu)
    count = 2049
    prev = _sech_q2_halfline(mu, count)
    for _ in range(10):
        count = 2 * (count - 1) + 1
        cur = _sech_q2_halfline(mu, count)
        if abs(cur - prev) <= rtol * abs(cur):
            prev = cur
            break
        prev = cur
    return 2.0 * math.exp(log_ratio) * prev
