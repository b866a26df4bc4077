"""Quantum potential, its mean value, and the nonclassical covariance.

All production quantities use gradient (first-derivative-of-amplitude)
integrands obtained by integrating the second-derivative definitions by
parts: the pointwise quantum potential diverges at amplitude nodes while
the integrated forms stay finite, so the gradient forms are authoritative
and the division form survives only as a cross-check field.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from . import numerics
from .errors import DimensionMismatch
from .numerics import ScalarField
from .states import PolarState

NODE_MASK_THRESHOLD = 1e-8


def _mass_matrix(m, n: int) -> np.ndarray:
    a = np.asarray(m, dtype=float)
    if a.ndim == 0:
        a = a * np.eye(n)
    if a.shape != (n, n):
        raise DimensionMismatch(f"kinetic matrix must be {n}x{n}")
    return numerics.require_spd(a)


def quantum_potential(state: PolarState, m) -> ScalarField:
    """Pointwise -(hbar^2 / 2 Omega) div(M grad Omega); NaN-masked near nodes.

    The mask covers cells with amplitude below ``NODE_MASK_THRESHOLD`` of
    the peak, where the division is meaningless.  The value is invariant
    under amplitude rescaling by construction.
    """
    n = state.grid.dim
    mm = _mass_matrix(m, n)
    psi = state.signed_amplitude()
    f = ScalarField(state.grid, psi)
    hess = numerics.hessian(f, order=6)
    div = np.zeros(state.grid.shape)
    for i in range(n):
        for j in range(n):
            if mm[i, j] != 0.0:
                div += mm[i, j] * hess[i][j].values
    mask = state.omega >= NODE_MASK_THRESHOLD * state.omega.max()
    q = np.full(state.grid.shape, np.nan)
    np.divide(
        -0.5 * state.hbar**2 * div, psi, out=q, where=mask & (psi != 0.0)
    )
    return ScalarField(state.grid, q)


def masked_cell_count(q_field: ScalarField) -> int:
    return int(np.sum(~np.isfinite(q_field.values)))


def vnc(state: PolarState, m=None) -> np.ndarray:
    """Nonclassical covariance hbar^2 * integral of grad(Omega) grad(Omega)^T.

    Node-safe: the amplitude gradient is taken through the signed
    wavefunction, whose square integrands agree with those of |psi|.
    """
    n = state.grid.dim
    grads = state.omega_gradient()
    out = np.empty((n, n))
    for i in range(n):
        for j in range(i, n):
            val = state.hbar**2 * numerics.integrate_values(
                state.grid, grads[i] * grads[j]
            )
            out[i, j] = out[j, i] = val
    return out


def mvqp(state: PolarState, m) -> float:
    """Mean quantum potential (hbar^2/2) integral grad(Omega).M grad(Omega)."""
    mm = _mass_matrix(m, state.grid.dim)
    return 0.5 * float(np.tensordot(vnc(state), mm))


def q_matrix(state: PolarState, m) -> np.ndarray:
    """Log-density curvature matrix, (4/hbar^2) Vnc M; generally nonsymmetric."""
    mm = _mass_matrix(m, state.grid.dim)
    return 4.0 / state.hbar**2 * vnc(state) @ mm


def q_matrix_eigenvalues(state: PolarState, m) -> np.ndarray:
    """Real ascending spectrum of the curvature matrix via the SPD-pencil route.

    Vnc M and the pencil (Vnc, M^-1) are similar, so the eigenvalues come
    out real without touching the nonsymmetric product.
    """
    mm = _mass_matrix(m, state.grid.dim)
    v = vnc(state)
    minv = np.linalg.inv(mm)
    return 4.0 / state.hbar**2 * numerics.gen_eig_spd(0.5 * (v + v.T), 0.5 * (minv + minv.T))


@dataclass(frozen=True)
class QpReport:
    """Bundled quantum-potential quantities for one state and kinetic matrix."""

    q_field: ScalarField
    mvqp: float
    q_matrix: np.ndarray
    vnc: np.ndarray
    eigenvalues: np.ndarray
    masked_cells: int

    def to_dict(self) -> dict:
        return {
            "mvqp": self.mvqp,
            "q_matrix": self.q_matrix.tolist(),
            "vnc": self.vnc.tolist(),
            "eigenvalues": self.eigenvalues.tolist(),
            "masked_cells": self.masked_cells,
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), **kwargs)


def qp_report(state: PolarState, m) -> QpReport:
    mm = _mass_matrix(m, state.grid.dim)
    v = vnc(state)
    mean = 0.5 * float(np.tensordot(v, mm))
    qm = 4.0 / state.hbar**2 * v @ mm
    field = quantum_potential(state, mm)
    return QpReport(
        q_field=field,
        mvqp=mean,
        q_matrix=qm,
        vnc=v,
        eigenvalues=q_matrix_eigenvalues(state, mm),
        masked_cells=masked_cell_count(field),
    )
