"""Grids, quadrature, finite differences, and small dense eigensolvers.

Everything operates on uniform rectangular grids.  Quadrature is composite
Simpson (4th order) and differencing is central, 4th order by default with
an optional 6th-order interior stencil used by the quantum-potential
quadratures, where the tolerance budget is tighter than the plain scheme
order delivers on 513-point grids.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    DimensionMismatch,
    GridMismatch,
    GridTooCoarse,
    NonFiniteField,
    NotPositiveDefinite,
    NotSymmetric,
)

MAX_QUADRATURE_DIM = 3


@dataclass(frozen=True)
class Axis:
    lo: float
    hi: float
    count: int

    def __post_init__(self):
        if self.count < 16:
            raise GridTooCoarse(f"axis needs >= 16 points, got {self.count}")
        if not self.hi > self.lo:
            raise ValueError("axis upper bound must exceed lower bound")

    @property
    def spacing(self) -> float:
        return (self.hi - self.lo) / (self.count - 1)

    def coords(self) -> np.ndarray:
        return np.linspace(self.lo, self.hi, self.count)


@dataclass(frozen=True)
class Grid:
    axes: tuple[Axis, ...]

    @classmethod
    def line(cls, lo: float, hi: float, count: int) -> "Grid":
        return cls((Axis(lo, hi, count),))

    @classmethod
    def box(cls, specs) -> "Grid":
        """Build from an iterable of (lo, hi, count) triples."""
        return cls(tuple(Axis(*s) for s in specs))

    @property
    def dim(self) -> int:
        return len(self.axes)

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(ax.count for ax in self.axes)

    @property
    def size(self) -> int:
        return int(np.prod(self.shape))

    @property
    def spacings(self) -> tuple[float, ...]:
        return tuple(ax.spacing for ax in self.axes)

    @cached_property
    def mesh(self) -> tuple[np.ndarray, ...]:
        """Coordinate arrays of the full grid shape, one per axis."""
        return tuple(
            np.meshgrid(*(ax.coords() for ax in self.axes), indexing="ij")
        )

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.spacings))


@dataclass(frozen=True)
class ScalarField:
    grid: Grid
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        if vals.shape != self.grid.shape:
            raise GridMismatch(
                f"values shape {vals.shape} != grid shape {self.grid.shape}"
            )
        object.__setattr__(self, "values", vals)

    def require_finite(self):
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteField("field contains NaN or infinite values")


def same_grid(*fields: ScalarField) -> Grid:
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise GridMismatch("fields live on different grids")
    return grid


# --- quadrature -------------------------------------------------------------

def _simpson_weights(count: int, h: float) -> np.ndarray:
    """Composite Simpson weights; trapezoid on a leftover interval pair."""
    w = np.zeros(count)
    n = count - 1
    if n % 2 == 0:
        w[0] = w[-1] = 1.0
        w[1:-1:2] = 4.0
        w[2:-2:2] = 2.0
        w *= h / 3.0
    else:
        # even interval count unreachable: fall back to trapezoid
        w[:] = h
        w[0] = w[-1] = h / 2.0
    return w


def quadrature_weights(grid: Grid) -> np.ndarray:
    """Tensorized Simpson weights with the full grid shape."""
    w = _simpson_weights(grid.axes[0].count, grid.axes[0].spacing)
    out = w
    for ax in grid.axes[1:]:
        out = np.multiply.outer(out, _simpson_weights(ax.count, ax.spacing))
    return out


def integrate(f: ScalarField) -> float:
    if f.grid.dim > MAX_QUADRATURE_DIM:
        raise DimensionMismatch(
            f"quadrature supports dim <= {MAX_QUADRATURE_DIM}, got {f.grid.dim}"
        )
    f.require_finite()
    return float(np.sum(quadrature_weights(f.grid) * f.values))


def integrate_values(grid: Grid, values: np.ndarray) -> float:
    return integrate(ScalarField(grid, values))


# --- finite differences -----------------------------------------------------

def _diff_axis(values: np.ndarray, h: float, axis: int, order: int) -> np.ndarray:
    v = np.moveaxis(values, axis, 0)
    g = np.empty_like(v)
    if order == 4:
        if v.shape[0] < 5:
            raise GridTooCoarse("4th-order differencing needs >= 5 points")
        g[2:-2] = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
        lo = 2
    elif order == 6:
        if v.shape[0] < 7:
            raise GridTooCoarse("6th-order differencing needs >= 7 points")
        g[3:-3] = (
            -v[:-6] + 9 * v[1:-5] - 45 * v[2:-4] + 45 * v[4:-2] - 9 * v[5:-1] + v[6:]
        ) / (60 * h)
        lo = 3
    else:
        raise ValueError(f"unsupported differencing order {order}")
    # one-sided / narrow central 2nd order near the boundary
    for i in range(lo):
        if i == 0:
            g[0] = (-3 * v[0] + 4 * v[1] - v[2]) / (2 * h)
            g[-1] = (3 * v[-1] - 4 * v[-2] + v[-3]) / (2 * h)
        else:
            g[i] = (v[i + 1] - v[i - 1]) / (2 * h)
            g[-1 - i] = (v[-i] - v[-2 - i]) / (2 * h)
    return np.moveaxis(g, 0, axis)


def gradient(f: ScalarField, order: int = 4) -> list[ScalarField]:
    f.require_finite()
    return [
        ScalarField(f.grid, _diff_axis(f.values, ax.spacing, i, order))
        for i, ax in enumerate(f.grid.axes)
    ]


def gradient_values(grid: Grid, values: np.ndarray, order: int = 4) -> list[np.ndarray]:
    return [g.values for g in gradient(ScalarField(grid, values), order=order)]


def hessian(f: ScalarField, order: int = 4) -> list[list[ScalarField]]:
    """Second derivatives by repeated differencing, symmetrized pointwise."""
    grads = gradient(f, order=order)
    n = f.grid.dim
    raw = [[_diff_axis(grads[i].values, f.grid.axes[j].spacing, j, order)
            for j in range(n)] for i in range(n)]
    return [
        [ScalarField(f.grid, 0.5 * (raw[i][j] + raw[j][i])) for j in range(n)]
        for i in range(n)
    ]


# --- small dense symmetric eigenproblems ------------------------------------

SYM_RTOL = 1e-12


def require_symmetric(a: np.ndarray, rtol: float = SYM_RTOL) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise NotSymmetric("expected a square matrix")
    scale = max(np.abs(a).max(), 1e-300)
    if np.abs(a - a.T).max() > rtol * scale:
        raise NotSymmetric("matrix is not symmetric within tolerance")
    return 0.5 * (a + a.T)


def sym_eig(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for a real symmetric matrix.

    Returns eigenvalues ascending and orthonormal eigenvectors as columns.
    """
    a = require_symmetric(a)
    n = a.shape[0]
    v = np.eye(n)
    a = a.copy()
    norm = max(np.abs(a).max(), 1e-300)
    for _ in range(100):
        off = np.sqrt(np.sum(np.tril(a, -1) ** 2))
        if off < 1e-13 * norm:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1))
                if theta == 0:
                    t = 1.0
                c = 1.0 / np.sqrt(t * t + 1)
                s = t * c
                rot = np.eye(n)
                rot[p, p] = rot[q, q] = c
                rot[p, q] = s
                rot[q, p] = -s
                a = rot.T @ a @ rot
                v = v @ rot
    order = np.argsort(np.diag(a), kind="stable")
    return np.diag(a)[order], v[:, order]


def cholesky_spd(a: np.ndarray) -> np.ndarray:
    """Lower Cholesky factor; raises on a nonpositive pivot."""
    a = require_symmetric(a)
    n = a.shape[0]
    g = np.zeros_like(a)
    for i in range(n):
        s = a[i, i] - np.dot(g[i, :i], g[i, :i])
        if s <= 0.0:
            raise NotPositiveDefinite(f"Cholesky pivot {s} at row {i}")
        g[i, i] = np.sqrt(s)
        for j in range(i + 1, n):
            g[j, i] = (a[j, i] - np.dot(g[j, :i], g[i, :i])) / g[i, i]
    return g


def require_spd(a: np.ndarray) -> np.ndarray:
    a = require_symmetric(a)
    cholesky_spd(a)
    return a


def gen_eig_spd(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Eigenvalues (ascending) of the pencil A x = lambda B x, B SPD."""
    w, _ = gen_eig_spd_pairs(a, b)
    return w


def gen_eig_spd_pairs(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues and pencil eigenvectors of A x = lambda B x, B SPD.

    Reduces to the symmetric problem G^-1 A G^-T with B = G G^T, so all
    eigenvalues are real; eigenvectors are columns, B-orthonormal.
    """
    a = require_symmetric(a)
    g = cholesky_spd(b)
    ginv_a = np.linalg.solve(g, a)
    c = np.linalg.solve(g, ginv_a.T)  # G^-1 A G^-T, symmetric
    w, u = sym_eig(0.5 * (c + c.T))
    x = np.linalg.solve(g.T, u)
    return w, x
