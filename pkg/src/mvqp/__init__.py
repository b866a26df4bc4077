"""Numerical toolkit for the mean value of the quantum potential.

Grid states in polar form, exact Gaussian/symplectic machinery, the
classical/nonclassical covariance split, generalized uncertainty bounds,
and mixed-state extensions, with a CLI front end for verification suites
and figure-data emission.
"""

from .errors import MvqpError
from .numerics import Axis, Grid, ScalarField
from .states import PolarState, polar_decompose
from .gaussian import GaussianPureState, QuadraticHamiltonian, SymplecticMatrix
from .qpotential import QpReport, mvqp, qp_report, quantum_potential, vnc
from .bounds import BoundEvaluation, bound_functional, linear_bound, theorem2_bound
from .covariance import CovarianceReport, covariance_report, rsur_check, theorem4_check
from .mixed import DensityGrid, MixedState, mixed_mvqp, thermal_state

__all__ = [
    "Axis",
    "BoundEvaluation",
    "CovarianceReport",
    "DensityGrid",
    "GaussianPureState",
    "Grid",
    "MixedState",
    "MvqpError",
    "PolarState",
    "QpReport",
    "QuadraticHamiltonian",
    "ScalarField",
    "SymplecticMatrix",
    "bound_functional",
    "covariance_report",
    "linear_bound",
    "mixed_mvqp",
    "mvqp",
    "polar_decompose",
    "qp_report",
    "quantum_potential",
    "rsur_check",
    "theorem2_bound",
    "theorem4_check",
    "thermal_state",
    "vnc",
]

__version__ = "0.1.0"
