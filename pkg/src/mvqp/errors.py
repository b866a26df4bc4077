"""Exception hierarchy shared by all modules."""


class MvqpError(Exception):
    """Base class for all toolkit errors."""


# --- numerics ---------------------------------------------------------------

class NonFiniteField(MvqpError):
    """A sampled field contains NaN or infinite values."""


class GridTooCoarse(MvqpError):
    """Too few points per axis for the requested stencil."""


class NotSymmetric(MvqpError):
    """Matrix fails the symmetry tolerance."""


class NotPositiveDefinite(MvqpError):
    """Cholesky factorization hit a nonpositive pivot."""


class GridMismatch(MvqpError):
    """Fields sampled on different grids were combined."""


class DimensionMismatch(MvqpError):
    """Matrix order does not match the grid dimension."""


# --- special functions ------------------------------------------------------

class DegreeOutOfRange(MvqpError):
    """Polynomial degree outside the supported range."""


class InvalidOrder(MvqpError):
    """Invalid (degree, order) pair for associated Legendre."""


class ArgumentOutOfDomain(MvqpError):
    """Function argument outside its domain."""


class DomainError(MvqpError):
    """Argument outside the supported domain."""


class OrderOutOfRange(MvqpError):
    """Potential-well order outside the supported range."""


class OutOfRange(MvqpError):
    """Generic parameter out of range."""


# --- states -----------------------------------------------------------------

class NotNormalized(MvqpError):
    """State density does not integrate to one within tolerance."""


class BoxTooSmall(MvqpError):
    """Grid box does not capture the state."""


class UnwrapFailure(MvqpError):
    """Phase unwrapping detected a 2-pi jump next to a high-amplitude cell."""


# --- bounds / quantum potential ---------------------------------------------

class DegenerateTestFunction(MvqpError):
    """Test function is almost-everywhere constant under the state measure."""


class NodeDominatedState(MvqpError):
    """Too much probability mass sits in amplitude-masked cells."""


# --- covariance -------------------------------------------------------------

class WrongDimension(MvqpError):
    """Operation requires a different number of degrees of freedom."""


class ClassicalCorrelationsPresent(MvqpError):
    """Check requires vanishing classical momentum covariance."""


# --- gaussian ---------------------------------------------------------------

class ExpDivergence(MvqpError):
    """Matrix exponential argument too large for the squaring depth."""


class SingularBlock(MvqpError):
    """Numerical breakdown inverting a symplectic block combination."""


# --- mixed ------------------------------------------------------------------

class DimensionUnsupported(MvqpError):
    """Density grids support one degree of freedom only."""


class PhaseMissing(MvqpError):
    """Mixture component lacks the phase data required here."""


class MaskDominated(MvqpError):
    """Amplitude mask covers too much of the density diagonal."""


class TruncationInsufficient(MvqpError):
    """Truncated convex decomposition leaves too much weight behind."""
