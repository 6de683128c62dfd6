"""Exception hierarchy.

``InvalidParameterError`` covers anything the caller can fix by changing
inputs. ``ContractViolationError`` signals a numerical contract that failed
(symplecticity, uncertainty, aliasing, unitarity) and usually points at a bug
or an under-resolved grid.
"""


class ToFError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(ToFError, ValueError):
    pass


class AmbiguousInstantError(InvalidParameterError):
    """Coefficients requested exactly at a kick instant."""


class InvalidCouplingError(InvalidParameterError):
    """A sampled coupling function returned non-finite values."""


class DegenerateFunctionalError(InvalidParameterError):
    """The ToF functional carries no momentum information (kappa == 0)."""


class NoCrossingError(InvalidParameterError):
    """The width ratio does not cross one inside the search bracket."""


class InfeasibleError(InvalidParameterError):
    """No admissible setup inside the optimizer bounds."""


class ResolutionError(InvalidParameterError):
    """Grid spacing too coarse for the widths involved."""


class OutOfSupportError(InvalidParameterError):
    """The state (or a substitution line) leaves the grid."""


class ContractViolationError(ToFError):
    pass


class DegenerateConditioningError(ContractViolationError):
    """Conditioning on a statistic with (numerically) zero variance."""


class AliasingError(ContractViolationError):
    """Spectral mass reached the edge of the momentum grid."""
