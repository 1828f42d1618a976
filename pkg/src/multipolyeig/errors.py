"""Exception types raised by the solver pipeline."""

__all__ = [
    "MultiPolyEigError",
    "DixonConsistencyError",
    "SingularMepError",
    "ProjectionFailureError",
    "ExtractionFailureError",
    "ReductionDepthExceededError",
    "ParseError",
]


class MultiPolyEigError(Exception):
    """Base class for solver errors (as opposed to input validation errors)."""


class DixonConsistencyError(MultiPolyEigError):
    """The divided Dixon function failed the multiply-back consistency check."""


class SingularMepError(MultiPolyEigError):
    """Operator-determinant solve requested on a numerically singular MEP."""


class ProjectionFailureError(MultiPolyEigError):
    """Projection did not reach the normal rank after the allowed redraws."""


class ExtractionFailureError(MultiPolyEigError):
    """No usable eigenvector entries remain to recover some coordinate."""


class ReductionDepthExceededError(MultiPolyEigError):
    """A reduced subproblem lost a coordinate again; deeper recursion is not done."""


class ParseError(ValueError):
    """A document violates the input schema; message names the offending field."""
