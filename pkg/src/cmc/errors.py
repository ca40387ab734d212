"""Exception hierarchy shared by all modules."""


class CMCError(Exception):
    """Base class for every error raised by this package."""


class DomainError(CMCError, ValueError):
    """An argument lies outside the domain of the operation."""


class SingularPointError(DomainError):
    """Evaluation requested exactly at a singular point of an integrand."""


class ConvergenceError(CMCError, RuntimeError):
    """An iterative or extrapolation procedure failed to converge."""


class ParseError(CMCError, ValueError):
    """An input file (curve or configuration) could not be parsed."""


class CurveFormatError(ParseError):
    """A curve file could not be parsed."""


class FocalError(CMCError, RuntimeError):
    """A curve lost star-shapedness (or hit a focal point) under the distance flow."""


class CertificationError(CMCError, RuntimeError):
    """A sampled geometric certificate could not be established."""


class ContinuationError(ConvergenceError):
    """The domain-deformation continuation could not reach sigma = 0.

    ``last_sigma`` records the last deformation parameter at which a
    converged discrete solution was available.
    """

    def __init__(self, message, last_sigma=None):
        super().__init__(message)
        self.last_sigma = last_sigma
