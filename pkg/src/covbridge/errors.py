"""Exception hierarchy.

Validation problems derive from ``ValueError`` so callers that only care
about bad input can catch the builtin. Failures of a numerical route
derive from ``ArithmeticError``.
"""


class CovBridgeError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(CovBridgeError, ValueError):
    """A parameter or argument is outside its admissible range."""


class DomainError(ParameterError):
    """A special function was called outside its domain."""


class PoleError(DomainError):
    """A gamma function argument hit a pole.

    ``index`` is the series index at which it happened, when known.
    """

    def __init__(self, message, argument=None, index=None):
        super().__init__(message)
        self.argument = argument
        self.index = index


class UnsupportedOrderError(ParameterError):
    """Bessel order not covered by the implementation."""


class ContourError(ParameterError):
    """The integration contour does not separate the pole families."""


class NumericalError(CovBridgeError, ArithmeticError):
    """A numerical route could not deliver a trustworthy value."""


class ConvergenceError(NumericalError):
    """A series or extrapolation did not reach the requested tolerance."""


class PoleCollisionError(NumericalError):
    """Poles of two gamma factors (nearly) coincide, so the residue series degenerates."""

    def __init__(self, message, n=None, m=None):
        super().__init__(message)
        self.n = n
        self.m = m


class TruncationError(NumericalError):
    """The integrand is still significant at the truncation point."""


class SymmetryError(NumericalError):
    """A result that must be real came out with a significant imaginary part."""
