"""Exception hierarchy shared by every module of the package."""


class ExtremeWishartError(Exception):
    """Base class for all package errors."""


class NotHermitian(ExtremeWishartError, ValueError):
    pass


class NotPositiveDefinite(ExtremeWishartError, ValueError):
    pass


class Singular(ExtremeWishartError, ValueError):
    pass


class NotRankOne(ExtremeWishartError, ValueError):
    pass


class DomainError(ExtremeWishartError, ValueError):
    """An argument lies outside the domain of a special function or formula."""


class NoConvergence(ExtremeWishartError, ArithmeticError):
    """A series hit its term cap before meeting the tolerance."""

    def __init__(self, message, terms=None, last_term=None):
        super().__init__(message)
        self.terms = terms
        self.last_term = last_term


class DegenerateEigenvalues(ExtremeWishartError, ArithmeticError):
    pass


class UnsupportedShape(ExtremeWishartError, ValueError):
    """No closed form is available for the requested (m, n)."""


class RegimeUnsupported(ExtremeWishartError, ValueError):
    """The (m, n, alpha) triple lies outside every proven gamma-Wishart regime."""


class InvalidDOF(ExtremeWishartError, ValueError):
    pass


class InsufficientAcceptance(ExtremeWishartError, RuntimeError):
    pass


class OrderMismatch(ExtremeWishartError, ValueError):
    pass


class PrecisionLoss(NoConvergence):
    """A c.d.f. value left the unit interval by more than rounding can explain."""
