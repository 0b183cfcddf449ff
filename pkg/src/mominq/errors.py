"""Exception types raised by mominq validation and evaluation."""


class MominqError(Exception):
    """Base class for all package errors."""


class LawError(MominqError, ValueError):
    """Invalid discrete-law construction input."""


class EmptyLaw(LawError):
    """No atoms supplied."""


class NonPositiveValue(LawError):
    """An atom value is <= 0 (support must lie in (0, inf))."""


class NonPositiveMass(LawError):
    """An atom mass is <= 0."""


class MassSumOutOfTolerance(LawError):
    """Masses do not sum to 1 and auto-normalization was not requested."""


class DistributionError(MominqError, ValueError):
    """Invalid finite probability distribution."""


class NonPositiveProbability(DistributionError):
    """A probability entry is <= 0."""


class ProbSumOutOfTolerance(DistributionError):
    """Probabilities do not sum to 1 within tolerance."""


class LengthMismatch(DistributionError):
    """Paired distributions have different support sizes."""


class MomentOverflow(MominqError, ArithmeticError):
    """A moment or derived quantity is not finite; reported, never saturated."""


class NonFinite(MominqError, ArithmeticError):
    """A user-supplied kernel blew up at some probability ratio."""


class NegativeWeight(MominqError, ValueError):
    """Mixture weights of the weighted quadratic form must be >= 0."""


class ArityMismatch(MominqError, ValueError):
    """Parameter count does not match the requested check."""


class OrderViolation(MominqError, ValueError):
    """Moment orders violate a required strict ordering (r < s < t)."""


class MissingParam(MominqError, ValueError):
    """The requested divergence needs an order parameter."""


class AlphaOne(MominqError, ValueError):
    """Renyi/Tsallis order must differ from 1."""


class SingularOrder(MominqError, ValueError):
    """Exact evaluation requested at an order whose value is transcendental."""


class NonIntegerMidpoint(MominqError, ValueError):
    """Exact evaluation needs every implied moment order to be an integer."""


class NotCertifiable(MominqError, ValueError):
    """Exact certification is unavailable for these orders; fall back to
    extended-precision evidence."""
