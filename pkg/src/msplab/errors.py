"""Exception types shared across the package."""

from __future__ import annotations


class MsplabError(Exception):
    """Base class for every error raised by msplab."""


class InvalidSpec(MsplabError):
    """A request is malformed (bad target, N, order, or CLI arguments)."""


class UnknownTarget(InvalidSpec):
    pass


class NonUnitConstantTerm(MsplabError):
    pass


class NonZeroInnerConstant(MsplabError):
    pass


class NotInvertible(MsplabError):
    """A quotient-ring element or matrix has no inverse."""


class CheckFailed(MsplabError):
    """An identity that should hold exactly does not.

    ``locus`` names where the first mismatch was seen, for example the
    coefficient index of a series.
    """

    def __init__(self, message: str, locus: object = None):
        super().__init__(message)
        self.locus = locus


class DepthTooSmall(MsplabError):
    pass


class ConnectionResidualNonzero(CheckFailed):
    pass


class RoutesDisagree(CheckFailed):
    pass


class VanishingFactor(MsplabError):
    """An evaluation point makes a denominator factor vanish."""

    def __init__(self, message: str, degree: int, order_of_zero: int = 0):
        super().__init__(message)
        self.degree = degree
        self.order_of_zero = order_of_zero


class WValuationViolated(CheckFailed):
    pass


class NoPolynomialSolution(CheckFailed):
    pass


class NonUniqueSolution(MsplabError):
    pass


class NeitherReadingMatches(CheckFailed):
    pass


class DegreeBoundViolated(CheckFailed):
    pass


class ConstantMismatch(CheckFailed):
    pass


class ExpansionWindowViolated(CheckFailed):
    pass


class VanishingPatternViolated(CheckFailed):
    pass


class MembershipFailed(CheckFailed):
    pass


class InsufficientOrder(MsplabError):
    pass


class GuardFailed(CheckFailed):
    pass


class SchemaMismatch(MsplabError):
    """A cache file could not be trusted and must be recomputed."""
