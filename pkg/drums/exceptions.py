"""Errors raised by the drums library.

Every error is a ``ValueError`` so callers that only care about bad input can
catch that; commands map them onto exit codes.
"""


class IsodrumError(ValueError):
    pass


class CycleParseError(IsodrumError):
    pass


class UnknownPairError(IsodrumError):
    pass


class DimensionMismatch(IsodrumError):
    pass


class PrimePowerError(IsodrumError):
    pass


class GroupTooLarge(IsodrumError):
    pass


class NotTransplantable(IsodrumError):
    pass


class CongruentDomains(IsodrumError):
    """The commutant holds a permutation matrix: the two domains have the same shape."""


class CommutantTooLarge(IsodrumError):
    pass


class NonPlanarDomain(IsodrumError):
    pass


class LoopMismatch(IsodrumError):
    pass


class InvalidPolygonError(IsodrumError):
    pass


class NotGridAligned(IsodrumError):
    pass


class SpectrumTooShort(IsodrumError):
    pass


class EigenSolveError(IsodrumError):
    pass


class PoleProximityError(IsodrumError):
    pass


class EnumerationBudgetExceeded(IsodrumError):
    pass


class ExtensionTooLarge(IsodrumError):
    pass


class IrrationalAngleError(IsodrumError):
    pass
