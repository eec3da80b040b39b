"""Exception types shared across the toolkit."""


class SiegelBasinError(Exception):
    """Base class for all domain errors."""


class RationalRotation(SiegelBasinError):
    """The rotation-number source is rational (CF terminates)."""


class NeedMoreQuotients(SiegelBasinError):
    """The convergent list is too short for the requested computation."""

    def __init__(self, msg, max_harmonic_mean=None):
        super().__init__(msg)
        self.max_harmonic_mean = max_harmonic_mean


class InvalidArgument(SiegelBasinError):
    pass


class NonzeroConstantTerm(SiegelBasinError):
    pass


class NotInvertible(SiegelBasinError):
    pass


class SmallDivisorBreakdown(SiegelBasinError):
    """A divisor lambda0^m - lambda0 fell below the double-precision cutoff."""

    def __init__(self, msg, m=None):
        super().__init__(msg)
        self.m = m


class LinearizationUnusable(SiegelBasinError):
    pass


class OutsideModel(SiegelBasinError):
    """A point left the validated disk of the linearization."""


class DerivativeVanishes(SiegelBasinError):
    pass


class OutsideDomain(SiegelBasinError):
    pass


class DegeneratePerturbation(SiegelBasinError):
    pass


class PoleInModulus(SiegelBasinError):
    pass


class NotInBasin(SiegelBasinError):
    pass


class InvalidMultiplier(SiegelBasinError):
    pass


class OriginNotAttracted(SiegelBasinError):
    pass
