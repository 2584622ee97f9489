"""Exception types shared across the package."""


class FermatoscError(Exception):
    """Base class for all package-specific errors."""


class DegreeMismatch(FermatoscError):
    """Operands belong to tower fields with different degree parameters."""


class ZeroInput(FermatoscError):
    """Inversion of the zero element was requested."""


class ZeroDivisor(FermatoscError):
    """A nonzero, non-invertible element was found.

    Carries the discovered factor of the modulus, which certifies that the
    quotient ring is not a field.
    """

    def __init__(self, message, factor=None):
        super().__init__(message)
        self.factor = factor


class NotOnCurve(FermatoscError):
    """The point does not lie on the curve."""


class SingularPoint(FermatoscError):
    """The gradient vanishes at the point, so no smooth branch exists."""


class TruncationExhausted(FermatoscError):
    """A series valuation exceeded the escalation cap."""


class GenericityFailure(FermatoscError):
    """A random coordinate change failed a genericity requirement; retry."""


class ResultantZero(FermatoscError):
    """The resultant vanishes identically (shared component)."""


class HessianVanishes(FermatoscError):
    """The Hessian vanishes at the point, so the conic formula degenerates."""


class NonOrdinary(FermatoscError):
    """A census entry is not an ordinary singularity."""


class NoFixedLine(FermatoscError):
    """The automorphism fixes no line pointwise."""


class FewerPoints(FermatoscError):
    """A grid line was expected but the line carries too few special points."""


class CertificationFailure(FermatoscError):
    """An exact certificate did not hold; carries the offending value."""

    def __init__(self, message, witness=None):
        super().__init__(message)
        self.witness = witness
