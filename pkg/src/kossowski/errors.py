"""Exception hierarchy.

Every error raised by the library derives from :class:`ForgeError`.  The two
intermediate classes decide the command-line exit code: precondition
violations map to exit code 2, residual failures to exit code 3.
"""


class ForgeError(Exception):
    """Base class for all library errors."""


class PreconditionError(ForgeError, ValueError):
    """An input violates the contract of the called operation."""


class ResidualError(ForgeError):
    """A computed identity failed to hold within tolerance."""


# jet algebra
class OrderMismatch(PreconditionError):
    pass


class ZeroConstantTerm(PreconditionError):
    pass


class NonPositiveConstantTerm(PreconditionError):
    pass


class NotDivisibleByV(PreconditionError):
    pass


class DivisionObstruction(PreconditionError):
    pass


# metrics
class NotOrthogonal(PreconditionError):
    pass


class NotKOrthogonal(PreconditionError):
    pass


class NoJetSquareRoot(PreconditionError):
    pass


class DegenerateSemiDefinitePoint(PreconditionError):
    pass


class NotSemiDefinite(PreconditionError):
    pass


class EvaluationAtSemiDefinitePoint(PreconditionError):
    pass


# classification
class DegeneratePoint(PreconditionError):
    pass


class PreconditionNotMet(PreconditionError):
    pass


# realization
class ZeroInitialA(PreconditionError):
    pass


class IncompatibleSecondData(ResidualError):
    pass


class SignClash(PreconditionError):
    pass


class NullInitialDirection(PreconditionError):
    pass


class NotAdjusted(PreconditionError):
    pass


# verification
class NoNormal(PreconditionError):
    pass


class MetricMismatch(PreconditionError):
    pass


# distance
class OutOfDomain(PreconditionError):
    pass


class NonPeakPresent(PreconditionError):
    pass
