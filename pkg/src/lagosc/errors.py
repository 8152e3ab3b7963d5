"""Exception hierarchy shared by all modules."""

from __future__ import annotations


class LagOscError(Exception):
    """Base class for every error raised by the package."""


class ShapeMismatch(LagOscError, ValueError):
    pass


class NonSymmetric(LagOscError, ValueError):
    pass


class NotPositiveDefinite(LagOscError, ValueError):
    pass


class NotLagrangian(LagOscError, ValueError):
    """A frame fails isotropy or full rank."""


class SingularFactor(LagOscError, ValueError):
    pass


class PreconditionViolated(LagOscError, ValueError):
    pass


class EvaluatorMissing(LagOscError):
    pass


class RefinementExhausted(LagOscError):
    def __init__(self, message: str, segment: tuple[float, float] | None = None):
        super().__init__(message)
        self.segment = segment


class AmbiguousMatching(RefinementExhausted):
    pass


class IllConditioned(LagOscError):
    pass


class ResidualTooLarge(LagOscError):
    pass


class InvalidPartition(LagOscError, ValueError):
    def __init__(self, message: str, segment: int | None = None, condition: str | None = None):
        super().__init__(message)
        self.segment = segment
        self.condition = condition


class ConstructionFailed(LagOscError):
    pass


class NotMonotone(LagOscError, ValueError):
    def __init__(self, message: str, t: float | None = None):
        super().__init__(message)
        self.t = t


class FrameMismatch(LagOscError, ValueError):
    pass


class PartitionNotFound(LagOscError):
    pass


class OutOfRange(LagOscError, ValueError):
    def __init__(self, message: str, rectangle: tuple[int, int, int, int] | None = None):
        super().__init__(message)
        self.rectangle = rectangle


class StepFailure(LagOscError):
    pass
