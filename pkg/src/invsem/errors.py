"""Exception types raised across the package."""


class InvsemError(Exception):
    """Base class for all package errors."""


class InvalidInput(InvsemError, ValueError):
    pass


class CapExceeded(InvsemError):
    pass


class NotInverse(InvalidInput):
    pass


class NotMinimal(InvsemError):
    pass


class UniverseMismatch(InvsemError, ValueError):
    pass


class NonIntegralComposition(InvsemError):
    pass


class ClosureRequired(InvsemError):
    pass


class InvalidWitness(InvsemError):
    pass


class PigeonholeFailed(InvsemError):
    pass


class PreconditionViolated(InvsemError):
    pass


class IterationCapExceeded(InvsemError):
    """Raised when an iteration does not stabilise; `state` keeps the partial result."""

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class NotRegular(InvsemError):
    pass


class ZeroSubspace(InvsemError):
    pass


class BoundaryContamination(InvsemError):
    pass


class ClassConditionUnmet(InvsemError):
    def __init__(self, message, rank=None):
        super().__init__(message)
        self.rank = rank
