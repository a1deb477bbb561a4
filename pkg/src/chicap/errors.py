"""Exception types raised across the package."""


class ChicapError(Exception):
    """Base class for all package errors."""


class ValidationError(ChicapError, ValueError):
    """Input does not satisfy a documented precondition."""


class NonHermitianInput(ValidationError):
    pass


class NotADensityOperator(ValidationError):
    pass


class DimensionMismatch(ValidationError):
    pass


class InvalidProjector(ValidationError):
    pass


class NormalizationError(ValidationError):
    pass


class InvalidRange(ValidationError):
    pass


class IndexOutOfRange(ValidationError, IndexError):
    pass


class UnsupportedTailClass(ChicapError):
    pass


class TailBoundFailure(ChicapError):
    """Series could not be enclosed tightly enough within the term budget.

    The best interval found is kept on ``interval``.
    """

    def __init__(self, message, interval=None):
        super().__init__(message)
        self.interval = interval


class RootBracketFailure(ChicapError):
    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class NoSolutionYet(ChicapError):
    pass


class WrongCase(ChicapError):
    pass


class DegenerateChannel(ChicapError):
    pass


class NotConverged(ChicapError):
    """Iteration budget exhausted; ``report`` holds the best iterate."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class AscentViolation(ChicapError, ArithmeticError):
    pass
