"""Exception hierarchy shared by all modules."""


class RevoluteError(Exception):
    """Base class for errors raised by this package."""


class ParameterDomainError(RevoluteError, ValueError):
    """A family or operation parameter is outside its admissible range."""


class GeometryError(RevoluteError, ValueError):
    """A curve violates a geometric requirement (zero length, F <= 0, ...)."""


class SizeError(RevoluteError, ValueError):
    """A grid has too few nodes for the requested operation."""


class ConditioningError(RevoluteError):
    """The discrete mass form is not positive definite."""


class DegenerateTrialError(RevoluteError, ValueError):
    """A trial function has zero weighted norm."""


class DomainError(RevoluteError, ValueError):
    """An interval is empty or reversed."""


class PipelineOrderError(RevoluteError):
    """A surgery stage received a curve that the previous stage cannot have produced."""


class HomotopyParameterError(RevoluteError):
    """The unrolling homotopy violated one of its invariants.

    Attributes ``s`` and ``t`` locate the first violating sample.
    """

    def __init__(self, message, s=None, t=None):
        super().__init__(message)
        self.s = s
        self.t = t


class HypothesisViolation(RevoluteError):
    """A hypothesis needed by a check does not hold."""


class StageError(RevoluteError):
    """Wraps an error raised inside one pipeline stage."""

    def __init__(self, stage, error):
        super().__init__(f"stage {stage!r} failed: {error}")
        self.stage = stage
        self.error = error
