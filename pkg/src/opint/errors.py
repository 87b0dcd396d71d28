"""Exception hierarchy shared by all modules."""


class OpintError(Exception):
    """Base class for every error raised by this package."""


class NonEvaluable(OpintError, ValueError):
    """An integrand could not be evaluated (or was not finite) on a required node."""


class DimensionMismatch(OpintError, ValueError):
    pass


class DomainViolation(OpintError, ValueError):
    """A vector was used outside the certified domain of an operator or form."""


class DecompositionFailure(OpintError, RuntimeError):
    pass


class SeparatingSubspaceTooSmall(OpintError, ValueError):
    pass


class ConfigError(OpintError, ValueError):
    pass


class EigSolverFailure(OpintError, RuntimeError):
    pass


class InsufficientBoundaryData(OpintError, ValueError):
    pass


class IndexOutOfRange(OpintError, IndexError):
    pass


class QuadratureFailure(OpintError, RuntimeError):
    """Flagged samples (non-finite or above the a-priori bound) in a transform."""


class ScenarioFailure(OpintError):
    """A scenario check violated its bound; ``report`` holds the full run."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class IoFailure(OpintError, OSError):
    pass
