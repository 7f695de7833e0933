"""Exception hierarchy shared by all modules and mapped to CLI exit codes."""


class FucikError(Exception):
    """Base class for errors raised by this package."""


class ValidationError(FucikError, ValueError):
    """Input rejected before any computation. CLI exit code 2."""

    exit_code = 2


class InvalidEps(ValidationError):
    pass


class ZeroEigenvalue(ValidationError):
    pass


class NeighborUnresolved(ValidationError):
    pass


class DomainError(ValidationError):
    pass


class RegionError(ValidationError):
    pass


class ConditioningFailure(ValidationError):
    pass


class HypothesisViolated(ValidationError):
    """A sampled monotonicity hypothesis failed.

    ``witness`` holds the ``(s, t, u)`` triple where the worst difference
    quotient was observed.
    """

    def __init__(self, message, witness=None, report=None):
        super().__init__(message)
        self.witness = witness
        self.report = report


class BracketFailure(HypothesisViolated):
    pass


class NoConvergence(FucikError):
    """Raised only on request; solvers normally return a flagged result."""

    exit_code = 3

    def __init__(self, message, result=None):
        super().__init__(message)
        self.result = result


class IntegratorFailure(FucikError):
    exit_code = 1


class ParseError(FucikError, ValueError):
    exit_code = 4

    def __init__(self, message, position):
        super().__init__(f"{message} at offset {position}")
        self.position = position
