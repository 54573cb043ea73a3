"""
Error hierarchy for kmsdyn.
Every error carries the exit code the command-line front end reports for it.
"""

from typing import Any, Iterable, Sequence


class KmsdynError(Exception):
    """Base class for all kmsdyn errors."""

    exit_code = 1


class MapSpecError(KmsdynError):
    """A map specification, point literal or weight expression could not be parsed."""

    exit_code = 2

    def __init__(self, message: str, position: int | None = None):
        self.position = position
        if position is not None:
            message = f"{message} (at offset {position})"
        super().__init__(message)


class ConfigError(KmsdynError):
    exit_code = 2


class PreconditionError(KmsdynError):
    """An operation was called outside its domain (pre-periodic point, degree < 2, ...)."""

    exit_code = 2


class InconclusiveError(KmsdynError):
    """The numerics could not decide within the configured horizon or depth."""

    exit_code = 3


class RootFindingError(InconclusiveError):
    def __init__(self, message: str, residuals: Iterable[float] = ()):
        self.residuals = tuple(float(r) for r in residuals)
        worst = max(self.residuals, default=0.0)
        super().__init__(f"{message} (max residual {worst:.3e})")


class BudgetExceeded(InconclusiveError):
    def __init__(self, requested: int, budget: int):
        self.requested = requested
        self.budget = budget
        super().__init__(
            f"backward tree needs {requested} nodes, budget is {budget}"
        )


class UnsupportedClassification(KmsdynError):
    """No classification theorem covers the requested configuration.

    ``summable_orbits`` lists whatever critical classes were numerically
    found to have a summable Poincare series, so callers can still report them.
    """

    exit_code = 4

    def __init__(self, message: str, summable_orbits: Sequence[Any] = ()):
        self.summable_orbits = list(summable_orbits)
        super().__init__(message)


class OutputError(KmsdynError):
    exit_code = 5
