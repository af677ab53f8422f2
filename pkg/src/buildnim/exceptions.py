"""Exception hierarchy shared by the solver, strategies and CLI."""


class BuildingNimError(Exception):
    """Base class for all package errors."""


class InvalidInput(BuildingNimError, ValueError):
    """Malformed position, parameter set or argument tuple."""


class BudgetExceeded(BuildingNimError):
    """A table would not fit in the configured memory budget."""

    def __init__(self, message: str, estimate_bytes: int = 0):
        super().__init__(message)
        self.estimate_bytes = estimate_bytes


class TableFormatError(BuildingNimError):
    """A tablebase file is truncated, corrupted or of an unknown version."""


class ParamsMismatch(BuildingNimError):
    """A table was built for different parameters than the caller asked for."""


class MissingGrundy(BuildingNimError):
    """Grundy data was requested from an outcome-only table."""


class StrategyRefusal(BuildingNimError):
    """A scripted strategy cannot continue from the position it was given.

    ``case`` names the strategy rule whose precondition failed.
    """

    def __init__(self, message: str, case: str = "precondition"):
        super().__init__(f"[{case}] {message}")
        self.case = case
