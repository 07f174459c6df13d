"""Exception types shared across the package."""


class MetricLawError(Exception):
    """Base class for package-specific failures."""


class InvalidSpaceError(MetricLawError, ValueError):
    """A distance vector or matrix violates a structural invariant."""


class FormulaParseError(MetricLawError, ValueError):
    """Formula text rejected, with source position."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{message} (line {line}, column {column})")
        self.line = line
        self.column = column


class UnboundVariableError(MetricLawError, LookupError):
    """Evaluation met a variable with no binding."""

    def __init__(self, name: str):
        super().__init__(f"unbound variable {name!r}")
        self.name = name


class ResourceLimitError(MetricLawError, RuntimeError):
    """A configured search or sampling budget was exhausted."""


class RejectionBudgetError(ResourceLimitError):
    """A rejection sampler ran out of attempts."""


class GameBudgetError(ResourceLimitError):
    """A game solve would exceed the configured state budget."""


class StrategyUnavailableError(MetricLawError, RuntimeError):
    """Strategy extraction was requested for a game that player II loses."""
