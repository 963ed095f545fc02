"""Exception classes for the quantum truth-operator library."""

from typing import Optional


class QLogicError(Exception):
    """Base exception for all library errors."""

    exit_code = 2


class ConfigurationError(QLogicError):
    """Raised when there's an error in scenario configuration."""

    def __init__(self, message: str, line: Optional[int] = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigSyntaxError(ConfigurationError):
    """Raised when a config file cannot be parsed or violates the schema."""

    exit_code = 4


class UnknownScenarioError(ConfigurationError):
    """Raised when a config names a scenario that does not exist."""

    exit_code = 3


class NormalizationError(ConfigurationError):
    """Raised when a state violates the unit-norm condition."""

    exit_code = 2


class DimensionMismatchError(ConfigurationError):
    """Raised when vector or operator dimensions are incompatible."""

    exit_code = 5


class BasisError(QLogicError):
    """Raised when eigenvectors are not orthonormal or eigenvalues invalid."""

    pass


class StatementError(QLogicError):
    """Raised when statements cannot be composed as requested."""

    pass


class NoncommutingError(StatementError):
    """Raised when combining statements about noncommuting observables."""

    pass


class ImpossibleOutcomeError(QLogicError):
    """Raised when conditioning on an outcome of zero probability."""

    pass


class UnknownStageError(QLogicError):
    """Raised when selecting on a stage label absent from the trial records."""

    pass


class ConsistencyError(QLogicError):
    """Raised when two computations of the same quantity disagree."""

    pass


class OutputError(QLogicError):
    """Raised when a report cannot be written."""

    exit_code = 6


class ScenarioError(QLogicError):
    """Raised when a scenario fails; wraps the underlying library error."""

    exit_code = 7

    def __init__(self, scenario: str, error: Exception):
        self.scenario = scenario
        self.error = error
        super().__init__(f"scenario '{scenario}' failed: {error}")
