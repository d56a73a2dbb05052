"""Exception types raised across the package."""


class InvalidInputError(ValueError):
    """An argument violates a documented precondition."""


class BudgetExhaustedError(RuntimeError):
    """The unlabeled pool cannot supply the requested labeling budget."""


class GenerationError(RuntimeError):
    """A synthetic dataset could not be generated with the given parameters."""


class DatasetParseError(ValueError):
    """A dataset file is malformed.

    ``line`` is the 1-based line number of the offending row, when known.
    """

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(ValueError):
    """An experiment configuration is invalid; ``field`` names the bad key."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
