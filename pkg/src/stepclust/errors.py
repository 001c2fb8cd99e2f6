"""Exception hierarchy shared by all modules."""


class StepClustError(Exception):
    """Base class for every error raised by the package."""


class ValidationError(StepClustError, ValueError):
    """Input data or configuration failed validation (CLI exit code 2)."""


class ParseError(ValidationError):
    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(ValidationError):
    pass


class ContractError(StepClustError, ValueError):
    """A caller violated an operation's precondition."""


class DegenerateDayError(StepClustError):
    """Quantiles requested for a day whose total activity is zero."""


class FitError(StepClustError):
    pass


class InsufficientDataError(FitError):
    pass


class DegenerateVarianceError(FitError):
    pass


class StageError(StepClustError):
    """Wraps an error raised inside a pipeline stage, naming the stage."""

    def __init__(self, stage, cause):
        super().__init__(f"[{stage}] {type(cause).__name__}: {cause}")
        self.stage = stage
        self.cause = cause
