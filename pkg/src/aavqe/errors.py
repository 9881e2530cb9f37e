"""Exception hierarchy shared across the package."""


class AavqeError(Exception):
    """Base class for all package errors."""


class DomainError(AavqeError, ValueError):
    """An argument violates an operation's precondition."""


class ResourceLimitError(AavqeError):
    """A dense representation would exceed the supported size cap."""


class ParseError(AavqeError, ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class GenerationError(AavqeError, RuntimeError):
    """Instance generation ran out of attempts."""


class OptimizationError(AavqeError, RuntimeError):
    """The objective returned a non-finite value."""
