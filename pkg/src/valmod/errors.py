"""Exception types shared across the package."""


class ValmodError(Exception):
    """Base class for all errors raised by this package."""


class ParameterError(ValmodError, ValueError):
    """A caller-supplied parameter violates a precondition."""


class ParseError(ValmodError, ValueError):
    """Series ingestion failed; carries the 1-based line number when known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class EngineError(ValmodError, RuntimeError):
    """Internal inconsistency in the discovery engine (a bug, not bad input)."""
