"""Exception types shared across the package."""


class MospError(Exception):
    """Base class for every error raised by this package."""


class GraphError(MospError):
    """Structural or invariant violation in a graph, route, or cost vector."""


class GraphFormatError(GraphError):
    """Malformed graph file. Carries the offending line number when known."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ConfigError(MospError):
    """Invalid experiment or command-line configuration."""
