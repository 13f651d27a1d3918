"""Exception types shared across the package."""


class TraceSynthError(Exception):
    """Base class for every error raised by tracesynth."""


class ValidationError(TraceSynthError, ValueError):
    """Malformed alphabet, automaton, distribution or instance file."""


class CapExceeded(TraceSynthError, RuntimeError):
    """A bounded exploration reached more states than its cap allows."""

    def __init__(self, cap: int, what: str = "global states"):
        super().__init__(f"exploration exceeded cap of {cap} {what}")
        self.cap = cap
