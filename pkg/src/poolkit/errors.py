"""Exception types shared across the toolkit."""


class PoolkitError(Exception):
    """Base class; ``kind`` is the machine-readable category printed by the CLI."""

    kind = "error"


class InputFormatError(PoolkitError):
    """Malformed input file. Carries the path and, when known, a 1-based line number."""

    kind = "malformed-input"

    def __init__(self, message: str, path=None, line: int | None = None):
        if path is not None and line is not None:
            message = f"{path}:{line}: {message}"
        elif path is not None:
            message = f"{path}: {message}"
        super().__init__(message)
        self.path = path
        self.line = line


class ProviderError(PoolkitError):
    """An embedding or scoring provider failed or returned unusable output."""

    kind = "provider-error"


class LeaseConflictError(PoolkitError):
    """A judgment was submitted for a task not currently leased to that assessor."""

    kind = "conflict"
