"""Exception types shared across the package."""

from __future__ import annotations


class DesignError(ValueError):
    """An input violates a design invariant.

    ``path`` locates the offending field, e.g. ``"metrics[0].prevalence"``.
    """

    def __init__(self, path: str, reason: str):
        self.path = path
        self.reason = reason
        super().__init__(f"{path}: {reason}" if path else reason)

    def prefixed(self, prefix: str) -> "DesignError":
        if not self.path:
            path = prefix
        elif self.path.startswith("["):
            path = prefix + self.path
        else:
            path = f"{prefix}.{self.path}"
        return DesignError(path, self.reason)


class SizingError(ArithmeticError):
    """A requirement could not be computed for otherwise valid inputs."""
