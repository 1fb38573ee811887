"""Exception types shared across the package."""

from __future__ import annotations


class GroupMismatchError(ValueError):
    """Operands live on different groups."""


class DimensionMismatchError(ValueError):
    """Matrix/vector shapes are incompatible for the requested operation."""


class FrameConditionError(ValueError):
    """A stability precondition (frame or Riesz) is violated.

    Carries the determinant infimum that failed the test so callers can
    report how far the system is from stability.
    """

    def __init__(self, message: str, *, delta: float | None = None,
                 tol: float | None = None) -> None:
        super().__init__(message)
        self.delta = delta
        self.tol = tol


class SingularCharacterError(ValueError):
    """A per-character matrix is singular; lists the offending characters."""

    def __init__(self, message: str, characters: list[tuple[int, ...]]) -> None:
        super().__init__(message)
        self.characters = characters


class CapExceededError(RuntimeError):
    """A dense brute-force computation would exceed the configured size cap."""


class SchemaError(ValueError):
    """A scenario configuration failed validation."""
