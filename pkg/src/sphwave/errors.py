"""Exception taxonomy shared across the package."""

__all__ = ["DomainError", "CapacityError"]


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class CapacityError(RuntimeError):
    """A configured resource cap (degree limit, replicate budget) was exceeded."""
