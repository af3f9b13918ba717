from __future__ import annotations

__all__ = [
    "DomainError",
    "ResourceLimitError",
    "ConvergenceError",
    "UnknownScenarioError",
]


class DomainError(ValueError):
    """Input outside the domain of an operation."""


class ResourceLimitError(RuntimeError):
    """A configured work budget would be exceeded."""


class ConvergenceError(ArithmeticError):
    """An iterative numeric method failed to converge."""


class UnknownScenarioError(KeyError):
    """Lookup of a scenario name that does not exist."""
