"""Shared exception types."""


class BudgetExceededError(RuntimeError):
    """A combinatorial or numerical search ran out of its configured budget."""


class SingularBasisError(ValueError):
    """A basis tuple contains a non-invertible matrix."""
