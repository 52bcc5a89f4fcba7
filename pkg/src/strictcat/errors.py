from __future__ import annotations


class StrictCatError(ValueError):
    """Base class for every error raised by this package."""


class UnknownObjectError(StrictCatError, KeyError):
    def __init__(self, label, where="category"):
        super().__init__(f"unknown object {label!r} in {where}")
        self.label = label

    def __str__(self):
        return self.args[0]


class NotComposableError(StrictCatError):
    pass


class BaseMismatchError(StrictCatError):
    pass


class AuditError(StrictCatError):
    """An axiom check failed; ``axiom`` names it and ``witness`` pins the failure."""

    def __init__(self, axiom, witness, message=None):
        self.axiom = axiom
        self.witness = witness
        super().__init__(message or f"{axiom} violated at {witness!r}")


class BudgetExceededError(StrictCatError):
    def __init__(self, what, budget):
        self.what = what
        self.budget = budget
        super().__init__(f"{what} exceeds budget of {budget}")
