"""Exact computations with finite categories, presheaves and categories enriched in presheaves."""
from __future__ import annotations

__version__ = "0.1.0"

from .errors import AuditError, BaseMismatchError, BudgetExceededError, NotComposableError, StrictCatError, UnknownObjectError
from .fincat import CatFunctor, FinCat
from .presheaf import Presheaf, PshMap

__all__ = [
    "__version__",
    "FinCat",
    "CatFunctor",
    "Presheaf",
    "PshMap",
    "StrictCatError",
    "AuditError",
    "BaseMismatchError",
    "BudgetExceededError",
    "NotComposableError",
    "UnknownObjectError",
]
