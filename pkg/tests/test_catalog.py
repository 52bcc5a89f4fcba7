from __future__ import annotations

import pytest

from strictcat.catalog import count_categories, hom_matrices, iter_categories, iter_tables
from strictcat.errors import BudgetExceededError
from strictcat.fincat import find_isomorphism


@pytest.mark.parametrize("order,expected", [(1, 1), (2, 2), (3, 7), (4, 35)])
def test_monoid_counts(order, expected):
    # monoids up to isomorphism, a classical enumeration
    cats = [C for C in iter_categories(1, order) if C.n_morphisms == order]
    assert len(cats) == expected


def test_small_catalogue_count():
    # 10 monoids of order <= 3, four 2-object categories, the discrete 3-object one
    assert count_categories(3, 3) == 15


def test_catalogue_has_no_duplicates():
    cats = list(iter_categories(2, 4))
    for i, A in enumerate(cats):
        A.validate()
        for B in cats[i + 1:]:
            assert find_isomorphism(A, B) is None


def test_hom_matrices_are_canonical():
    mats = list(hom_matrices(2, 3))
    # one arrow between two objects is listed once, as the least of its two orientations
    assert ((1, 0), (1, 1)) in mats
    assert ((1, 1), (0, 1)) not in mats
    assert len(mats) == 3


def test_tables_are_valid_categories():
    for C in iter_tables(((2, 1), (0, 1))):
        C.validate()


def test_budget():
    with pytest.raises(BudgetExceededError):
        count_categories(3, 6, budget=10)
