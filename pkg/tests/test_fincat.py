from __future__ import annotations

import itertools

import pytest

from strictcat.errors import AuditError, NotComposableError, UnknownObjectError
from strictcat.fincat import (
    CatFunctor,
    FinCat,
    compose_functors,
    delta_truncated,
    find_isomorphism,
    identity_functor,
    iter_functors,
    opposite_cat,
    ordinal,
    product_cat,
    slice_coslice,
    terminal_cat,
    theta_construct,
    theta_hom_count,
)
from strictcat.generate import random_category


def _monotone(m: int, n: int) -> list[tuple[int, ...]]:
    return [a for a in itertools.product(range(n + 1), repeat=m + 1) if list(a) == sorted(a)]


def test_delta_zero_is_terminal():
    D = delta_truncated(0)
    assert D.n_objects == 1
    assert D.n_morphisms == 1


def test_delta_hom_sizes_match_monotone_count():
    D = delta_truncated(2)
    for m in range(3):
        for n in range(3):
            assert len(D.hom(m, n)) == len(_monotone(m, n))
    assert len(D.hom(1, 2)) == 6


def test_delta_composition_is_pointwise():
    D = delta_truncated(2)
    g = D.find(1, 2, (0, 2))
    f = D.find(0, 1, (0,))
    gf = D.compose(g, f)
    assert D.labels[gf] == (0,)
    assert (D.src[gf], D.tgt[gf]) == (0, 2)


def test_random_categories_satisfy_axioms(rng):
    for _ in range(25):
        C = random_category(rng)
        C.validate()
        for f in range(C.n_morphisms):
            assert C.compose(C.identity[C.tgt[f]], f) == f
            assert C.compose(f, C.identity[C.src[f]]) == f


def test_missing_pair_is_rejected():
    C = ordinal(1)
    table = dict(C.table)
    pair = next(p for p in table if not C.is_identity(p[0]) or not C.is_identity(p[1]))
    del table[pair]
    bad = FinCat(C.objects, [(C.labels[m], C.src[m], C.tgt[m]) for m in range(C.n_morphisms)], C.identity, table)
    with pytest.raises(AuditError):
        bad.validate()


def test_non_composable_pair_raises():
    C = ordinal(2)
    f = C.find(0, 1, (0, 1))
    with pytest.raises(NotComposableError):
        C.compose(f, f)


def test_unknown_object():
    with pytest.raises(UnknownObjectError):
        ordinal(1).index("nope")


def test_opposite_is_an_involution(rng):
    for _ in range(10):
        C = random_category(rng)
        CC = opposite_cat(opposite_cat(C))
        assert CC.objects == C.objects
        assert CC.labels == C.labels
        assert CC.src == C.src and CC.tgt == C.tgt
        assert CC.table == C.table


def test_opposite_of_interval_swaps_ends():
    I = ordinal(1)
    Iop = opposite_cat(I)
    f = I.find(0, 1, (0, 1))
    assert (Iop.src[f], Iop.tgt[f]) == (1, 0)
    iso = find_isomorphism(Iop, I)
    assert iso is not None
    assert iso.obj_map == (1, 0) or list(iso.obj_map) == [1, 0]


def test_slices_of_interval():
    I = ordinal(1)
    S, p = slice_coslice(I, 1, "over")
    assert find_isomorphism(S, I) is not None
    p.validate()
    U, q = slice_coslice(I, 0, "under")
    assert find_isomorphism(U, I) is not None
    q.validate()
    T, _ = slice_coslice(terminal_cat(), terminal_cat().objects[0], "over")
    assert (T.n_objects, T.n_morphisms) == (1, 1)


def test_product_of_intervals():
    P = product_cat(ordinal(1), ordinal(1))
    P.validate()
    assert (P.n_objects, P.n_morphisms) == (4, 9)


def test_functor_composition_and_identity(rng):
    C = random_category(rng, max_objects=3, max_morphisms=6)
    one = identity_functor(C)
    F = next(iter_functors(C, C))
    G = compose_functors(F, one).validate()
    assert G.obj_map == F.obj_map and G.mor_map == F.mor_map


def test_functor_count_between_ordinals():
    # functors [1] -> [2] are monotone maps {0,1} -> {0,1,2}
    assert sum(1 for _ in iter_functors(ordinal(1), ordinal(2))) == len(_monotone(1, 2))


def test_bad_functor_is_rejected():
    I = ordinal(1)
    F = CatFunctor(I, I, [1, 0], list(range(I.n_morphisms)))
    with pytest.raises(AuditError):
        F.validate()


def test_theta_of_terminal_is_delta():
    T = theta_construct(terminal_cat(), 2)
    T.validate()
    D = delta_truncated(2)
    assert T.n_objects == 3
    assert find_isomorphism(T, D) is not None


def test_theta_hom_example():
    D = delta_truncated(2)
    T = theta_construct(D, 1)
    x, y = T.index((0,)), T.index((1,))
    assert len(T.hom(x, y)) == 4
    assert theta_hom_count(D, (0,), (1,)) == 4


def test_theta_maps_into_point_are_unique():
    D = delta_truncated(1)
    T = theta_construct(D, 2)
    z = T.index(())
    for x in range(T.n_objects):
        assert len(T.hom(x, z)) == 1


def test_connectedness():
    assert ordinal(2).is_connected()
    two = FinCat(["a", "b"], [("1a", 0, 0), ("1b", 1, 1)], [0, 1], {(0, 0): 0, (1, 1): 1})
    assert not two.is_connected()
    assert product_cat(ordinal(1), two).is_connected() is False


def test_random_poset_is_thin(rng):
    from strictcat.generate import random_poset

    for _ in range(10):
        P = random_poset(rng, 4).validate()
        assert all(len(P.hom(x, y)) + len(P.hom(y, x)) <= (2 if x == y else 1) for x in range(4) for y in range(4))
        # transitivity holds by construction of the composition table
        for x, y, z in itertools.product(range(4), repeat=3):
            if P.hom(x, y) and P.hom(y, z):
                assert P.hom(x, z)
