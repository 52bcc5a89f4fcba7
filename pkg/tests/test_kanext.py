from __future__ import annotations

import pytest

from strictcat.errors import StrictCatError
from strictcat.fincat import CatFunctor, delta_truncated, identity_functor, iter_functors, ordinal, slice_coslice, terminal_cat
from strictcat.generate import random_category, random_presheaf
from strictcat.kanext import (
    NamedFunctorSpec,
    d_simplicial,
    diag_ran,
    fdiag,
    lan,
    lan_counit,
    lan_map,
    lan_unit,
    op,
    ran,
    ran_counit,
    ran_map,
    ran_unit,
    realize,
    realize_by_chains,
    restrict,
    restrict_map,
    und,
    val,
    vemb,
    vemb_space,
)
from strictcat.presheaf import PshMap, coproduct, count_maps, find_iso, initial, nerve, representable


def _random_functor(rng, A, B):
    Fs = list(iter_functors(A, B))
    return rng.choice(Fs) if Fs else None


def test_restrict_along_identity_is_identity(rng):
    C = random_category(rng, max_objects=3, max_morphisms=7)
    X = random_presheaf(rng, C, 3)
    Y = restrict(identity_functor(C), X)
    assert Y.elems == X.elems and Y.action == X.action


def test_lan_ran_along_identity(rng):
    D = delta_truncated(2)
    for _ in range(5):
        X = random_presheaf(rng, D, 3)
        one = identity_functor(D)
        assert find_iso(lan(one, X), X) is not None
        assert find_iso(ran(one, X), X) is not None


def test_und_of_representable_is_a_copower():
    D = ordinal(1)
    B = d_simplicial(D, 2)
    for d in D.objects:
        for d2 in D.objects:
            for n in range(3):
                U = und(representable(B, (d, n)), d2, D, 2)
                k = len(D.hom(D.index(d2), D.index(d)))
                expect = coproduct(*[representable(delta_truncated(2), n)] * k).obj if k else initial(delta_truncated(2))
                assert find_iso(U, expect) is not None


def test_fdiag_is_pointwise_lookup(rng):
    D = ordinal(1)
    N = 1
    from strictcat.kanext import d_bisimplicial

    DB = d_bisimplicial(D, N)
    X = random_presheaf(rng, DB, 2)
    Y = fdiag(X, D, N)
    for x in Y.base.objects:
        d, l = x
        assert Y.at(x) == X.at((d, l, l))


def test_lan_of_representable_is_representable(rng):
    for _ in range(8):
        A = random_category(rng, max_objects=3, max_morphisms=6)
        B = random_category(rng, max_objects=3, max_morphisms=6)
        F = _random_functor(rng, A, B)
        if F is None:
            continue
        for c in range(A.n_objects):
            L = lan(F, representable(A, A.objects[c]))
            assert find_iso(L, representable(B, B.objects[F.obj_map[c]])) is not None


def test_restrict_ran_adjunction_counts(rng):
    done = 0
    while done < 8:
        A = random_category(rng, max_objects=2, max_morphisms=4, max_set=2)
        B = random_category(rng, max_objects=2, max_morphisms=4, max_set=2)
        F = _random_functor(rng, A, B)
        if F is None:
            continue
        X = random_presheaf(rng, B, 2)
        Y = random_presheaf(rng, A, 2)
        assert count_maps(restrict(F, X), Y) == count_maps(X, ran(F, Y))
        assert count_maps(lan(F, Y), X) == count_maps(Y, restrict(F, X))
        done += 1


def _triangles(F, X, Y):
    # lan ⊣ restrict: ε_{Lan X} ∘ Lan(η_X) = id and F*(ε_Y) ∘ η_{F*Y} = id
    L = lan(F, X)
    assert lan_map(F, lan_unit(F, X)).then(lan_counit(F, L)) == PshMap.identity(L)
    R = restrict(F, Y)
    assert lan_unit(F, R).then(restrict_map(F, lan_counit(F, Y))) == PshMap.identity(R)
    # restrict ⊣ ran: ε_{F*Y} ∘ F*(η_Y) = id and Ran(ε_X) ∘ η_{Ran X} = id
    assert restrict_map(F, ran_unit(F, Y)).then(ran_counit(F, R)) == PshMap.identity(R)
    RX = ran(F, X)
    assert ran_unit(F, RX).then(ran_map(F, ran_counit(F, X))) == PshMap.identity(RX)


def test_triangle_identities(rng):
    done = 0
    while done < 10:
        A = random_category(rng, max_objects=3, max_morphisms=6, max_set=2)
        B = random_category(rng, max_objects=3, max_morphisms=6, max_set=2)
        F = _random_functor(rng, A, B)
        if F is None:
            continue
        _triangles(F, random_presheaf(rng, A, 2), random_presheaf(rng, B, 2))
        done += 1


def test_fdiag_vemb_is_identity(rng):
    for _ in range(6):
        D = random_category(rng, max_objects=2, max_morphisms=4, max_set=2)
        B = d_simplicial(D, 1)
        A = random_presheaf(rng, B, 2)
        back = fdiag(vemb_space(A, D, 1), D, 1)
        assert back.sizes == A.sizes
        assert back.action == A.action


def test_diag_ran_on_constant_input():
    D = ordinal(1)
    A0 = representable(D, 1)
    A = vemb(A0, D, 1)  # constant in the simplicial direction
    R = diag_ran(A, D, 1)
    for d in D.objects:
        for k in range(2):
            assert len(R.at((d, k, k))) == len(A.at((d, k)))


def test_val_and_op():
    D = ordinal(1)
    B = d_simplicial(D, 2)
    X = representable(B, (1, 2))
    assert val(X, 0, D, 2).sizes == tuple(len(D.hom(d, 1)) * 3 for d in range(2))
    O = op(X, D, 2)
    assert find_iso(O, X) is not None  # Δ[n] is self-dual
    assert op(O, D, 2).action == X.action


def test_realize_representable_is_slice_nerve(rng):
    for _ in range(5):
        D = random_category(rng, max_objects=3, max_morphisms=6)
        for d in range(D.n_objects):
            R, comps = realize(representable(D, D.objects[d]), 2)
            S, _ = slice_coslice(D, D.objects[d], "over")
            assert find_iso(R, nerve(S, 2)) is not None
            assert comps == 1


def test_realize_sizes_agree_with_chain_count(rng):
    D = random_category(rng, max_objects=3, max_morphisms=6)
    X = random_presheaf(rng, D, 3)
    R, _ = realize(X, 2)
    assert list(R.sizes) == realize_by_chains(X, 2)


def test_realize_empty():
    R, comps = realize(initial(ordinal(1)), 2)
    assert R.sizes == (0, 0, 0)
    assert comps == 0


@pytest.mark.parametrize("text", ["bogus", "und", "val"])
def test_bad_named_functor(text):
    with pytest.raises(StrictCatError):
        NamedFunctorSpec.parse(text)


def test_named_functor_parse():
    assert NamedFunctorSpec.parse("und:d2") == NamedFunctorSpec("und", "d2")
    assert NamedFunctorSpec.parse("fdiag").tag == "diag_restrict"
    assert NamedFunctorSpec.parse("val:1").param == 1


def test_kan_over_terminal_source():
    P = ordinal(1)
    F = CatFunctor(terminal_cat(), P, [1], [P.identity[1]])
    X = representable(terminal_cat(), terminal_cat().objects[0])
    assert lan(F, X).sizes == representable(P, 1).sizes
    # ran along the inclusion of 1: every object maps into 1, so the extension is terminal
    assert ran(F, X).sizes == (1, 1)
