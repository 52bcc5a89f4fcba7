from __future__ import annotations

import itertools
import random

import pytest

from strictcat.enriched import (
    EnrichedCat,
    constant_functor,
    d_nerve,
    enriched_nat,
    from_nerve,
    iter_enriched_functors,
    nat_set,
    nerve_map,
    nerve_roundtrip,
    representable_functor,
    strict_segal_check,
    und_levelwise,
    yoneda_map,
)
from strictcat.errors import AuditError
from strictcat.fincat import delta_truncated, ordinal, terminal_cat
from strictcat.generate import random_enriched, random_presheaf
from strictcat.presheaf import PshMap, count_maps, find_iso, representable, spine


def test_generated_enriched_categories_validate(rng):
    for _ in range(15):
        random_enriched(rng).validate()


def test_broken_composition_is_rejected(rng):
    while True:
        C = random_enriched(rng)
        key = next((k for k, t in C.comp.items() if any(len(set(row)) > 1 for row in t)), None)
        if key is not None:
            break
    d = next(i for i, row in enumerate(C.comp[key]) if len(set(row)) > 1)
    rows = [list(r) for r in C.comp[key]]
    rows[d] = [rows[d][0]] * len(rows[d])
    comp = dict(C.comp)
    comp[key] = rows
    bad = EnrichedCat(C.index, C.objects, C.hom, comp, C.unit)
    with pytest.raises(AuditError):
        bad.validate()


def test_und_levelwise_hom_sizes(rng):
    for _ in range(10):
        C = random_enriched(rng)
        cats, functors = und_levelwise(C)
        for d, L in enumerate(cats):
            L.validate()
            for x in range(C.n_objects):
                for y in range(C.n_objects):
                    assert len(L.hom(x, y)) == C.hom[(x, y)].size(d)
        for F in functors.values():
            F.validate()
            assert list(F.obj_map) == list(range(C.n_objects))


def test_und_of_terminal_enriched_category():
    D = ordinal(1)
    C = EnrichedCat.discrete_on(D, terminal_cat()).validate()
    cats, _ = und_levelwise(C)
    assert [(L.n_objects, L.n_morphisms) for L in cats] == [(1, 1), (1, 1)]


def test_nerve_level_zero_is_constant(rng):
    for _ in range(8):
        C = random_enriched(rng)
        N = d_nerve(C, 2)
        B = N.base
        D = C.index
        for d in D.objects:
            assert N.size(B.index((d, 0))) == C.n_objects
        for m in range(B.n_morphisms):
            if B.objects[B.src[m]][1] == 0 and B.objects[B.tgt[m]][1] == 0:
                assert list(N.action[m]) == list(range(C.n_objects))


def test_one_object_nerve_counts(rng):
    for _ in range(6):
        C = random_enriched(rng, max_objects=1)
        N = d_nerve(C, 3)
        H = C.hom[(0, 0)]
        for d in range(C.index.n_objects):
            for k in range(4):
                assert N.size(N.base.index((C.index.objects[d], k))) == H.size(d) ** k


def test_nerve_of_interval_over_point():
    C = EnrichedCat.discrete_on(terminal_cat(), ordinal(1))
    assert d_nerve(C, 2).sizes == (2, 3, 4)


def test_nerves_are_segal(rng):
    for _ in range(10):
        assert strict_segal_check(d_nerve(random_enriched(rng), 3)).passed


def test_spine_fails_segal():
    r = strict_segal_check(spine(2, 2)[0])
    assert not r.passed
    assert r.witness["n"] == 2
    assert r.witness["kind"] == "not surjective"
    assert r.witness["counts"] == [7, 8]


def test_representables_are_segal():
    D = delta_truncated(3)
    for n in range(4):
        assert strict_segal_check(representable(D, n)).passed


def test_nerve_roundtrip(rng):
    for _ in range(8):
        C = random_enriched(rng)
        F = nerve_roundtrip(C, 3).validate()
        assert F.is_iso()
        assert from_nerve(d_nerve(C, 2)).n_objects == C.n_objects


def test_functors_biject_with_nerve_maps(rng):
    for _ in range(6):
        C = random_enriched(rng, max_objects=2)
        E = random_enriched(rng, C.index, max_objects=2)
        fs = list(iter_enriched_functors(C, E))
        maps = {nerve_map(F, 2).components for F in fs}
        assert len(maps) == len(fs) == count_maps(d_nerve(C, 2), d_nerve(E, 2))


def test_yoneda(rng):
    for _ in range(6):
        C = random_enriched(rng, max_objects=2)
        G = constant_functor(C, random_presheaf(rng, C.index, 2)).validate()
        for c in C.objects:
            for H in (representable_functor(C, c).validate(), G):
                U = enriched_nat(representable_functor(C, c), H)
                assert find_iso(U, H.values[C.obj(c)]) is not None
                assert yoneda_map(C, c, H).validate().is_iso()


def _brute_nat(F, G) -> int:
    # plain Nat(F, G) over a terminal index: every tuple of component functions, filtered
    C = F.C
    n = C.n_objects
    per = [list(itertools.product(range(G.values[c].size(0)), repeat=F.values[c].size(0))) for c in range(n)]
    count = 0
    for comps in itertools.product(*per):
        if all(
            comps[c2][F.apply(0, c, c2, a, f)] == G.apply(0, c, c2, comps[c][a], f)
            for c in range(n)
            for c2 in range(n)
            for a in range(F.values[c].size(0))
            for f in range(C.hom[(c, c2)].size(0))
        ):
            count += 1
    return count


def test_nat_count_matches_brute_force(seed):
    rng = random.Random(seed)
    for _ in range(8):
        C = random_enriched(rng, terminal_cat(), max_objects=2)
        reps = [representable_functor(C, c) for c in C.objects]
        consts = [constant_functor(C, random_presheaf(rng, C.index, 2)) for _ in range(2)]
        for F in reps + consts:
            for G in reps + consts:
                assert len(nat_set(F, G)) == _brute_nat(F, G)
                assert enriched_nat(F, G).size(0) == _brute_nat(F, G)


def test_identity_is_natural(rng):
    C = random_enriched(rng, max_objects=2)
    F = representable_functor(C, C.objects[0])
    ident = tuple(tuple(tuple(range(F.values[c].size(d))) for d in range(C.index.n_objects)) for c in range(C.n_objects))
    assert ident in nat_set(F, F)


def test_compose_map_is_a_presheaf_map(rng):
    C = random_enriched(rng)
    for x, y, z in itertools.product(range(C.n_objects), repeat=3):
        m = C.compose_map(x, y, z)
        assert isinstance(m, PshMap)
        m.validate()
