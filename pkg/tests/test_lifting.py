from __future__ import annotations

import random
from collections import Counter

import pytest

from strictcat.errors import BudgetExceededError, StrictCatError
from strictcat.fincat import delta_truncated, iter_functors
from strictcat.generate import random_category, random_enriched, random_map, random_mono, random_presheaf
from strictcat.groth import OpfibCandidate, classify_opfib, coslice_nerve
from strictcat.lifting import (
    LiftingProblem,
    _count_fillers,
    attach_cells,
    default_budget,
    has_rlp,
    initial_vertex_maps,
    iter_squares,
    left_fib_check,
    product_map,
    pullback_exponential,
    pushout_product,
    right_fib_check,
    solve,
)
from strictcat.presheaf import (
    PshMap,
    boundary,
    exponential,
    exp_map,
    find_iso,
    from_initial,
    functor_nerve,
    iter_maps,
    representable,
    representable_map,
    spine,
    to_terminal,
)

D1 = delta_truncated(1)
D2 = delta_truncated(2)


def _filler_profile(f: PshMap, p: PshMap) -> Counter:
    return Counter(_count_fillers(f, p, top, bottom, 10**6) for top, bottom in iter_squares(f, p))


def _draw_map(rng, B, mono=False):
    while True:
        X = random_presheaf(rng, B, 2)
        if mono:
            return random_mono(rng, X)
        Y = random_presheaf(rng, B, 2)
        m = random_map(rng, X, Y)
        if m is not None:
            return m


def test_pushout_product_with_empty_source(rng):
    A = random_presheaf(rng, D2, 2)
    g = _draw_map(rng, D2)
    box = pushout_product(from_initial(A), g).validate()
    AxG, _, _ = product_map(PshMap.identity(A), g)
    assert find_iso(box.source, AxG.source) is not None
    assert box.target.sizes == AxG.target.sizes


def test_boundary_box_boundary():
    b = boundary(2, 1)
    box = pushout_product(b, b).validate()
    assert box.source.sizes == (4, 8, 12)
    assert box.target.sizes == (4, 9, 16)
    assert box.is_mono()


def test_pushout_product_is_symmetric(rng):
    for _ in range(4):
        f, g = _draw_map(rng, D1), _draw_map(rng, D1)
        a, b = pushout_product(f, g), pushout_product(g, f)
        assert find_iso(a.source, b.source) is not None
        assert a.target.sizes == b.target.sizes


def test_exp_against_terminal(rng):
    f = _draw_map(rng, D1)
    Y = random_presheaf(rng, D1, 2)
    e = pullback_exponential(f, to_terminal(Y)).validate()
    YB, YA = exponential(f.target, Y), exponential(f.source, Y)
    assert find_iso(e.source, YB.obj) is not None
    assert find_iso(e.target, YA.obj) is not None
    assert e.source.sizes == exp_map(YB, YA, f=f).source.sizes


def test_exp_of_identity(rng):
    p = _draw_map(rng, D1)
    A = random_presheaf(rng, D1, 2)
    e = pullback_exponential(PshMap.identity(A), p)
    # Y^A -> Y^A ×_{X^A} X^A ≅ Y^A: the comparison is an isomorphism
    assert e.is_iso()


def _inclusions(rng):
    pool = [
        boundary(1, 1),
        representable_map(D1, D1.find(0, 1, (0,))),
        representable_map(D1, D1.find(0, 1, (1,))),
    ]
    return pool + [random_mono(rng, random_presheaf(rng, D1, 3)) for _ in range(3)]


def test_currying_preserves_filler_counts(seed):
    rng = random.Random(seed)
    pool = _inclusions(rng)
    nontrivial = 0
    for _ in range(8):
        f, g = rng.choice(pool), rng.choice(pool)
        p = _draw_map(rng, D1)
        left = _filler_profile(pushout_product(f, g), p)
        right = _filler_profile(g, pullback_exponential(f, p))
        assert left == right
        nontrivial += len(left) > 1 or any(k != 1 for k in left)
    assert nontrivial


def test_identity_always_lifts(rng):
    for _ in range(5):
        p = _draw_map(rng, D2)
        A = random_presheaf(rng, D2, 2)
        assert has_rlp(p, PshMap.identity(A), "unique").holds


def test_nerve_unique_lifting_matches_classification(seed):
    rng = random.Random(seed)
    seen = Counter()
    tries = 0
    while sum(seen.values()) < 20 and tries < 200:
        tries += 1
        C = random_category(rng, max_objects=3, max_morphisms=6)
        E = random_category(rng, max_objects=3, max_morphisms=6)
        Fs = list(iter_functors(E, C))
        if not Fs:
            continue
        P = rng.choice(Fs)
        ok = classify_opfib(OpfibCandidate(E, C, P)).ok
        Np = functor_nerve(P, 2)
        unique = all(has_rlp(Np, m, "unique").holds for _, _, m in initial_vertex_maps(Np.base))
        assert ok == unique == left_fib_check(Np).passed
        seen[ok] += 1
    assert seen[True] and seen[False]


def test_coslice_nerve_is_left_fibration(rng):
    for _ in range(5):
        C = random_enriched(rng)
        for c in C.objects:
            assert left_fib_check(coslice_nerve(C, c, 2)).passed


def test_identity_is_left_and_right_fibration(rng):
    X = random_presheaf(rng, D2, 3)
    assert left_fib_check(PshMap.identity(X)).passed
    assert right_fib_check(PshMap.identity(X)).passed


def _fold():
    G, _ = spine(2, 2)
    F1 = representable(D2, 1)
    for comps in iter_maps(G, F1):
        if [F1.elems[0][c] for c in comps[0]] == [(0,), (1,), (1,)]:
            return PshMap(G, F1, comps)
    raise AssertionError("fold map not found")


def test_fold_is_not_a_left_fibration():
    r = left_fib_check(_fold())
    assert not r.passed
    assert r.witness["k"] == 1
    assert (r.witness["source_count"], r.witness["pullback_count"]) == (5, 4)
    assert r.witness["kind"] == "not injective"


def test_lifting_square_must_commute():
    v0 = representable_map(D1, D1.find(0, 1, (0,)))
    v1 = representable_map(D1, D1.find(0, 1, (1,)))
    F1 = v0.target
    bad = LiftingProblem(v0, PshMap.identity(F1), v1, PshMap.identity(F1))
    with pytest.raises(StrictCatError):
        bad.validate()


def test_solve_counts_fillers():
    v0 = representable_map(D1, D1.find(0, 1, (0,)))
    F1 = v0.target
    t = to_terminal(F1)
    top = PshMap(v0.source, F1, [[0], [0]])
    prob = LiftingProblem(v0, t, top, to_terminal(F1)).validate()
    # fillers are maps F[1] -> F[1] sending 0 to 0: the identity and the constant
    assert solve(prob).count == 2


def test_budget_is_enforced():
    f = boundary(2, 2)
    p = to_terminal(representable(D2, 2))
    with pytest.raises(BudgetExceededError):
        has_rlp(p, f, budget=0)


def test_default_budget(monkeypatch):
    monkeypatch.setenv("TOOL_BUDGET", "17")
    assert default_budget() == 17
    monkeypatch.delenv("TOOL_BUDGET")
    assert default_budget() == 10**6


def test_attach_with_no_generators(rng):
    p = _draw_map(rng, D1)
    fac = attach_cells(p, [], 3)
    assert fac.resolved
    assert fac.first == PshMap.identity(p.source)
    assert fac.chain == []


def test_attach_vertex_inclusion():
    v0 = representable_map(D1, D1.find(0, 1, (0,)))
    fac = attach_cells(v0, [v0], 3)
    assert fac.resolved
    assert fac.attached[0] >= 1
    # round one adds a 1-cell over the edge out of the marked vertex
    assert fac.chain[0].target.size(1) > v0.source.size(1)
    assert fac.first.is_mono()
    for g in [v0]:
        assert has_rlp(fac.second, g).holds
    assert fac.second.then(PshMap.identity(v0.target)) == fac.second
    assert fac.first.then(fac.second) == v0
