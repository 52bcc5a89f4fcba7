"""Exhaustive enumeration of small finite categories up to isomorphism.

Categories are generated from a hom-size matrix (canonical under object
permutations) by backtracking over composition tables with associativity
checked as soon as every value in a triple is known, then deduplicated by
an invariant followed by an explicit isomorphism search.
"""
from __future__ import annotations

import itertools
from collections.abc import Iterator

from .errors import BudgetExceededError
from .fincat import FinCat, find_isomorphism

__all__ = ["hom_matrices", "iter_tables", "iter_categories", "count_categories", "invariant"]


def hom_matrices(n: int, max_morphisms: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Hom-size matrices with nonzero diagonal and total ``<= max_morphisms``,
    one per orbit under simultaneous permutation of rows and columns."""
    cells = [(i, j) for i in range(n) for j in range(n)]
    perms = list(itertools.permutations(range(n)))

    def rec(k, left, vals):
        if k == len(cells):
            M = tuple(tuple(vals[i * n + j] for j in range(n)) for i in range(n))
            if all(_permuted(M, p) >= M for p in perms):
                yield M
            return
        i, j = cells[k]
        lo = 1 if i == j else 0
        for v in range(lo, left + 1):
            yield from rec(k + 1, left - v, vals + [v])

    yield from rec(0, max_morphisms, [])


def _permuted(M, p):
    n = len(M)
    return tuple(tuple(M[p[i]][p[j]] for j in range(n)) for i in range(n))


def iter_tables(M: tuple[tuple[int, ...], ...], *, budget: list[int] | None = None) -> Iterator[FinCat]:
    """All categories with hom sizes ``M`` (labelled, not yet up to iso).

    Morphism ``k`` of ``hom(i, j)`` is labelled ``(i, j, k)``; ``(i, i, 0)`` is the identity.
    ``budget`` is a one-element list of remaining search nodes, decremented in place.
    """
    n = len(M)
    mors = [(i, j, k) for i in range(n) for j in range(n) for k in range(M[i][j])]
    mid = {m: t for t, m in enumerate(mors)}
    src = [m[0] for m in mors]
    tgt = [m[1] for m in mors]
    ident = [mid[(i, i, 0)] for i in range(n)]
    is_id = [m[2] == 0 and m[0] == m[1] for m in mors]
    hom = {(i, j): [mid[(i, j, k)] for k in range(M[i][j])] for i in range(n) for j in range(n)}
    pairs = [
        (g, f) for f in range(len(mors)) for g in range(len(mors))
        if tgt[f] == src[g] and not is_id[f] and not is_id[g]
    ]
    for g, f in pairs:
        if not hom[(src[f], tgt[g])]:
            return
    table: dict[tuple[int, int], int] = {}

    def comp(g, f):
        if is_id[f]:
            return g
        if is_id[g]:
            return f
        return table.get((g, f))

    # triples (h, g, f) to re-check once a pair is assigned
    triples_of: dict[tuple[int, int], list[tuple[int, int, int]]] = {p: [] for p in pairs}
    for f in range(len(mors)):
        for g in range(len(mors)):
            if tgt[f] != src[g]:
                continue
            for h in range(len(mors)):
                if tgt[g] != src[h]:
                    continue
                if is_id[f] or is_id[g] or is_id[h]:
                    continue
                t = (h, g, f)
                triples_of[(g, f)].append(t)
                triples_of[(h, g)].append(t)

    def assoc_ok(g, f):
        for h2, g2, f2 in triples_of[(g, f)]:
            gf, hg = comp(g2, f2), comp(h2, g2)
            if gf is None or hg is None:
                continue
            a, b = comp(h2, gf), comp(hg, f2)
            if a is not None and b is not None and a != b:
                return False
        return True

    def recheck_all():
        for (g, f) in pairs:
            if not assoc_ok(g, f):
                return False
        return True

    def rec(k):
        if budget is not None:
            budget[0] -= 1
            if budget[0] < 0:
                raise BudgetExceededError("category enumeration nodes", "exhausted")
        if k == len(pairs):
            if recheck_all():
                yield FinCat(list(range(n)), [(m, m[0], m[1]) for m in mors], ident, _full_table(mors, is_id, table))
            return
        g, f = pairs[k]
        for v in hom[(src[f], tgt[g])]:
            table[(g, f)] = v
            if assoc_ok(g, f):
                yield from rec(k + 1)
        del table[(g, f)]

    yield from rec(0)


def _full_table(mors, is_id, table):
    out = dict(table)
    for f in range(len(mors)):
        for g in range(len(mors)):
            if mors[f][1] == mors[g][0] and (is_id[f] or is_id[g]):
                out[(g, f)] = f if is_id[g] else g
    return out


def invariant(C: FinCat):
    """An isomorphism invariant: hom sizes per object pair up to permutation, plus
    the multiset of (source, target, idempotent, order-type) data per morphism."""
    n = C.n_objects
    rows = sorted(
        (len(C.hom(x, x)), tuple(sorted(len(C.hom(x, y)) for y in range(n))), tuple(sorted(len(C.hom(y, x)) for y in range(n))))
        for x in range(n)
    )
    endo = []
    for m in range(C.n_morphisms):
        if C.src[m] == C.tgt[m]:
            seen, cur = [], m
            while cur not in seen:
                seen.append(cur)
                cur = C.compose(m, cur)
            endo.append((len(seen), seen.index(cur), C.is_identity(m)))
    return (n, C.n_morphisms, tuple(rows), tuple(sorted(endo)))


def iter_categories(max_objects: int, max_morphisms: int, *, budget: int | None = None) -> Iterator[FinCat]:
    """Every category with ``1..max_objects`` objects and at most ``max_morphisms``
    morphisms (identities included), once per isomorphism class.

    ``budget`` caps the number of backtracking nodes; exceeding it raises
    :class:`BudgetExceededError` instead of returning a partial catalogue.
    """
    left = [budget] if budget is not None else None
    try:
        for n in range(1, max_objects + 1):
            for M in hom_matrices(n, max_morphisms):
                reps: dict[tuple, list[FinCat]] = {}
                for C in iter_tables(M, budget=left):
                    key = invariant(C)
                    bucket = reps.setdefault(key, [])
                    if any(find_isomorphism(C, R) is not None for R in bucket):
                        continue
                    bucket.append(C)
                    yield C
    except BudgetExceededError:
        raise BudgetExceededError("category enumeration nodes", budget) from None


def count_categories(max_objects: int, max_morphisms: int, *, budget: int | None = None) -> int:
    return sum(1 for _ in iter_categories(max_objects, max_morphisms, budget=budget))
