"""Seeded random instances for property tests and the CLI.

Every generator takes an explicit :class:`random.Random` so results are a
pure function of the seed.
"""
from __future__ import annotations

import itertools
import random
import string
from collections.abc import Sequence

from .enriched import EnrichedCat
from .fincat import FinCat, opposite_cat, ordinal, terminal_cat
from .kanext import union_classes
from .presheaf import Presheaf, PshMap, coproduct, iter_maps, representable, sub_presheaf

__all__ = [
    "random_category",
    "random_presheaf",
    "random_map",
    "random_mono",
    "random_set_functor",
    "random_enriched",
    "random_index_category",
    "random_poset",
    "thin_reflection",
    "generated_subcategory",
]


def _close(functions: set, sizes: dict) -> set:
    """Close a set of ``(src, tgt, table)`` functions under composition."""
    out = set(functions)
    frontier = list(out)
    while frontier:
        new = []
        for f in frontier:
            for g in list(out):
                for a, b in ((f, g), (g, f)):
                    if a[1] == b[0]:  # b after a
                        h = (a[0], b[1], tuple(b[2][i] for i in a[2]))
                        if h not in out:
                            out.add(h)
                            new.append(h)
        frontier = new
    return out


def random_category(
    rng: random.Random,
    max_objects: int = 4,
    max_morphisms: int = 12,
    *,
    max_set: int = 3,
    extra: int | None = None,
    tries: int = 200,
) -> FinCat:
    """A random concrete category: finite sets of size ``<= max_set`` and a set
    of random functions between them closed under composition."""
    for _ in range(tries):
        n = rng.randint(1, max_objects)
        names = list(string.ascii_lowercase[:n])
        sizes = {x: rng.randint(1, max_set) for x in names}
        gens = set()
        k = rng.randint(0, extra if extra is not None else n + 2)
        for _ in range(k):
            s, t = rng.choice(names), rng.choice(names)
            gens.add((s, t, tuple(rng.randrange(sizes[t]) for _ in range(sizes[s]))))
        ids = {(x, x, tuple(range(sizes[x]))) for x in names}
        mors = _close(gens | ids, sizes)
        if len(mors) > max_morphisms:
            continue
        ordered = sorted(mors, key=lambda m: (names.index(m[0]), names.index(m[1]), m[2]))
        return FinCat.build(
            names,
            [(m[2], m[0], m[1]) for m in ordered],
            lambda x: tuple(range(sizes[x])),
            lambda g, f: tuple(g[i] for i in f),
            name="rand",
        )
    return terminal_cat()


def random_index_category(rng: random.Random) -> FinCat:
    """A small index category ``D``: terminal, ``[1]``, or a random one on two objects."""
    r = rng.random()
    if r < 0.3:
        return terminal_cat()
    if r < 0.6:
        return ordinal(1)
    return random_category(rng, 2, 4, max_set=2)


def random_poset(rng: random.Random, n: int, p: float = 0.5) -> FinCat:
    """A random poset on ``0..n-1`` refining the usual order, as a thin category."""
    less = {(i, j) for i, j in itertools.combinations(range(n), 2) if rng.random() < p}
    for k, i, j in itertools.product(range(n), repeat=3):  # k outermost: Warshall closure
        if (i, k) in less and (k, j) in less:
            less.add((i, j))
    rel = sorted(less | {(i, i) for i in range(n)})
    pos = {r: m for m, r in enumerate(rel)}
    comp = {(pos[(b, c)], pos[(a, b)]): pos[(a, c)] for a, b in rel for b2, c in rel if b == b2}
    return FinCat(list(range(n)), [(r, r[0], r[1]) for r in rel], [pos[(i, i)] for i in range(n)], comp, name="poset")


def _congruence(X: Presheaf, pairs) -> Presheaf:
    """Quotient of ``X`` by the smallest congruence identifying ``pairs`` ``(x, e, e')``."""
    B = X.base
    offsets = list(itertools.accumulate([0] + list(X.sizes)))
    rel = []
    stack = list(pairs)
    seen = set()
    while stack:
        y, e, e2 = stack.pop()
        if e == e2 or (y, e, e2) in seen:
            continue
        seen.add((y, e, e2))
        rel.append((offsets[y] + e, offsets[y] + e2))
        for f in B.into(y):
            stack.append((B.src[f], X.action[f][e], X.action[f][e2]))
    # propagation must also follow newly merged classes transitively
    while True:
        roots, cls = union_classes(offsets[-1], rel)
        extra = []
        for f in range(B.n_morphisms):
            s, t = B.src[f], B.tgt[f]
            first = {}
            for e in range(X.size(t)):
                c = cls[offsets[t] + e]
                img = X.action[f][e]
                if c in first and cls[offsets[s] + first[c]] != cls[offsets[s] + img]:
                    extra.append((offsets[s] + first[c], offsets[s] + img))
                first.setdefault(c, img)
        if not extra:
            break
        rel.extend(extra)
    reps = [[] for _ in range(B.n_objects)]
    where = {}
    for x in range(B.n_objects):
        for e in range(X.size(x)):
            c = cls[offsets[x] + e]
            if c not in where:
                where[c] = len(reps[x])
                reps[x].append(e)
    elems = [[X.elems[x][e] for e in reps[x]] for x in range(B.n_objects)]
    action = [
        [where[cls[offsets[B.src[f]] + X.action[f][e]]] for e in reps[B.tgt[f]]]
        for f in range(B.n_morphisms)
    ]
    return Presheaf(B, elems, action)


def random_presheaf(
    rng: random.Random,
    B: FinCat,
    max_size: int = 3,
    *,
    max_generators: int = 2,
    tries: int = 100,
) -> Presheaf:
    """A random quotient of a coproduct of representables with every value of size ``<= max_size``.

    Element labels are renamed to short strings so presheaves stay readable.
    """
    for _ in range(tries):
        k = rng.randint(0, max_generators)
        if k == 0:
            X = Presheaf(B, [[]] * B.n_objects, [[]] * B.n_morphisms)
        else:
            gens = [representable(B, rng.choice(B.objects)) for _ in range(k)]
            X = coproduct(*gens).obj
        while max(X.sizes, default=0) > max_size or (X.total_size and rng.random() < 0.3):
            x = rng.choice([i for i in range(B.n_objects) if X.size(i) > 1] or [None])
            if x is None:
                break
            e, e2 = rng.sample(range(X.size(x)), 2)
            X = _congruence(X, [(x, e, e2)])
        if max(X.sizes, default=0) <= max_size:
            return _rename(X)
    return Presheaf(B, [["*"]] * B.n_objects, [[0]] * B.n_morphisms)


def _rename(X: Presheaf) -> Presheaf:
    elems = [[f"{x}.{i}" for i in range(X.size(x))] for x in range(X.base.n_objects)]
    return Presheaf(X.base, elems, X.action)


def random_map(rng: random.Random, X: Presheaf, Y: Presheaf, *, limit: int = 5000) -> PshMap | None:
    """A uniformly chosen natural transformation among the first ``limit`` found, or ``None``."""
    maps = list(itertools.islice(iter_maps(X, Y), limit))
    if not maps:
        return None
    return PshMap(X, Y, rng.choice(maps))


def random_mono(rng: random.Random, X: Presheaf) -> PshMap:
    """Inclusion of the sub-presheaf generated by a random set of elements."""
    keep = [[e for e in range(X.size(x)) if rng.random() < 0.3] for x in range(X.base.n_objects)]
    return sub_presheaf(X, keep)


def random_set_functor(rng: random.Random, C: FinCat, max_size: int = 3, *, tries: int = 50):
    """A random functor ``C -> FinSet`` with fibres of size ``1..max_size``.

    Sizes are drawn first; the functor is the first hit of a randomly ordered
    search, and the sizes are redrawn when none exists.
    """
    from .groth import SetFunctor, iter_set_functors

    for _ in range(tries):
        sizes = [rng.randint(1, max_size) for _ in C.objects]
        F = next(iter_set_functors(C, sizes, rng=rng), None)
        if F is not None:
            return SetFunctor(C, [[f"{c}{i}" for i in range(n)] for c, n in zip(C.objects, sizes)], F.action)
    return SetFunctor(C, [["*"]] * C.n_objects, [[0]] * C.n_morphisms)


def generated_subcategory(C: FinCat, gens: Sequence[int]) -> list[int]:
    """Morphism ids of the wide subcategory generated by ``gens``."""
    keep = set(C.identity) | set(gens)
    frontier = list(keep)
    while frontier:
        new = []
        for f in frontier:
            for g in list(keep):
                for a, b in ((g, f), (f, g)):
                    if C.tgt[b] == C.src[a]:
                        h = C.compose(a, b)
                        if h not in keep:
                            keep.add(h)
                            new.append(h)
        frontier = new
    return sorted(keep)


def _sub(C: FinCat, ids: Sequence[int], thin: bool) -> tuple[FinCat, dict[int, int]]:
    """The wide subcategory on ``ids`` (or its thin reflection) and the map from ``C``-ids."""
    ids = sorted(ids)
    n = C.n_objects
    if not thin:
        pos = {m: i for i, m in enumerate(ids)}
        mors = [(C.labels[m], C.src[m], C.tgt[m]) for m in ids]
        comp = {
            (pos[g], pos[f]): pos[C.compose(g, f)] for f in ids for g in ids if C.src[g] == C.tgt[f]
        }
        return FinCat(C.objects, mors, [pos[C.identity[x]] for x in range(n)], comp), pos
    pairs = sorted({(C.src[m], C.tgt[m]) for m in ids})
    where = {p: i for i, p in enumerate(pairs)}
    mors = [((C.objects[s], C.objects[t]), s, t) for s, t in pairs]
    comp = {(where[(b, c)], where[(a, b)]): where[(a, c)] for a, b in pairs for b2, c in pairs if b2 == b}
    S = FinCat(C.objects, mors, [where[(x, x)] for x in range(n)], comp)
    return S, {m: where[(C.src[m], C.tgt[m])] for m in ids}


def thin_reflection(C: FinCat) -> FinCat:
    return _sub(C, range(C.n_morphisms), True)[0]


def random_enriched(
    rng: random.Random,
    D: FinCat | None = None,
    *,
    max_objects: int = 3,
    max_hom: int = 2,
    tries: int = 200,
) -> EnrichedCat:
    """A random category enriched over presheaves on ``D``.

    Level ``d`` is a wide subcategory ``S_d`` of a random base category, or its
    thin reflection; ``S_d`` contains ``S_e`` whenever ``d -> e``, and thin
    levels are closed under sources, so transports are inclusions followed
    by reflections and compose strictly.
    """
    if D is None:
        D = random_index_category(rng)
    for _ in range(tries):
        C0 = random_category(rng, max_objects, max_objects * max_objects * max_hom, max_set=2)
        if max(len(C0.hom(x, y)) for x in range(C0.n_objects) for y in range(C0.n_objects)) <= max_hom:
            break
    nonid = [m for m in range(C0.n_morphisms) if not C0.is_identity(m)]
    T = [[m for m in nonid if rng.random() < 0.6] for _ in D.objects]
    reach = [[e for e in range(D.n_objects) if D.hom(d, e)] for d in range(D.n_objects)]
    S = [generated_subcategory(C0, sorted({m for e in reach[d] for m in T[e]})) for d in range(D.n_objects)]
    U = {d for d in range(D.n_objects) if rng.random() < 0.3}
    changed = True
    while changed:
        changed = False
        for f in range(D.n_morphisms):
            if D.tgt[f] in U and D.src[f] not in U:
                U.add(D.src[f])
                changed = True
    built = [_sub(C0, S[d], d in U) for d in range(D.n_objects)]
    levels = [b[0] for b in built]
    transport = {}
    for f in range(D.n_morphisms):
        d2, d = D.src[f], D.tgt[f]
        row = [None] * levels[d].n_morphisms
        for m in S[d]:
            row[built[d][1][m]] = built[d2][1][m]
        transport[f] = row
    return EnrichedCat.from_levels(D, levels, transport, name="rand")
