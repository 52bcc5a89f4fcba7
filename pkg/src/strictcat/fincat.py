"""Finite categories given by explicit tables, and functors between them.

A :class:`FinCat` stores objects as an ordered tuple of hashable labels and
morphisms as dense integer ids ``0..m-1``.  Morphism labels only need to be
unique inside a single hom-set (the simplex category reuses ``(0,)`` for every
vertex map, for instance), so lookups by label always go through
``(source, target, label)``.
"""
from __future__ import annotations

import itertools
from collections.abc import Callable, Hashable, Iterator, Mapping, Sequence

from .errors import AuditError, NotComposableError, UnknownObjectError

__all__ = [
    "FinCat",
    "CatFunctor",
    "terminal_cat",
    "ordinal",
    "delta_truncated",
    "opposite_cat",
    "product_cat",
    "slice_coslice",
    "theta_construct",
    "theta_hom_count",
    "iter_functors",
    "find_isomorphism",
    "identity_functor",
    "compose_functors",
]


class FinCat:
    """A finite category with a total composition table.

    ``compose`` is either a mapping ``(g, f) -> g∘f`` over all composable
    pairs, or a callable computing it; callables are memoized and only
    materialized when :attr:`table` is requested.
    """

    def __init__(
        self,
        objects: Sequence[Hashable],
        morphisms: Sequence[tuple[Hashable, int, int]],
        identity: Sequence[int],
        compose: Mapping[tuple[int, int], int] | Callable[[int, int], int],
        *,
        name: str | None = None,
    ):
        self.objects = tuple(objects)
        self.labels = tuple(m[0] for m in morphisms)
        self.src = tuple(m[1] for m in morphisms)
        self.tgt = tuple(m[2] for m in morphisms)
        self.identity = tuple(identity)
        self.name = name
        # set by constructors that know the shape of their output
        self.factors: tuple[FinCat, ...] | None = None
        self.delta_level: int | None = None

        self._obj_index = {}
        for i, label in enumerate(self.objects):
            if label in self._obj_index:
                raise AuditError("distinct object labels", label)
            self._obj_index[label] = i
        n = len(self.objects)
        homs: dict[tuple[int, int], list[int]] = {}
        self._into: list[list[int]] = [[] for _ in range(n)]
        self._outof: list[list[int]] = [[] for _ in range(n)]
        self._by_label: dict[tuple[int, int, Hashable], int] = {}
        for m, (s, t) in enumerate(zip(self.src, self.tgt)):
            homs.setdefault((s, t), []).append(m)
            self._into[t].append(m)
            self._outof[s].append(m)
            key = (s, t, self.labels[m])
            if key in self._by_label:
                raise AuditError("distinct morphism labels within a hom-set", key)
            self._by_label[key] = m
        self._homs = {k: tuple(v) for k, v in homs.items()}
        if callable(compose):
            self._fn = compose
            self._table: dict[tuple[int, int], int] | None = None
            self._memo: dict[tuple[int, int], int] = {}
        else:
            self._fn = None
            self._table = dict(compose)
            self._memo = self._table
        self._hash: int | None = None

    # -- construction -----------------------------------------------------

    @classmethod
    def build(
        cls,
        objects: Sequence[Hashable],
        morphisms: Sequence[tuple[Hashable, Hashable, Hashable]],
        identity: Callable[[Hashable], Hashable],
        compose: Callable[[Hashable, Hashable], Hashable],
        *,
        name: str | None = None,
        materialize: bool = True,
    ) -> FinCat:
        """Build a category from labelled data in canonical morphism order.

        ``morphisms`` holds ``(label, source label, target label)`` triples.
        Ids are assigned in (source index, target index, insertion order).
        ``compose(g_label, f_label)`` returns the label of ``g∘f``.
        """
        obj_index = {x: i for i, x in enumerate(objects)}
        order = sorted(
            range(len(morphisms)),
            key=lambda k: (obj_index[morphisms[k][1]], obj_index[morphisms[k][2]], k),
        )
        mors = [
            (morphisms[k][0], obj_index[morphisms[k][1]], obj_index[morphisms[k][2]])
            for k in order
        ]
        lookup = {(s, t, lab): m for m, (lab, s, t) in enumerate(mors)}
        ident = []
        for i, x in enumerate(objects):
            key = (i, i, identity(x))
            if key not in lookup:
                raise AuditError("identity exists", x)
            ident.append(lookup[key])

        def comp(g: int, f: int) -> int:
            lab = compose(mors[g][0], mors[f][0])
            key = (mors[f][1], mors[g][2], lab)
            try:
                return lookup[key]
            except KeyError:
                raise AuditError("composite exists", (mors[g][0], mors[f][0], lab)) from None

        cat = cls(objects, mors, ident, comp, name=name)
        if materialize:
            cat._materialize()
        return cat

    def _materialize(self) -> None:
        if self._table is not None:
            return
        table = {}
        for f in range(self.n_morphisms):
            for g in self._outof[self.tgt[f]]:
                table[(g, f)] = self.compose(g, f)
        self._table = table
        self._memo = table
        self._fn = None

    # -- queries ----------------------------------------------------------

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    @property
    def n_morphisms(self) -> int:
        return len(self.labels)

    @property
    def table(self) -> dict[tuple[int, int], int]:
        self._materialize()
        return self._table

    @property
    def is_materialized(self) -> bool:
        return self._table is not None

    def is_connected(self) -> bool:
        """Whether the underlying graph (ignoring direction) is connected and nonempty."""
        if not self.n_objects:
            return False
        seen, todo = {0}, [0]
        adj: dict[int, set[int]] = {x: set() for x in range(self.n_objects)}
        for m in range(self.n_morphisms):
            adj[self.src[m]].add(self.tgt[m])
            adj[self.tgt[m]].add(self.src[m])
        while todo:
            for y in adj[todo.pop()] - seen:
                seen.add(y)
                todo.append(y)
        return len(seen) == self.n_objects

    def index(self, label: Hashable) -> int:
        try:
            return self._obj_index[label]
        except KeyError:
            raise UnknownObjectError(label, self.name or "category") from None

    def has_object(self, label: Hashable) -> bool:
        return label in self._obj_index

    def hom(self, x: int, y: int) -> tuple[int, ...]:
        return self._homs.get((x, y), ())

    def into(self, y: int) -> list[int]:
        return self._into[y]

    def out_of(self, x: int) -> list[int]:
        return self._outof[x]

    def find(self, x: int, y: int, label: Hashable) -> int:
        try:
            return self._by_label[(x, y, label)]
        except KeyError:
            raise KeyError(f"no morphism {label!r}: {self.objects[x]!r} -> {self.objects[y]!r}") from None

    def compose(self, g: int, f: int) -> int:
        """Return ``g ∘ f`` (first ``f``, then ``g``)."""
        key = (g, f)
        try:
            return self._memo[key]
        except KeyError:
            pass
        if self.tgt[f] != self.src[g]:
            raise NotComposableError(f"cannot compose {g} after {f}")
        if self._fn is None:
            raise AuditError("composition table is total", key)
        h = self._fn(g, f)
        self._memo[key] = h
        return h

    def compose_path(self, path: Sequence[int], start: int | None = None) -> int:
        """Compose ``path[0]`` first, ``path[-1]`` last; empty path needs ``start``."""
        if not path:
            return self.identity[start]
        h = path[0]
        for g in path[1:]:
            h = self.compose(g, h)
        return h

    def is_identity(self, m: int) -> bool:
        return self.identity[self.src[m]] == m

    def describe(self, m: int) -> str:
        return f"{self.labels[m]!r}: {self.objects[self.src[m]]!r} -> {self.objects[self.tgt[m]]!r}"

    def composable_pairs(self) -> Iterator[tuple[int, int]]:
        for f in range(self.n_morphisms):
            for g in self._outof[self.tgt[f]]:
                yield g, f

    # -- audit ------------------------------------------------------------

    def validate(self) -> FinCat:
        """Check every category axiom exhaustively; raise :class:`AuditError`."""
        n = self.n_objects
        if len(self.identity) != n:
            raise AuditError("identity assigned to every object", len(self.identity))
        for x, i in enumerate(self.identity):
            if not (0 <= i < self.n_morphisms) or self.src[i] != x or self.tgt[i] != x:
                raise AuditError("identity is an endomorphism of its object", self.objects[x])
        for m in range(self.n_morphisms):
            if not (0 <= self.src[m] < n and 0 <= self.tgt[m] < n):
                raise AuditError("morphism endpoints are objects", m)
        if self._table is not None:
            for (g, f) in self._table:
                if not (0 <= f < self.n_morphisms and 0 <= g < self.n_morphisms) or self.tgt[f] != self.src[g]:
                    raise AuditError("composition only on composable pairs", (g, f))
        for g, f in self.composable_pairs():
            if self._table is not None and (g, f) not in self._table:
                raise AuditError(
                    "composition table is total",
                    (self.labels[g], self.labels[f]),
                    f"composition table missing composable pair ({self.describe(g)}) after ({self.describe(f)})",
                )
            h = self.compose(g, f)
            if not (0 <= h < self.n_morphisms) or self.src[h] != self.src[f] or self.tgt[h] != self.tgt[g]:
                raise AuditError("composite has consistent endpoints", (g, f, h))
        for f in range(self.n_morphisms):
            if self.compose(self.identity[self.tgt[f]], f) != f:
                raise AuditError("left unit law", f)
            if self.compose(f, self.identity[self.src[f]]) != f:
                raise AuditError("right unit law", f)
        for f in range(self.n_morphisms):
            for g in self._outof[self.tgt[f]]:
                gf = self.compose(g, f)
                for h in self._outof[self.tgt[g]]:
                    if self.compose(h, gf) != self.compose(self.compose(h, g), f):
                        raise AuditError("associativity", (h, g, f))
        return self

    # -- equality ---------------------------------------------------------

    def _key(self):
        return (self.objects, self.labels, self.src, self.tgt, self.identity)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, FinCat):
            return NotImplemented
        return self._key() == other._key() and self.table == other.table

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self._key())
        return self._hash

    def __repr__(self):
        name = f" {self.name}" if self.name else ""
        return f"<FinCat{name}: {self.n_objects} objects, {self.n_morphisms} morphisms>"


class CatFunctor:
    """A functor given by an object map and a morphism map (both on indices)."""

    def __init__(self, source: FinCat, target: FinCat, obj_map: Sequence[int], mor_map: Sequence[int]):
        self.source = source
        self.target = target
        self.obj_map = tuple(obj_map)
        self.mor_map = tuple(mor_map)

    @classmethod
    def from_labels(cls, source: FinCat, target: FinCat, objects: Mapping, morphisms: Callable[[int], int]) -> CatFunctor:
        obj_map = [target.index(objects[x]) for x in source.objects]
        return cls(source, target, obj_map, [morphisms(m) for m in range(source.n_morphisms)])

    def validate(self) -> CatFunctor:
        S, T = self.source, self.target
        if len(self.obj_map) != S.n_objects or len(self.mor_map) != S.n_morphisms:
            raise AuditError("functor maps are total", (len(self.obj_map), len(self.mor_map)))
        for m in range(S.n_morphisms):
            fm = self.mor_map[m]
            if T.src[fm] != self.obj_map[S.src[m]] or T.tgt[fm] != self.obj_map[S.tgt[m]]:
                raise AuditError("functor preserves sources and targets", S.describe(m))
        for x in range(S.n_objects):
            if self.mor_map[S.identity[x]] != T.identity[self.obj_map[x]]:
                raise AuditError("functor preserves identities", S.objects[x])
        for g, f in S.composable_pairs():
            if self.mor_map[S.compose(g, f)] != T.compose(self.mor_map[g], self.mor_map[f]):
                raise AuditError("functor preserves composites", (S.labels[g], S.labels[f]))
        return self

    def __eq__(self, other):
        if not isinstance(other, CatFunctor):
            return NotImplemented
        return (
            self.obj_map == other.obj_map
            and self.mor_map == other.mor_map
            and self.source == other.source
            and self.target == other.target
        )

    def __hash__(self):
        return hash((self.obj_map, self.mor_map))

    def __repr__(self):
        return f"<CatFunctor {self.source!r} -> {self.target!r}>"


def identity_functor(C: FinCat) -> CatFunctor:
    return CatFunctor(C, C, range(C.n_objects), range(C.n_morphisms))


def compose_functors(G: CatFunctor, F: CatFunctor) -> CatFunctor:
    """``G ∘ F``."""
    return CatFunctor(
        F.source,
        G.target,
        [G.obj_map[y] for y in F.obj_map],
        [G.mor_map[m] for m in F.mor_map],
    )


# -- basic categories -----------------------------------------------------


def terminal_cat() -> FinCat:
    return FinCat(["*"], [("id", 0, 0)], [0], {(0, 0): 0}, name="1")


def ordinal(n: int) -> FinCat:
    """The poset ``0 < 1 < ... < n`` as a category; morphisms are pairs ``(i, j)``."""
    objs = list(range(n + 1))
    mors = [((i, j), i, j) for i in objs for j in objs if i <= j]
    return FinCat.build(
        objs, mors, lambda x: (x, x), lambda g, f: (f[0], g[1]), name=f"[{n}]"
    )


def _monotone_maps(m: int, n: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(range(n + 1), m + 1))


def delta_truncated(N: int) -> FinCat:
    """The full subcategory of the simplex category on ``[0], ..., [N]``.

    A morphism ``[m] -> [n]`` is labelled by its tuple of images
    ``(a_0, ..., a_m)``; composition reindexes tuples.
    """
    if N < 0:
        raise ValueError("truncation level must be nonnegative")
    objs = list(range(N + 1))
    mors = [(t, m, n) for m in objs for n in objs for t in _monotone_maps(m, n)]
    cat = FinCat.build(
        objs,
        mors,
        lambda n: tuple(range(n + 1)),
        lambda g, f: tuple(g[i] for i in f),
        name=f"Δ≤{N}",
    )
    cat.delta_level = N
    return cat


def opposite_cat(C: FinCat) -> FinCat:
    """Same objects and morphism ids; sources and targets swapped."""
    mors = list(zip(C.labels, C.tgt, C.src))
    if C.is_materialized:
        comp = {(f, g): h for (g, f), h in C.table.items()}
    else:
        comp = lambda g, f: C.compose(f, g)  # noqa: E731
    op = FinCat(C.objects, mors, C.identity, comp, name=f"{C.name}^op" if C.name else None)
    return op


def product_cat(*factors: FinCat) -> FinCat:
    """Product category; objects and morphisms are tuples over the factors."""
    objs = list(itertools.product(*(F.objects for F in factors)))
    obj_idx = list(itertools.product(*(range(F.n_objects) for F in factors)))
    mors = []
    for src in obj_idx:
        for tgt in obj_idx:
            homs = [F.hom(s, t) for F, s, t in zip(factors, src, tgt)]
            for combo in itertools.product(*homs):
                mors.append((combo, tuple(F.objects[s] for F, s in zip(factors, src)),
                             tuple(F.objects[t] for F, t in zip(factors, tgt))))
    # labels are tuples of factor morphism ids
    cat = FinCat.build(
        objs,
        mors,
        lambda x: tuple(F.identity[F.index(c)] for F, c in zip(factors, x)),
        lambda g, f: tuple(F.compose(a, b) for F, a, b in zip(factors, g, f)),
        name=" × ".join(F.name or "?" for F in factors),
    )
    cat.factors = tuple(factors)
    return cat


def product_projection(P: FinCat, i: int) -> CatFunctor:
    """Projection of a :func:`product_cat` onto its ``i``-th factor."""
    F = P.factors[i]
    obj_map = [F.index(x[i]) for x in P.objects]
    return CatFunctor(P, F, obj_map, [lab[i] for lab in P.labels])


def slice_coslice(C: FinCat, c: Hashable, direction: str = "over") -> tuple[FinCat, CatFunctor]:
    """The over-category ``C/c`` or under-category ``c/C`` with its projection.

    Objects are labelled ``(x, f)`` where ``f`` is the label of the structure
    morphism and ``x`` its other endpoint.
    """
    ci = C.index(c)
    if direction == "over":
        base = [f for f in range(C.n_morphisms) if C.tgt[f] == ci]
        end = C.src
    elif direction == "under":
        base = [f for f in range(C.n_morphisms) if C.src[f] == ci]
        end = C.tgt
    else:
        raise ValueError(f"direction must be 'over' or 'under', not {direction!r}")
    obj_of = {f: (C.objects[end[f]], C.labels[f]) for f in base}
    objs = [obj_of[f] for f in base]
    mors = []
    for f in base:
        for f2 in base:
            for g in C.hom(end[f], end[f2]):
                ok = (C.compose(f2, g) == f) if direction == "over" else (C.compose(g, f) == f2)
                if ok:
                    mors.append((g, obj_of[f], obj_of[f2]))
    S = FinCat.build(
        objs,
        mors,
        lambda x: C.identity[C.index(x[0])],
        lambda g, f: C.compose(g, f),
        name=f"{C.name or 'C'}/{c!r}" if direction == "over" else f"{c!r}/{C.name or 'C'}",
    )
    proj = CatFunctor(S, C, [C.index(x[0]) for x in S.objects], list(S.labels))
    return S, proj


# -- Θ construction -------------------------------------------------------


def _theta_ranges(delta: Sequence[int]) -> list[range]:
    return [range(delta[i - 1] + 1, delta[i] + 1) for i in range(1, len(delta))]


def theta_construct(C: FinCat, maxK: int, *, materialize: bool | None = None) -> FinCat:
    """Truncation of ΘC to objects ``[k](c_1, ..., c_k)`` with ``k <= maxK``.

    An object is labelled by the tuple ``(c_1, ..., c_k)`` of object labels
    of ``C``.  A morphism ``[k](c) -> [l](d)`` is labelled ``(δ, comps)``
    where ``δ`` is a monotone map ``[k] -> [l]`` and ``comps`` lists morphism
    ids ``c_i -> d_j`` of ``C`` in row-major order over
    ``i = 1..k, δ(i-1) < j <= δ(i)``.

    The composition table is materialized unless it would exceed about
    250k composable pairs; pass ``materialize`` to force either way.
    """
    if maxK < 0:
        raise ValueError("maxK must be nonnegative")
    objs = [cs for k in range(maxK + 1) for cs in itertools.product(C.objects, repeat=k)]
    idx = {x: tuple(C.index(c) for c in x) for x in objs}
    mors = []
    counts = {}
    for a in objs:
        for b in objs:
            n = 0
            for delta in _monotone_maps(len(a), len(b)):
                choices = [
                    C.hom(idx[a][i - 1], idx[b][j - 1])
                    for i, r in enumerate(_theta_ranges(delta), start=1)
                    for j in r
                ]
                for comps in itertools.product(*choices):
                    mors.append(((delta, comps), a, b))
                    n += 1
            counts[(a, b)] = n

    def identity(x):
        k = len(x)
        return (tuple(range(k + 1)), tuple(C.identity[i] for i in idx[x]))

    def compose(g, f):
        delta, fcomps = f
        eps, gcomps = g
        # position of g_{j,m} inside gcomps
        gpos = {}
        p = 0
        for j, r in enumerate(_theta_ranges(eps), start=1):
            for m in r:
                gpos[(j, m)] = p
                p += 1
        owner = {}
        for j, r in enumerate(_theta_ranges(eps), start=1):
            for m in r:
                owner[m] = j
        comp_delta = tuple(eps[d] for d in delta)
        out = []
        p = 0
        fpos = {}
        for i, r in enumerate(_theta_ranges(delta), start=1):
            for j in r:
                fpos[(i, j)] = p
                p += 1
        for i, r in enumerate(_theta_ranges(comp_delta), start=1):
            for m in r:
                j = owner[m]
                out.append(C.compose(gcomps[gpos[(j, m)]], fcomps[fpos[(i, j)]]))
        return (comp_delta, tuple(out))

    if materialize is None:
        pairs = sum(counts[(a, b)] * counts[(b, c)] for a in objs for b in objs for c in objs)
        materialize = pairs <= 250_000
    cat = FinCat.build(objs, mors, identity, compose, name=f"Θ({C.name or 'C'})≤{maxK}", materialize=materialize)
    return cat


def theta_hom_count(C: FinCat, source: Sequence[Hashable], target: Sequence[Hashable]) -> int:
    """Size of a Θ hom-set computed from hom-set sizes of ``C`` alone."""
    k, l = len(source), len(target)
    sizes = [[len(C.hom(C.index(c), C.index(d))) for d in target] for c in source]
    total = 0
    for delta in _monotone_maps(k, l):
        prod = 1
        for i in range(1, k + 1):
            for j in range(delta[i - 1] + 1, delta[i] + 1):
                prod *= sizes[i - 1][j - 1]
        total += prod
    return total


# -- search ---------------------------------------------------------------


def iter_functors(
    A: FinCat,
    B: FinCat,
    *,
    over: tuple[CatFunctor, CatFunctor] | None = None,
    bijective: bool = False,
) -> Iterator[CatFunctor]:
    """Enumerate all functors ``A -> B`` (optionally commuting with ``over``).

    ``over = (pA, pB)`` restricts to functors ``F`` with ``pB ∘ F = pA``.
    ``bijective`` restricts to isomorphisms.
    """
    if bijective and (A.n_objects != B.n_objects or A.n_morphisms != B.n_morphisms):
        return
    pA, pB = over if over else (None, None)
    nA = A.n_objects
    # candidates for each object
    obj_cands = []
    for x in range(nA):
        cands = range(B.n_objects)
        if over:
            cands = [y for y in cands if pB.obj_map[y] == pA.obj_map[x]]
        if bijective:
            sig = _signature(A, x)
            cands = [y for y in cands if _signature(B, y) == sig]
        obj_cands.append(list(cands))
    nonid = [m for m in range(A.n_morphisms) if not A.is_identity(m)]
    # for each non-identity morphism, the composition triples in which it is the
    # last of its triple to be assigned
    pos = {m: k for k, m in enumerate(nonid)}
    checks: list[list[tuple[int, int, int]]] = [[] for _ in nonid]
    for g, f in A.composable_pairs():
        h = A.compose(g, f)
        involved = [pos[m] for m in (g, f, h) if m in pos]
        if involved:
            checks[max(involved)].append((g, f, h))

    obj_map = [-1] * nA

    def assign_objects(i, used):
        if i == nA:
            yield from assign_morphisms()
            return
        for y in obj_cands[i]:
            if bijective and y in used:
                continue
            obj_map[i] = y
            if bijective:
                used.add(y)
            yield from assign_objects(i + 1, used)
            if bijective:
                used.discard(y)
        obj_map[i] = -1

    def assign_morphisms():
        mor_map = [-1] * A.n_morphisms
        for x in range(nA):
            mor_map[A.identity[x]] = B.identity[obj_map[x]]
        used = set(mor_map) if bijective else None

        def rec(k):
            if k == len(nonid):
                yield CatFunctor(A, B, obj_map, mor_map)
                return
            m = nonid[k]
            for cand in B.hom(obj_map[A.src[m]], obj_map[A.tgt[m]]):
                if over and pB.mor_map[cand] != pA.mor_map[m]:
                    continue
                if bijective and cand in used:
                    continue
                mor_map[m] = cand
                ok = all(mor_map[h] == B.compose(mor_map[g], mor_map[f]) for g, f, h in checks[k])
                if ok:
                    if bijective:
                        used.add(cand)
                    yield from rec(k + 1)
                    if bijective:
                        used.discard(cand)
            mor_map[m] = -1

        yield from rec(0)

    yield from assign_objects(0, set())


def _signature(C: FinCat, x: int):
    return (
        len(C.hom(x, x)),
        sorted(len(C.hom(x, y)) for y in range(C.n_objects)),
        sorted(len(C.hom(y, x)) for y in range(C.n_objects)),
    )


def find_isomorphism(
    A: FinCat, B: FinCat, *, over: tuple[CatFunctor, CatFunctor] | None = None
) -> CatFunctor | None:
    """Return an isomorphism ``A -> B`` (over a base, if given) or ``None``."""
    return next(iter_functors(A, B, over=over, bijective=True), None)
