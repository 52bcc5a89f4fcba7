"""Finite set-valued presheaves, their maps, limits, colimits and exponentials.

Elements of a presheaf are dense integers per object; each carries a label
used only for display, serialization and structural comparison.  The action
of a morphism ``f: x -> y`` is a tuple indexed by elements of ``X(y)`` whose
entries are indices into ``X(x)``.
"""
from __future__ import annotations

import functools
import itertools
from collections.abc import Callable, Hashable, Iterable, Iterator, Mapping, Sequence
from typing import NamedTuple

from .errors import AuditError, BaseMismatchError, BudgetExceededError, StrictCatError
from .fincat import FinCat, delta_truncated

__all__ = [
    "Presheaf",
    "PshMap",
    "Limit",
    "Colimit",
    "Exponential",
    "representable",
    "representable_map",
    "terminal",
    "initial",
    "iter_maps",
    "nat_hom",
    "count_maps",
    "find_iso",
    "product",
    "pullback",
    "finite_limit",
    "coproduct",
    "pushout",
    "finite_colimit",
    "exponential",
    "exp_map",
    "to_terminal",
    "from_initial",
    "spine",
    "boundary",
    "sub_presheaf",
    "chain_objects",
    "chain_restrict",
    "iter_chains",
    "nerve",
    "functor_nerve",
    "pi0",
]


def _same_base(B1: FinCat, B2: FinCat) -> bool:
    return B1 is B2 or B1 == B2


def _check_base(*items) -> FinCat:
    base = items[0].base
    for it in items[1:]:
        if not _same_base(base, it.base):
            raise BaseMismatchError(f"base mismatch: {base!r} vs {it.base!r}")
    return base


class Presheaf:
    """A contravariant functor ``base^op -> FinSet``."""

    def __init__(
        self,
        base: FinCat,
        elems: Sequence[Sequence[Hashable]],
        action: Sequence[Sequence[int]],
        *,
        name: str | None = None,
    ):
        self.base = base
        self.elems = tuple(tuple(e) for e in elems)
        self.action = tuple(tuple(a) for a in action)
        self.name = name
        self._index: list[dict] | None = None
        self._hash: int | None = None
        self._factors: tuple[Presheaf, ...] | None = None

    @classmethod
    def from_rule(
        cls,
        base: FinCat,
        values: Mapping[Hashable, Sequence[Hashable]] | Callable[[Hashable], Sequence[Hashable]],
        act: Callable[[int, Hashable], Hashable],
        *,
        name: str | None = None,
    ) -> Presheaf:
        """Build from labelled values; ``act(m, label)`` gives the restricted label."""
        get = values if callable(values) else values.__getitem__
        elems = [list(get(x)) for x in base.objects]
        index = [{lab: i for i, lab in enumerate(e)} for e in elems]
        action = []
        for m in range(base.n_morphisms):
            s, t = base.src[m], base.tgt[m]
            action.append([index[s][act(m, lab)] for lab in elems[t]])
        return cls(base, elems, action, name=name)

    def size(self, x: int) -> int:
        return len(self.elems[x])

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(e) for e in self.elems)

    @property
    def total_size(self) -> int:
        return sum(self.sizes)

    def index_of(self, x: int, label: Hashable) -> int:
        if self._index is None:
            self._index = [{lab: i for i, lab in enumerate(e)} for e in self.elems]
        return self._index[x][label]

    def at(self, label: Hashable) -> tuple[Hashable, ...]:
        """Value at an object given by label."""
        return self.elems[self.base.index(label)]

    def act(self, m: int, e: int) -> int:
        return self.action[m][e]

    def validate(self) -> Presheaf:
        B = self.base
        if len(self.elems) != B.n_objects or len(self.action) != B.n_morphisms:
            raise AuditError("presheaf tables are total", (len(self.elems), len(self.action)))
        for x, es in enumerate(self.elems):
            if len(set(es)) != len(es):
                raise AuditError("element labels distinct", B.objects[x])
        for m in range(B.n_morphisms):
            a = self.action[m]
            if len(a) != self.size(B.tgt[m]) or any(not (0 <= v < self.size(B.src[m])) for v in a):
                raise AuditError("action maps the target value into the source value", B.describe(m))
        for x in range(B.n_objects):
            if self.action[B.identity[x]] != tuple(range(self.size(x))):
                raise AuditError("action of identity is identity", B.objects[x])
        for g, f in B.composable_pairs():
            gf = self.action[B.compose(g, f)]
            af, ag = self.action[f], self.action[g]
            for e in range(self.size(B.tgt[g])):
                if gf[e] != af[ag[e]]:
                    raise AuditError("contravariant functoriality", (B.labels[g], B.labels[f], self.elems[B.tgt[g]][e]))
        return self

    def _key(self):
        return (self.elems, self.action)

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Presheaf):
            return NotImplemented
        return self._key() == other._key() and _same_base(self.base, other.base)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((hash(self.base), self._key()))
        return self._hash

    def __repr__(self):
        name = f" {self.name}" if self.name else ""
        return f"<Presheaf{name} over {self.base.name or 'base'}: sizes {self.sizes}>"


class PshMap:
    """A natural transformation, stored as per-object index tables."""

    def __init__(self, source: Presheaf, target: Presheaf, components: Sequence[Sequence[int]]):
        self.source = source
        self.target = target
        self.components = tuple(tuple(c) for c in components)

    @property
    def base(self) -> FinCat:
        return self.source.base

    @classmethod
    def identity(cls, X: Presheaf) -> PshMap:
        return cls(X, X, [range(n) for n in X.sizes])

    def __call__(self, x: int, e: int) -> int:
        return self.components[x][e]

    def validate(self) -> PshMap:
        _check_base(self.source, self.target)
        X, Y, B = self.source, self.target, self.base
        for x in range(B.n_objects):
            comp = self.components[x]
            if len(comp) != X.size(x) or any(not (0 <= t < Y.size(x)) for t in comp):
                raise AuditError("component is a function", B.objects[x])
        for f in range(B.n_morphisms):
            x, y = B.src[f], B.tgt[f]
            cx, cy = self.components[x], self.components[y]
            for e in range(X.size(y)):
                if Y.action[f][cy[e]] != cx[X.action[f][e]]:
                    raise AuditError("naturality", (B.labels[f], X.elems[y][e]))
        return self

    def then(self, other: PshMap) -> PshMap:
        """``other ∘ self``."""
        return PshMap(
            self.source,
            other.target,
            [[c2[t] for t in c1] for c1, c2 in zip(self.components, other.components)],
        )

    def __matmul__(self, other: PshMap) -> PshMap:
        """``self @ other`` is ``self ∘ other``."""
        return other.then(self)

    def is_mono(self) -> bool:
        return all(len(set(c)) == len(c) for c in self.components)

    def is_epi(self) -> bool:
        return all(len(set(c)) == n for c, n in zip(self.components, self.target.sizes))

    def is_iso(self) -> bool:
        return self.is_mono() and self.is_epi()

    def inverse(self) -> PshMap:
        if not self.is_iso():
            raise StrictCatError("map is not invertible")
        inv = []
        for c in self.components:
            row = [0] * len(c)
            for e, t in enumerate(c):
                row[t] = e
            inv.append(row)
        return PshMap(self.target, self.source, inv)

    def __eq__(self, other):
        if not isinstance(other, PshMap):
            return NotImplemented
        return (
            self.components == other.components
            and self.source == other.source
            and self.target == other.target
        )

    def __hash__(self):
        return hash(self.components)

    def __lt__(self, other):
        return self.components < other.components

    def __repr__(self):
        return f"<PshMap {self.source!r} -> {self.target!r}>"


# -- basic objects --------------------------------------------------------


def representable(B: FinCat, c: Hashable) -> Presheaf:
    """``Hom_B(-, c)``; elements are morphism labels, action is precomposition."""
    ci = B.index(c)
    elems = [[B.labels[m] for m in B.hom(x, ci)] for x in range(B.n_objects)]
    pos = [{m: i for i, m in enumerate(B.hom(x, ci))} for x in range(B.n_objects)]
    action = []
    for f in range(B.n_morphisms):
        x, y = B.src[f], B.tgt[f]
        action.append([pos[x][B.compose(u, f)] for u in B.hom(y, ci)])
    return Presheaf(B, elems, action, name=f"y({c!r})")


def representable_map(B: FinCat, m: int) -> PshMap:
    """``y(m): y(src m) -> y(tgt m)`` given by postcomposition."""
    s, t = B.src[m], B.tgt[m]
    Ys, Yt = representable(B, B.objects[s]), representable(B, B.objects[t])
    comps = []
    for x in range(B.n_objects):
        pos = {u: i for i, u in enumerate(B.hom(x, t))}
        comps.append([pos[B.compose(m, u)] for u in B.hom(x, s)])
    return PshMap(Ys, Yt, comps)


def terminal(B: FinCat) -> Presheaf:
    return Presheaf(B, [["*"]] * B.n_objects, [[0]] * B.n_morphisms, name="1")


def initial(B: FinCat) -> Presheaf:
    return Presheaf(B, [[]] * B.n_objects, [[]] * B.n_morphisms, name="0")


def to_terminal(X: Presheaf) -> PshMap:
    return PshMap(X, terminal(X.base), [[0] * n for n in X.sizes])


def from_initial(X: Presheaf) -> PshMap:
    return PshMap(initial(X.base), X, [[] for _ in X.sizes])


def sub_presheaf(X: Presheaf, keep: Sequence[Iterable[int]]) -> PshMap:
    """Inclusion of the sub-presheaf generated by ``keep[x]`` at each object."""
    B = X.base
    chosen = [set() for _ in range(B.n_objects)]
    stack = [(x, e) for x in range(B.n_objects) for e in keep[x]]
    while stack:
        y, e = stack.pop()
        if e in chosen[y]:
            continue
        chosen[y].add(e)
        for f in B.into(y):
            stack.append((B.src[f], X.action[f][e]))
    picked = [sorted(c) for c in chosen]
    pos = [{e: i for i, e in enumerate(p)} for p in picked]
    elems = [[X.elems[x][e] for e in p] for x, p in enumerate(picked)]
    action = [[pos[B.src[f]][X.action[f][e]] for e in picked[B.tgt[f]]] for f in range(B.n_morphisms)]
    S = Presheaf(B, elems, action)
    return PshMap(S, X, picked)


# -- enumeration of maps --------------------------------------------------


def _object_order(B: FinCat) -> list[int]:
    return sorted(range(B.n_objects), key=lambda x: (-len(B.into(x)), x))


def iter_maps(
    X: Presheaf,
    Y: Presheaf,
    *,
    allowed: Mapping[tuple[int, int], Sequence[int]] | None = None,
    injective: bool = False,
) -> Iterator[tuple[tuple[int, ...], ...]]:
    """Enumerate component tables of natural transformations ``X -> Y``.

    ``allowed[(x, e)]`` restricts the image of element ``e`` at ``x``.
    Values are propagated along the action maps, so a choice at an element
    forces all of its restrictions.
    """
    B = _check_base(X, Y)
    n = B.n_objects
    assign = [[-1] * X.size(x) for x in range(n)]
    used = [set() for _ in range(n)] if injective else None
    allowed_sets = {k: set(v) for k, v in allowed.items()} if allowed else {}
    down = [[(f, B.src[f]) for f in B.into(y) if not B.is_identity(f)] for y in range(n)]
    units = [(x, e) for x in _object_order(B) for e in range(X.size(x))]
    Xa, Ya = X.action, Y.action

    def force(x, e, t, trail):
        stack = [(x, e, t)]
        while stack:
            x, e, t = stack.pop()
            cur = assign[x][e]
            if cur == t:
                continue
            if cur != -1:
                return False
            if allowed_sets and (x, e) in allowed_sets and t not in allowed_sets[(x, e)]:
                return False
            if injective:
                if t in used[x]:
                    return False
                used[x].add(t)
            assign[x][e] = t
            trail.append((x, e))
            for f, x2 in down[x]:
                stack.append((x2, Xa[f][e], Ya[f][t]))
        return True

    def undo(trail):
        for x, e in trail:
            if injective:
                used[x].discard(assign[x][e])
            assign[x][e] = -1

    def rec(k):
        while k < len(units) and assign[units[k][0]][units[k][1]] != -1:
            k += 1
        if k == len(units):
            yield tuple(tuple(a) for a in assign)
            return
        x, e = units[k]
        cands = allowed[(x, e)] if allowed and (x, e) in allowed else range(Y.size(x))
        for t in cands:
            trail = []
            if force(x, e, t, trail):
                yield from rec(k + 1)
            undo(trail)

    yield from rec(0)


@functools.lru_cache(maxsize=512)
def _nat_components(X: Presheaf, Y: Presheaf) -> tuple:
    return tuple(sorted(iter_maps(X, Y)))


def nat_hom(X: Presheaf, Y: Presheaf) -> list[PshMap]:
    """All natural transformations ``X -> Y``, sorted by component tables."""
    return [PshMap(X, Y, c) for c in _nat_components(X, Y)]


def count_maps(X: Presheaf, Y: Presheaf, **kwargs) -> int:
    return sum(1 for _ in iter_maps(X, Y, **kwargs))


def find_iso(X: Presheaf, Y: Presheaf) -> PshMap | None:
    """An isomorphism ``X -> Y`` if one exists."""
    _check_base(X, Y)
    if X.sizes != Y.sizes:
        return None
    for comps in iter_maps(X, Y, injective=True):
        return PshMap(X, Y, comps)
    return None


# -- limits ---------------------------------------------------------------


class Limit(NamedTuple):
    obj: Presheaf
    legs: tuple[PshMap, ...]
    index: tuple[dict, ...]  # per object: tuple of coordinates -> element

    def induced(self, maps: Sequence[PshMap]) -> PshMap:
        """The mediating map into the limit from a cone ``maps``."""
        W = maps[0].source
        comps = []
        for x in range(W.base.n_objects):
            row = []
            for e in range(W.size(x)):
                key = tuple(m.components[x][e] for m in maps)
                row.append(self.index[x][key])
            comps.append(row)
        return PshMap(W, self.obj, comps)


def _set_limit(sizes: Sequence[int], arrows: Sequence[tuple[int, int, Sequence[int]]]) -> list[tuple[int, ...]]:
    """Compatible families ``(a_i)`` with ``phi(a_i) = a_j`` for each arrow."""
    n = len(sizes)
    out_arrows = [[] for _ in range(n)]
    for i, j, phi in arrows:
        out_arrows[i].append((j, phi))
    order = sorted(range(n), key=lambda i: (-len(out_arrows[i]), i))
    assign = [-1] * n
    result = []

    def force(i, a, trail):
        stack = [(i, a)]
        while stack:
            i, a = stack.pop()
            if assign[i] == a:
                continue
            if assign[i] != -1:
                return False
            assign[i] = a
            trail.append(i)
            for j, phi in out_arrows[i]:
                stack.append((j, phi[a]))
        return True

    def rec(k):
        while k < n and assign[order[k]] != -1:
            k += 1
        if k == n:
            result.append(tuple(assign))
            return
        i = order[k]
        for a in range(sizes[i]):
            trail = []
            if force(i, a, trail):
                rec(k + 1)
            for t in trail:
                assign[t] = -1

    rec(0)
    result.sort()
    return result


def finite_limit(objects: Sequence[Presheaf], arrows: Sequence[tuple[int, int, PshMap]] = ()) -> Limit:
    """Limit of a finite diagram of presheaves, computed pointwise."""
    if not objects:
        raise StrictCatError("empty diagram has no base; use terminal(B)")
    B = _check_base(*objects, *(a[2] for a in arrows))
    elems, index, tuples = [], [], []
    for x in range(B.n_objects):
        fams = _set_limit(
            [X.size(x) for X in objects],
            [(i, j, m.components[x]) for i, j, m in arrows],
        )
        tuples.append(fams)
        index.append({t: k for k, t in enumerate(fams)})
        elems.append([tuple(objects[i].elems[x][a] for i, a in enumerate(t)) for t in fams])
    action = []
    for f in range(B.n_morphisms):
        x, y = B.src[f], B.tgt[f]
        action.append([
            index[x][tuple(objects[i].action[f][a] for i, a in enumerate(t))] for t in tuples[y]
        ])
    L = Presheaf(B, elems, action)
    legs = tuple(
        PshMap(L, X, [[t[i] for t in tuples[x]] for x in range(B.n_objects)])
        for i, X in enumerate(objects)
    )
    return Limit(L, legs, tuple(index))


def product(*factors: Presheaf) -> Limit:
    lim = finite_limit(factors)
    lim.obj._factors = tuple(factors)
    return lim


def pullback(f: PshMap, g: PshMap) -> Limit:
    """Pullback of ``f: A -> C`` and ``g: B -> C``; legs go to ``A`` and ``B``."""
    B = _check_base(f, g)
    if f.target != g.target:
        raise BaseMismatchError("pullback legs must share a codomain")
    A, Bo = f.source, g.source
    elems, index, pairs = [], [], []
    for x in range(B.n_objects):
        ps = [
            (a, b)
            for a in range(A.size(x))
            for b in range(Bo.size(x))
            if f.components[x][a] == g.components[x][b]
        ]
        pairs.append(ps)
        index.append({p: k for k, p in enumerate(ps)})
        elems.append([(A.elems[x][a], Bo.elems[x][b]) for a, b in ps])
    action = [
        [index[B.src[m]][(A.action[m][a], Bo.action[m][b])] for a, b in pairs[B.tgt[m]]]
        for m in range(B.n_morphisms)
    ]
    P = Presheaf(B, elems, action)
    legs = (
        PshMap(P, A, [[a for a, _ in ps] for ps in pairs]),
        PshMap(P, Bo, [[b for _, b in ps] for ps in pairs]),
    )
    return Limit(P, legs, tuple(index))


# -- colimits -------------------------------------------------------------


class Colimit(NamedTuple):
    obj: Presheaf
    legs: tuple[PshMap, ...]

    def induced(self, maps: Sequence[PshMap]) -> PshMap:
        """The mediating map out of the colimit for a cocone ``maps``."""
        P = self.obj
        Z = maps[0].target
        comps = []
        for x in range(P.base.n_objects):
            row = [None] * P.size(x)
            for leg, m in zip(self.legs, maps):
                for e, cls in enumerate(leg.components[x]):
                    t = m.components[x][e]
                    if row[cls] is None:
                        row[cls] = t
                    elif row[cls] != t:
                        raise StrictCatError("maps do not form a cocone")
            comps.append(row)
        return PshMap(P, Z, comps)


def _set_colimit(sizes: Sequence[int], arrows: Sequence[tuple[int, int, Sequence[int]]]):
    """Disjoint union modulo ``a ~ phi(a)``; classes are keyed by least member."""
    offsets = list(itertools.accumulate([0, *sizes]))
    parent = list(range(offsets[-1]))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for i, j, phi in arrows:
        for a, b in enumerate(phi):
            ru, rv = find(offsets[i] + a), find(offsets[j] + b)
            if ru != rv:
                if ru < rv:
                    parent[rv] = ru
                else:
                    parent[ru] = rv
    roots = sorted({find(u) for u in range(offsets[-1])})
    cls_of_root = {r: k for k, r in enumerate(roots)}
    reps = []
    for r in roots:
        i = next(k for k in range(len(sizes)) if offsets[k] <= r < offsets[k + 1])
        reps.append((i, r - offsets[i]))
    cls = [[cls_of_root[find(offsets[i] + a)] for a in range(sizes[i])] for i in range(len(sizes))]
    return reps, cls


def finite_colimit(objects: Sequence[Presheaf], arrows: Sequence[tuple[int, int, PshMap]] = ()) -> Colimit:
    """Colimit of a finite diagram of presheaves, computed pointwise by union-find."""
    if not objects:
        raise StrictCatError("empty diagram has no base; use initial(B)")
    B = _check_base(*objects, *(a[2] for a in arrows))
    elems, classes, reps_all = [], [], []
    for x in range(B.n_objects):
        reps, cls = _set_colimit(
            [X.size(x) for X in objects],
            [(i, j, m.components[x]) for i, j, m in arrows],
        )
        reps_all.append(reps)
        classes.append(cls)
        elems.append([(i, objects[i].elems[x][a]) for i, a in reps])
    action = []
    for f in range(B.n_morphisms):
        x, y = B.src[f], B.tgt[f]
        action.append([classes[x][i][objects[i].action[f][a]] for i, a in reps_all[y]])
    P = Presheaf(B, elems, action)
    legs = tuple(
        PshMap(X, P, [classes[x][i] for x in range(B.n_objects)]) for i, X in enumerate(objects)
    )
    return Colimit(P, legs)


def coproduct(*summands: Presheaf) -> Colimit:
    return finite_colimit(summands)


def pushout(f: PshMap, g: PshMap) -> Colimit:
    """Pushout of ``f: C -> A`` and ``g: C -> B``; legs come from ``A`` and ``B``."""
    if f.source != g.source:
        raise BaseMismatchError("pushout legs must share a domain")
    col = finite_colimit([f.source, f.target, g.target], [(0, 1, f), (0, 2, g)])
    return Colimit(col.obj, col.legs[1:])


# -- exponentials ---------------------------------------------------------


class Exponential:
    """The exponential ``Y^X`` with evaluation and (un)currying.

    The value at ``b`` is the set of maps ``y(b) × X -> Y``, labelled by
    their component tables.
    """

    def __init__(self, X: Presheaf, Y: Presheaf, *, allowed=None, max_elements: int | None = None):
        """``allowed(b, P)``, if given, restricts the maps ``P = y(b) × X -> Y``
        (as for :func:`iter_maps`); the restricted families must be closed
        under the action, giving a sub-presheaf of the exponential.
        ``max_elements`` caps the size of each value; exceeding it raises
        :class:`BudgetExceededError`."""
        B = _check_base(X, Y)
        self.X, self.Y, self.base = X, Y, B
        self._gather: dict[int, list[list[int]]] = {}
        self._hom_pos = [
            [{u: i for i, u in enumerate(B.hom(x, b))} for x in range(B.n_objects)]
            for b in range(B.n_objects)
        ]
        elems = []
        for b in range(B.n_objects):
            P = product(representable(B, B.objects[b]), X).obj
            found = iter_maps(P, Y, allowed=None if allowed is None else allowed(b, P))
            if max_elements is not None:
                found = itertools.islice(found, max_elements + 1)
            found = sorted(found)
            if max_elements is not None and len(found) > max_elements:
                raise BudgetExceededError("exponential elements per object", max_elements)
            elems.append(found)
        self._lookup = [{c: i for i, c in enumerate(es)} for es in elems]
        action = []
        for g in range(B.n_morphisms):
            b2, b = B.src[g], B.tgt[g]
            action.append([self._lookup[b2][self._restrict(alpha, g)] for alpha in elems[b]])
        self.obj = Presheaf(B, elems, action, name="exp")

    def _restrict(self, alpha, g):
        """``alpha ∘ (y(g) × id)`` for ``g: b2 -> b``."""
        idx = self._gather.get(g)
        if idx is None:
            B, X = self.base, self.X
            b2, b = B.src[g], B.tgt[g]
            idx = []
            for x in range(B.n_objects):
                nx = X.size(x)
                pos = self._hom_pos[b][x]
                idx.append([pos[B.compose(g, u)] * nx + e for u in B.hom(x, b2) for e in range(nx)])
            self._gather[g] = idx
        return tuple(tuple(ax[i] for i in ix) for ax, ix in zip(alpha, idx))

    def element(self, b: int, comps) -> int:
        return self._lookup[b][tuple(tuple(c) for c in comps)]

    def ev(self) -> PshMap:
        """Evaluation ``Y^X × X -> Y``."""
        B, X = self.base, self.X
        P = product(self.obj, X)
        comps = []
        for x in range(B.n_objects):
            iid = self._hom_pos[x][x][B.identity[x]]
            nx = X.size(x)
            comps.append([self.obj.elems[x][a][x][iid * nx + e] for a, e in zip(P.legs[0].components[x], P.legs[1].components[x])])
        return PshMap(P.obj, self.Y, comps)

    def curry(self, phi: PshMap) -> PshMap:
        """Transpose ``phi: Z × X -> Y`` (domain built by :func:`product`) to ``Z -> Y^X``."""
        B, X = self.base, self.X
        Z = _left_factor(phi)
        comps = []
        for b in range(B.n_objects):
            row = []
            for z in range(Z.size(b)):
                alpha = []
                for x in range(B.n_objects):
                    nx = X.size(x)
                    r = []
                    for u in B.hom(x, b):
                        zu = Z.action[u][z]
                        r.extend(phi.components[x][zu * nx + e] for e in range(nx))
                    alpha.append(tuple(r))
                row.append(self._lookup[b][tuple(alpha)])
            comps.append(row)
        return PshMap(Z, self.obj, comps)

    def uncurry(self, psi: PshMap) -> PshMap:
        """Transpose ``psi: Z -> Y^X`` to ``Z × X -> Y``."""
        P = product(psi.source, self.X)
        return PshMap(P.obj, self.Y, _uncurry_components(self, psi, P))


def _uncurry_components(E: Exponential, psi: PshMap, P: Limit):
    B, X = E.base, E.X
    comps = []
    for x in range(B.n_objects):
        iid = E._hom_pos[x][x][B.identity[x]]
        nx = X.size(x)
        row = []
        for z, e in zip(P.legs[0].components[x], P.legs[1].components[x]):
            alpha = E.obj.elems[x][psi.components[x][z]]
            row.append(alpha[x][iid * nx + e])
        comps.append(row)
    return comps


def _left_factor(phi: PshMap) -> Presheaf:
    P = phi.source
    factors = getattr(P, "_factors", None)
    if factors is None:
        raise StrictCatError("curry needs a domain built by product(Z, X)")
    return factors[0]


def exponential(X: Presheaf, Y: Presheaf, *, allowed=None, max_elements: int | None = None) -> Exponential:
    return Exponential(X, Y, allowed=allowed, max_elements=max_elements)


def exp_map(E_src: Exponential, E_tgt: Exponential, f: PshMap | None = None, p: PshMap | None = None) -> PshMap:
    """The map ``Y^A -> Y'^{A'}`` given by ``alpha |-> p ∘ alpha ∘ (id × f)``.

    ``E_src`` is ``Y^A`` and ``E_tgt`` is ``Y'^{A'}``; ``f: A' -> A`` and
    ``p: Y -> Y'`` default to identities.
    """
    B = E_src.base
    A, A2 = E_src.X, E_tgt.X
    comps = []
    for b in range(B.n_objects):
        row = []
        for alpha in E_src.obj.elems[b]:
            new = []
            for x in range(B.n_objects):
                na, na2 = A.size(x), A2.size(x)
                r = []
                for iu in range(len(B.hom(x, b))):
                    for e2 in range(na2):
                        e = f.components[x][e2] if f is not None else e2
                        t = alpha[x][iu * na + e]
                        r.append(p.components[x][t] if p is not None else t)
                new.append(tuple(r))
            row.append(E_tgt._lookup[b][tuple(new)])
        comps.append(row)
    return PshMap(E_src.obj, E_tgt.obj, comps)


# -- simplicial objects ---------------------------------------------------


def spine(N: int, n: int) -> tuple[Presheaf, PshMap]:
    """The spine ``G[n]`` over ``Δ≤N`` with its inclusion into ``F[n]``.

    Built as the colimit of ``n`` copies of ``F[1]`` glued along ``F[0]``.
    """
    if not (2 <= n <= N):
        raise ValueError(f"spine needs 2 <= n <= N, got n={n}, N={N}")
    D = _delta(N)
    F0, F1, Fn = (representable(D, k) for k in (0, 1, n))
    objects = [F1] * n + [F0] * (n - 1)
    arrows = []
    src_v = representable_map(D, D.find(0, 1, (0,)))
    tgt_v = representable_map(D, D.find(0, 1, (1,)))
    for i in range(n - 1):
        arrows.append((n + i, i, tgt_v))
        arrows.append((n + i, i + 1, src_v))
    col = finite_colimit(objects, arrows)
    edges = [representable_map(D, D.find(1, n, (i, i + 1))) for i in range(n)]
    vertices = [representable_map(D, D.find(0, n, (i + 1,))) for i in range(n - 1)]
    incl = col.induced(edges + vertices)
    G = col.obj
    G.name = f"G[{n}]"
    return G, incl


def boundary(N: int, n: int) -> PshMap:
    """Inclusion of the boundary ``∂F[n]`` into ``F[n]`` over ``Δ≤N``."""
    D = _delta(N)
    Fn = representable(D, n)
    keep = [[e for e, lab in enumerate(Fn.elems[x]) if len(set(lab)) < n + 1] for x in range(D.n_objects)]
    return sub_presheaf(Fn, keep)


@functools.lru_cache(maxsize=16)
def _delta(N: int) -> FinCat:
    return delta_truncated(N)


def chain_objects(E: FinCat, x0: int, fs: Sequence[int]) -> list[int]:
    xs = [x0]
    for f in fs:
        xs.append(E.tgt[f])
    return xs


def chain_restrict(E: FinCat, x0: int, fs: Sequence[int], alpha: Sequence[int]) -> tuple[int, tuple[int, ...]]:
    """Reindex the chain ``x0 -f1-> ... -fn-> xn`` along a monotone map ``alpha``."""
    xs = chain_objects(E, x0, fs)
    gs = []
    for j in range(1, len(alpha)):
        a, b = alpha[j - 1], alpha[j]
        m = E.identity[xs[a]]
        for i in range(a, b):
            m = E.compose(fs[i], m)
        gs.append(m)
    return xs[alpha[0]], tuple(gs)


def iter_chains(E: FinCat, n: int, start: int | None = None) -> Iterator[tuple[int, tuple[int, ...]]]:
    """Chains of ``n`` composable morphisms as ``(x0, (f1, ..., fn))``."""
    starts = range(E.n_objects) if start is None else [start]
    for x0 in starts:
        yield from _extend_chain(E, x0, x0, (), n)


def _extend_chain(E, x0, cur, fs, n):
    if len(fs) == n:
        yield (x0, fs)
        return
    for f in E.out_of(cur):
        yield from _extend_chain(E, x0, E.tgt[f], fs + (f,), n)


def nerve(E: FinCat, N: int) -> Presheaf:
    """The nerve of ``E`` truncated at level ``N``; elements are labelled ``(x0, (f1, ..., fn))``."""
    D = _delta(N)
    chains = [list(iter_chains(E, n)) for n in range(N + 1)]
    pos = [{c: i for i, c in enumerate(cs)} for cs in chains]
    action = []
    for a in range(D.n_morphisms):
        m, n, alpha = D.src[a], D.tgt[a], D.labels[a]
        action.append([pos[m][chain_restrict(E, x0, fs, alpha)] for x0, fs in chains[n]])
    return Presheaf(D, chains, action, name=f"N({E.name or 'C'})")


def functor_nerve(F, N: int) -> PshMap:
    """``N(F): N(A) -> N(B)`` for a functor ``F: A -> B``, truncated at ``N``."""
    NA, NB = nerve(F.source, N), nerve(F.target, N)
    comps = [
        [NB.index_of(n, (F.obj_map[x0], tuple(F.mor_map[f] for f in fs))) for x0, fs in NA.elems[n]]
        for n in range(N + 1)
    ]
    return PshMap(NA, NB, comps)


def pi0(X: Presheaf) -> tuple[int, list[int]]:
    """Connected components of a presheaf over a truncated simplex category.

    Returns the number of components and the component of each vertex.
    """
    D = X.base
    if D.delta_level is None:
        raise StrictCatError("pi0 needs a presheaf over a truncated simplex category")
    n0 = X.size(0)
    if D.delta_level == 0:
        return n0, list(range(n0))
    faces = [X.action[D.find(0, 1, (i,))] for i in (0, 1)]
    reps, cls = _set_colimit([n0, X.size(1)], [(1, 0, faces[0]), (1, 0, faces[1])])
    return len(reps), cls[0]
