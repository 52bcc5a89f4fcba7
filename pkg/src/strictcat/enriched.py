"""Categories enriched in presheaves over a finite index category ``D``.

Composition is stored as explicit tables: ``comp[(x, y, z)][d]`` is a flat
tuple indexed by ``i * |H(y,z)(d)| + j`` holding the index of ``g ∘ f`` for
``f = H(x,y)(d)[i]`` and ``g = H(y,z)(d)[j]``.  This matches the element
order of :func:`strictcat.presheaf.product`, so the same tables are the
components of the composition maps ``H(x,y) × H(y,z) -> H(x,z)``.
"""
from __future__ import annotations

import itertools
from collections.abc import Hashable, Iterator, Mapping, Sequence
from dataclasses import dataclass, field

from .errors import AuditError, BaseMismatchError, StrictCatError
from .fincat import CatFunctor, FinCat
from .kanext import d_simplicial, und
from .presheaf import Presheaf, PshMap, iter_maps, product, representable, terminal

__all__ = [
    "EnrichedCat",
    "EnrichedFunctor",
    "PshFunctor",
    "SegalReport",
    "und_levelwise",
    "d_nerve",
    "strict_segal_check",
    "simplicial_levels",
    "from_nerve",
    "nerve_roundtrip",
    "iter_enriched_functors",
    "nerve_map",
    "representable_functor",
    "constant_functor",
    "enriched_nat",
    "nat_set",
    "yoneda_map",
]


class EnrichedCat:
    def __init__(
        self,
        index: FinCat,
        objects: Sequence[Hashable],
        hom: Mapping[tuple[int, int], Presheaf],
        comp: Mapping[tuple[int, int, int], Sequence[Sequence[int]]],
        unit: Sequence[Sequence[int]],
        *,
        name: str | None = None,
    ):
        self.index = index
        self.objects = tuple(objects)
        self.hom = dict(hom)
        self.comp = {k: tuple(tuple(t) for t in v) for k, v in comp.items()}
        self.unit = tuple(tuple(u) for u in unit)
        self.name = name
        self._obj_index = {x: i for i, x in enumerate(self.objects)}

    @property
    def n_objects(self) -> int:
        return len(self.objects)

    def obj(self, label: Hashable) -> int:
        try:
            return self._obj_index[label]
        except KeyError:
            raise StrictCatError(f"unknown object {label!r} of enriched category") from None

    def H(self, x: int, y: int) -> Presheaf:
        return self.hom[(x, y)]

    def mul(self, d: int, x: int, y: int, z: int, f: int, g: int) -> int:
        """Index of ``g ∘ f`` in ``H(x,z)(d)``."""
        return self.comp[(x, y, z)][d][f * self.hom[(y, z)].size(d) + g]

    def compose_map(self, x: int, y: int, z: int) -> PshMap:
        P = product(self.hom[(x, y)], self.hom[(y, z)]).obj
        return PshMap(P, self.hom[(x, z)], self.comp[(x, y, z)])

    # -- construction ---------------------------------------------------

    @classmethod
    def from_levels(
        cls,
        D: FinCat,
        levels: Sequence[FinCat],
        transport: Mapping[int, Sequence[int]] | None = None,
        *,
        name: str | None = None,
    ) -> EnrichedCat:
        """Assemble from categories ``levels[d]`` sharing one object tuple.

        ``transport[f]`` for ``f: d' -> d`` maps morphism ids of ``levels[d]``
        to those of ``levels[d']``; missing entries must be identity maps.
        """
        transport = dict(transport or {})
        objs = levels[0].objects
        for L in levels:
            if L.objects != objs:
                raise AuditError("levels share their objects", L.name)
        n = len(objs)
        hom, comp = {}, {}
        homs = {(x, y): [L.hom(x, y) for L in levels] for x in range(n) for y in range(n)}
        pos = {k: [{m: i for i, m in enumerate(h)} for h in v] for k, v in homs.items()}
        for (x, y), per_level in homs.items():
            elems = [[levels[d].labels[m] for m in per_level[d]] for d in range(D.n_objects)]
            action = []
            for f in range(D.n_morphisms):
                d2, d = D.src[f], D.tgt[f]
                tr = transport.get(f)
                if tr is None:
                    if d2 != d:
                        raise AuditError("transport given for every non-endomorphism", D.describe(f))
                    action.append(list(range(len(per_level[d]))))
                else:
                    action.append([pos[(x, y)][d2][tr[m]] for m in per_level[d]])
            hom[(x, y)] = Presheaf(D, elems, action)
        for x, y, z in itertools.product(range(n), repeat=3):
            tables = []
            for d in range(D.n_objects):
                L = levels[d]
                p = pos[(x, z)][d]
                tables.append([p[L.compose(g, f)] for f in homs[(x, y)][d] for g in homs[(y, z)][d]])
            comp[(x, y, z)] = tables
        unit = [
            [pos[(x, x)][d][levels[d].identity[x]] for d in range(D.n_objects)] for x in range(n)
        ]
        return cls(D, objs, hom, comp, unit, name=name)

    @classmethod
    def discrete_on(cls, D: FinCat, C: FinCat, *, name: str | None = None) -> EnrichedCat:
        """``C`` with every hom-presheaf constant (trivial enrichment)."""
        return cls.from_levels(D, [C] * D.n_objects, {
            f: list(range(C.n_morphisms)) for f in range(D.n_morphisms)
        }, name=name or C.name)

    # -- audit ----------------------------------------------------------

    def validate(self) -> EnrichedCat:
        D, n = self.index, self.n_objects
        for x in range(n):
            for y in range(n):
                H = self.hom.get((x, y))
                if H is None:
                    raise AuditError("hom-presheaf for every pair", (self.objects[x], self.objects[y]))
                if not (H.base is D or H.base == D):
                    raise BaseMismatchError("hom-presheaves live over the index category")
                H.validate()
        for x in range(n):
            H = self.hom[(x, x)]
            for f in range(D.n_morphisms):
                if H.action[f][self.unit[x][D.tgt[f]]] != self.unit[x][D.src[f]]:
                    raise AuditError("unit is natural", (self.objects[x], D.labels[f]))
        for x, y, z in itertools.product(range(n), repeat=3):
            try:
                self.compose_map(x, y, z).validate()
            except AuditError as exc:
                raise AuditError("composition is natural", (self.objects[x], self.objects[y], self.objects[z], exc.witness)) from None
        for d in range(D.n_objects):
            for x, y in itertools.product(range(n), repeat=2):
                for f in range(self.hom[(x, y)].size(d)):
                    if self.mul(d, x, x, y, self.unit[x][d], f) != f:
                        raise AuditError("left unit law", (D.objects[d], self.objects[x], self.objects[y], f))
                    if self.mul(d, x, y, y, f, self.unit[y][d]) != f:
                        raise AuditError("right unit law", (D.objects[d], self.objects[x], self.objects[y], f))
            for w, x, y, z in itertools.product(range(n), repeat=4):
                for f in range(self.hom[(w, x)].size(d)):
                    for g in range(self.hom[(x, y)].size(d)):
                        gf = self.mul(d, w, x, y, f, g)
                        for h in range(self.hom[(y, z)].size(d)):
                            if self.mul(d, w, y, z, gf, h) != self.mul(d, w, x, z, f, self.mul(d, x, y, z, g, h)):
                                raise AuditError("associativity", (D.objects[d], (w, x, y, z), (f, g, h)))
        return self

    def __repr__(self):
        return f"<EnrichedCat {self.name or ''} over {self.index.name}: {self.n_objects} objects>"


@dataclass
class EnrichedFunctor:
    source: EnrichedCat
    target: EnrichedCat
    obj_map: tuple[int, ...]
    # per (x, y): per d, map of element indices
    hom_maps: dict[tuple[int, int], tuple[tuple[int, ...], ...]]

    def hom_pshmap(self, x: int, y: int) -> PshMap:
        Fx, Fy = self.obj_map[x], self.obj_map[y]
        return PshMap(self.source.hom[(x, y)], self.target.hom[(Fx, Fy)], self.hom_maps[(x, y)])

    def validate(self) -> EnrichedFunctor:
        S, T = self.source, self.target
        D = S.index
        n = S.n_objects
        for x, y in itertools.product(range(n), repeat=2):
            self.hom_pshmap(x, y).validate()
        F = self.obj_map
        for d in range(D.n_objects):
            for x in range(n):
                if self.hom_maps[(x, x)][d][S.unit[x][d]] != T.unit[F[x]][d]:
                    raise AuditError("functor preserves units", (D.objects[d], S.objects[x]))
            for x, y, z in itertools.product(range(n), repeat=3):
                mxy, myz, mxz = self.hom_maps[(x, y)][d], self.hom_maps[(y, z)][d], self.hom_maps[(x, z)][d]
                for f in range(S.hom[(x, y)].size(d)):
                    for g in range(S.hom[(y, z)].size(d)):
                        if mxz[S.mul(d, x, y, z, f, g)] != T.mul(d, F[x], F[y], F[z], mxy[f], myz[g]):
                            raise AuditError("functor preserves composition", (D.objects[d], (x, y, z), (f, g)))
        return self

    def is_iso(self) -> bool:
        if sorted(self.obj_map) != list(range(self.target.n_objects)):
            return False
        return all(self.hom_pshmap(x, y).is_iso() for x, y in self.hom_maps)


# -- level-wise underlying categories -------------------------------------


def und_levelwise(C: EnrichedCat) -> tuple[list[FinCat], dict[int, CatFunctor]]:
    """The categories ``Und_d C`` and, for ``f: d' -> d``, the functor ``Und_d C -> Und_d' C``."""
    D, n = C.index, C.n_objects
    cats, offsets = [], []
    for d in range(D.n_objects):
        mors, off = [], {}
        for x in range(n):
            for y in range(n):
                off[(x, y)] = len(mors)
                H = C.hom[(x, y)]
                mors.extend((H.elems[d][e], x, y) for e in range(H.size(d)))
        comp = {}
        for x, y, z in itertools.product(range(n), repeat=3):
            for f in range(C.hom[(x, y)].size(d)):
                for g in range(C.hom[(y, z)].size(d)):
                    comp[(off[(y, z)] + g, off[(x, y)] + f)] = off[(x, z)] + C.mul(d, x, y, z, f, g)
        ident = [off[(x, x)] + C.unit[x][d] for x in range(n)]
        cats.append(FinCat(C.objects, mors, ident, comp, name=f"Und_{D.objects[d]}"))
        offsets.append(off)
    functors = {}
    for f in range(D.n_morphisms):
        d2, d = D.src[f], D.tgt[f]
        mor_map = []
        for x in range(n):
            for y in range(n):
                H = C.hom[(x, y)]
                mor_map.extend(offsets[d2][(x, y)] + H.action[f][e] for e in range(H.size(d)))
        functors[f] = CatFunctor(cats[d], cats[d2], list(range(n)), mor_map)
    return cats, functors


# -- D-nerve --------------------------------------------------------------


def _enriched_chains(C: EnrichedCat, d: int, k: int) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
    out = []

    def rec(xs, fs):
        if len(fs) == k:
            out.append((xs, fs))
            return
        x = xs[-1]
        for y in range(C.n_objects):
            for e in range(C.hom[(x, y)].size(d)):
                rec(xs + (y,), fs + (e,))

    for x0 in range(C.n_objects):
        rec((x0,), ())
    return out


def _chain_reindex(C: EnrichedCat, d: int, xs, fs, alpha) -> tuple[tuple[int, ...], tuple[int, ...]]:
    ys = tuple(xs[a] for a in alpha)
    gs = []
    for j in range(1, len(alpha)):
        a, b = alpha[j - 1], alpha[j]
        m = C.unit[xs[a]][d]
        for i in range(a, b):
            m = C.mul(d, xs[a], xs[i], xs[i + 1], m, fs[i])
        gs.append(m)
    return ys, tuple(gs)


def d_nerve(C: EnrichedCat, K: int) -> Presheaf:
    """The nerve over ``D × Δ≤K``; elements are ``(object labels, hom element labels)``."""
    D = C.index
    B = d_simplicial(D, K)
    Dl = B.factors[1]
    chains = {}
    pos = {}
    for x in range(B.n_objects):
        dl, k = B.objects[x]
        cs = _enriched_chains(C, D.index(dl), k)
        chains[x] = cs
        pos[x] = {c: i for i, c in enumerate(cs)}
    elems = []
    for x in range(B.n_objects):
        d = D.index(B.objects[x][0])
        out = []
        for xs, fs in chains[x]:
            labs = tuple(C.hom[(xs[i], xs[i + 1])].elems[d][e] for i, e in enumerate(fs))
            out.append((tuple(C.objects[o] for o in xs), labs))
        elems.append(out)
    action = []
    for m in range(B.n_morphisms):
        h, a = B.labels[m]
        s, t = B.src[m], B.tgt[m]
        d2 = D.src[h]
        alpha = Dl.labels[a]
        row = []
        for xs, fs in chains[t]:
            moved = tuple(C.hom[(xs[i], xs[i + 1])].action[h][e] for i, e in enumerate(fs))
            row.append(pos[s][_chain_reindex(C, d2, xs, moved, alpha)])
        action.append(row)
    return Presheaf(B, elems, action, name=f"N_D({C.name or 'C'})")


# -- strict Segal condition -----------------------------------------------


def simplicial_levels(X: Presheaf) -> list[tuple[Hashable, Presheaf]]:
    """Split a presheaf over ``Δ≤K`` or ``D × Δ≤K`` into simplicial sets, one per ``d``."""
    B = X.base
    if B.delta_level is not None:
        return [(None, X)]
    if B.factors and len(B.factors) == 2 and B.factors[1].delta_level is not None:
        D, Dl = B.factors
        return [(d, und(X, d, D, Dl.delta_level)) for d in D.objects]
    raise StrictCatError("expected a presheaf over Δ≤K or D × Δ≤K")


@dataclass
class SegalReport:
    passed: bool
    checked: list[tuple[Hashable, int]] = field(default_factory=list)
    # first failure: level d, n, kind ("not injective" or "not surjective"), element, counts
    witness: dict | None = None

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checked": [[d, n] for d, n in self.checked], "witness": self.witness}


def _segal_fibre_product(S: Presheaf, n: int) -> list[tuple[int, ...]]:
    D = S.base
    src = S.action[D.find(0, 1, (0,))]
    tgt = S.action[D.find(0, 1, (1,))]
    out = [(e,) for e in range(S.size(1))]
    for _ in range(n - 1):
        out = [t + (e,) for t in out for e in range(S.size(1)) if tgt[t[-1]] == src[e]]
    return out


def strict_segal_check(X: Presheaf) -> SegalReport:
    """Decide whether ``X_n -> X_1 ×_{X_0} ... ×_{X_0} X_1`` is a bijection for every ``2 <= n <= K``."""
    report = SegalReport(True)
    for d, S in simplicial_levels(X):
        D = S.base
        K = D.delta_level
        for n in range(2, K + 1):
            report.checked.append((d, n))
            spine = [S.action[D.find(1, n, (i, i + 1))] for i in range(n)]
            target = _segal_fibre_product(S, n)
            seen = {}
            for e in range(S.size(n)):
                key = tuple(sp[e] for sp in spine)
                if key in seen:
                    report.passed = False
                    report.witness = {
                        "d": d, "n": n, "kind": "not injective",
                        "element": S.elems[n][e], "other": S.elems[n][seen[key]],
                        "counts": [S.size(n), len(target)],
                    }
                    return report
                seen[key] = e
            for t in target:
                if t not in seen:
                    report.passed = False
                    report.witness = {
                        "d": d, "n": n, "kind": "not surjective",
                        "element": [S.elems[1][e] for e in t],
                        "counts": [S.size(n), len(target)],
                    }
                    return report
    return report


def from_nerve(X: Presheaf) -> EnrichedCat:
    """Reconstruct an enriched category from a Segal presheaf over ``D × Δ≤K`` (``K >= 2``)
    whose 0-level is constant (every action at level 0 is the identity)."""
    B = X.base
    if not (B.factors and len(B.factors) == 2):
        raise StrictCatError("expected a presheaf over D × Δ≤K")
    D, Dl = B.factors
    K = Dl.delta_level
    if K is None or K < 2:
        raise StrictCatError("reconstruction needs K >= 2")
    rep = strict_segal_check(X)
    if not rep.passed:
        raise AuditError("strict Segal condition", rep.witness)
    level0 = [B.index((d, 0)) for d in D.objects]
    objs = X.elems[level0[0]]
    for m in range(B.n_morphisms):
        if B.src[m] in level0 and B.tgt[m] in level0:
            if X.action[m] != tuple(range(len(objs))) or X.elems[B.src[m]] != objs:
                raise AuditError("constant 0-level", B.describe(m))
    n = len(objs)
    hom_elems = {(x, y): [[] for _ in D.objects] for x in range(n) for y in range(n)}
    where = [dict() for _ in D.objects]  # d -> edge index -> (x, y, position)
    tri = []
    for di, dl in enumerate(D.objects):
        o1, o2 = B.index((dl, 1)), B.index((dl, 2))
        s = X.action[B.find(level0[di], o1, (D.identity[di], Dl.find(0, 1, (0,))))]
        t = X.action[B.find(level0[di], o1, (D.identity[di], Dl.find(0, 1, (1,))))]
        for e in range(X.size(o1)):
            lst = hom_elems[(s[e], t[e])][di]
            where[di][e] = (s[e], t[e], len(lst))
            lst.append(e)
        faces = [X.action[B.find(o1, o2, (D.identity[di], Dl.find(1, 2, lab)))] for lab in ((0, 1), (1, 2), (0, 2))]
        tri.append({(faces[0][sig], faces[1][sig]): faces[2][sig] for sig in range(X.size(o2))})
    hom = {}
    for (x, y), per in hom_elems.items():
        elems = [[X.elems[B.index((dl, 1))][e] for e in per[di]] for di, dl in enumerate(D.objects)]
        action = []
        for f in range(D.n_morphisms):
            d2, d = D.src[f], D.tgt[f]
            m = B.find(B.index((D.objects[d2], 1)), B.index((D.objects[d], 1)), (f, Dl.identity[1]))
            action.append([where[d2][X.action[m][e]][2] for e in per[d]])
        hom[(x, y)] = Presheaf(D, elems, action)
    comp = {}
    for x, y, z in itertools.product(range(n), repeat=3):
        tables = []
        for di in range(D.n_objects):
            row = []
            for f in hom_elems[(x, y)][di]:
                for g in hom_elems[(y, z)][di]:
                    row.append(where[di][tri[di][(f, g)]][2])
            tables.append(row)
        comp[(x, y, z)] = tables
    unit = []
    for x in range(n):
        u = []
        for di, dl in enumerate(D.objects):
            m = B.find(B.index((dl, 1)), level0[di], (D.identity[di], Dl.find(1, 0, (0, 0))))
            u.append(where[di][X.action[m][x]][2])
        unit.append(u)
    return EnrichedCat(D, objs, hom, comp, unit, name="from_nerve")


def nerve_roundtrip(C: EnrichedCat, K: int = 3) -> EnrichedFunctor:
    """The canonical comparison ``C -> from_nerve(d_nerve(C, K))``, identity on labels."""
    R = from_nerve(d_nerve(C, K))
    n, D = C.n_objects, C.index
    obj_map = tuple(R.objects.index(((C.objects[x],), ())) for x in range(n))
    hom_maps = {}
    for x, y in itertools.product(range(n), repeat=2):
        H, H2 = C.hom[(x, y)], R.hom[(obj_map[x], obj_map[y])]
        key = (C.objects[x], C.objects[y])
        hom_maps[(x, y)] = tuple(
            tuple(H2.index_of(d, (key, (lab,))) for lab in H.elems[d]) for d in range(D.n_objects)
        )
    return EnrichedFunctor(C, R, obj_map, hom_maps)


# -- enriched functors ----------------------------------------------------


def iter_enriched_functors(C: EnrichedCat, E: EnrichedCat) -> Iterator[EnrichedFunctor]:
    """All enriched functors ``C -> E`` (composition and units checked as soon as decidable)."""
    D = C.index
    n, m = C.n_objects, E.n_objects
    pairs = [(x, y) for x in range(n) for y in range(n)]
    for F in itertools.product(range(m), repeat=n):
        chosen: dict[tuple[int, int], tuple] = {}

        def consistent(newpair):
            for x, y, z in itertools.product(range(n), repeat=3):
                if newpair not in ((x, y), (y, z), (x, z)):
                    continue
                if (x, y) not in chosen or (y, z) not in chosen or (x, z) not in chosen:
                    continue
                mxy, myz, mxz = chosen[(x, y)], chosen[(y, z)], chosen[(x, z)]
                for d in range(D.n_objects):
                    for f in range(C.hom[(x, y)].size(d)):
                        for g in range(C.hom[(y, z)].size(d)):
                            if mxz[d][C.mul(d, x, y, z, f, g)] != E.mul(d, F[x], F[y], F[z], mxy[d][f], myz[d][g]):
                                return False
            return True

        def rec(k):
            if k == len(pairs):
                yield EnrichedFunctor(C, E, F, dict(chosen))
                return
            x, y = pairs[k]
            allowed = None
            if x == y:
                allowed = {(d, C.unit[x][d]): [E.unit[F[x]][d]] for d in range(D.n_objects)}
            for comps in iter_maps(C.hom[(x, y)], E.hom[(F[x], F[y])], allowed=allowed):
                chosen[(x, y)] = comps
                if consistent((x, y)):
                    yield from rec(k + 1)
                del chosen[(x, y)]

        yield from rec(0)


def nerve_map(Fn: EnrichedFunctor, K: int) -> PshMap:
    """The induced map of D-nerves."""
    C, E = Fn.source, Fn.target
    NC, NE = d_nerve(C, K), d_nerve(E, K)
    B = NC.base
    comps = []
    for x in range(B.n_objects):
        d = C.index.index(B.objects[x][0])
        row = []
        for objs, labs in NC.elems[x]:
            xs = [C.obj(o) for o in objs]
            ys = tuple(E.objects[Fn.obj_map[i]] for i in xs)
            new = []
            for i, lab in enumerate(labs):
                a, b = xs[i], xs[i + 1]
                e = C.hom[(a, b)].index_of(d, lab)
                t = Fn.hom_maps[(a, b)][d][e]
                new.append(E.hom[(Fn.obj_map[a], Fn.obj_map[b])].elems[d][t])
            row.append(NE.index_of(x, (ys, tuple(new))))
        comps.append(row)
    return PshMap(NC, NE, comps)


# -- presheaf-valued functors and enriched natural transformations --------


class PshFunctor:
    """An enriched functor ``C -> P(D)``: presheaves ``G(c)`` with action maps
    ``act[(c, c')][d]`` flat over ``G(c)(d) × H(c,c')(d)`` (same layout as
    :func:`strictcat.presheaf.product`)."""

    def __init__(self, C: EnrichedCat, values: Sequence[Presheaf], act: Mapping[tuple[int, int], Sequence[Sequence[int]]], *, name: str | None = None):
        self.C = C
        self.values = tuple(values)
        self.act = {k: tuple(tuple(t) for t in v) for k, v in act.items()}
        self.name = name

    def apply(self, d: int, c: int, c2: int, a: int, f: int) -> int:
        """``G(f)(a)`` for ``a in G(c)(d)``, ``f in H(c,c2)(d)``."""
        return self.act[(c, c2)][d][a * self.C.hom[(c, c2)].size(d) + f]

    def action_map(self, c: int, c2: int) -> PshMap:
        P = product(self.values[c], self.C.hom[(c, c2)]).obj
        return PshMap(P, self.values[c2], self.act[(c, c2)])

    def validate(self) -> PshFunctor:
        C = self.C
        D, n = C.index, C.n_objects
        for c in range(n):
            self.values[c].validate()
        for c, c2 in itertools.product(range(n), repeat=2):
            self.action_map(c, c2).validate()
        for d in range(D.n_objects):
            for c in range(n):
                for a in range(self.values[c].size(d)):
                    if self.apply(d, c, c, a, C.unit[c][d]) != a:
                        raise AuditError("action of unit", (D.objects[d], C.objects[c], a))
            for c, c2, c3 in itertools.product(range(n), repeat=3):
                for a in range(self.values[c].size(d)):
                    for f in range(C.hom[(c, c2)].size(d)):
                        fa = self.apply(d, c, c2, a, f)
                        for g in range(C.hom[(c2, c3)].size(d)):
                            if self.apply(d, c2, c3, fa, g) != self.apply(d, c, c3, a, C.mul(d, c, c2, c3, f, g)):
                                raise AuditError("action respects composition", (D.objects[d], (c, c2, c3), (a, f, g)))
        return self


def representable_functor(C: EnrichedCat, c: Hashable) -> PshFunctor:
    """``uHom(c, -)`` with action by postcomposition."""
    ci = C.obj(c)
    n = C.n_objects
    values = [C.hom[(ci, x)] for x in range(n)]
    act = {(x, y): C.comp[(ci, x, y)] for x in range(n) for y in range(n)}
    return PshFunctor(C, values, act, name=f"uHom({c!r},-)")


def constant_functor(C: EnrichedCat, A: Presheaf) -> PshFunctor:
    """The constant functor ``{A}``; every morphism acts as the identity."""
    n, D = C.n_objects, C.index
    act = {}
    for x, y in itertools.product(range(n), repeat=2):
        H = C.hom[(x, y)]
        act[(x, y)] = [[a for a in range(A.size(d)) for _ in range(H.size(d))] for d in range(D.n_objects)]
    return PshFunctor(C, [A] * n, act, name="const")


def _families(F: PshFunctor, G: PshFunctor, W: Presheaf) -> list[tuple]:
    """Families ``alpha_c: F(c) × W -> G(c)`` natural in ``c``."""
    C = F.C
    if G.C is not C:
        raise BaseMismatchError("functors must share their source")
    D, n = C.index, C.n_objects
    prods = [product(F.values[c], W).obj for c in range(n)]
    options = [sorted(iter_maps(prods[c], G.values[c])) for c in range(n)]
    out = []
    chosen: list = [None] * n

    def ok(c, c2):
        a1, a2 = chosen[c], chosen[c2]
        H = C.hom[(c, c2)]
        for d in range(D.n_objects):
            nw = W.size(d)
            for a in range(F.values[c].size(d)):
                for f in range(H.size(d)):
                    fa = F.apply(d, c, c2, a, f)
                    for w in range(nw):
                        if a2[d][fa * nw + w] != G.apply(d, c, c2, a1[d][a * nw + w], f):
                            return False
        return True

    def rec(c):
        if c == n:
            out.append(tuple(chosen))
            return
        for opt in options[c]:
            chosen[c] = opt
            if all(ok(a, b) for a in range(c + 1) for b in range(c + 1) if a == c or b == c):
                rec(c + 1)
        chosen[c] = None

    rec(0)
    return out


def enriched_nat(F: PshFunctor, G: PshFunctor) -> Presheaf:
    """``uNat(F,G)`` with value at ``d`` the natural families ``F × {y(d)} -> G``."""
    C = F.C
    D = C.index
    vals = []
    for d in range(D.n_objects):
        vals.append(_families(F, G, representable(D, D.objects[d])))
    lookup = [{fam: i for i, fam in enumerate(v)} for v in vals]
    action = []
    for h in range(D.n_morphisms):
        d2, d = D.src[h], D.tgt[h]
        Yd = representable(D, D.objects[d])
        row = []
        for fam in vals[d]:
            new = []
            for c, comp in enumerate(fam):
                Fc = F.values[c]
                per = []
                for e in range(D.n_objects):
                    nw = Yd.size(e)
                    pos = {u: i for i, u in enumerate(D.hom(e, d))}
                    r = []
                    for a in range(Fc.size(e)):
                        for u in D.hom(e, d2):
                            r.append(comp[e][a * nw + pos[D.compose(h, u)]])
                    per.append(tuple(r))
                new.append(tuple(per))
            row.append(lookup[d2][tuple(new)])
        action.append(row)
    return Presheaf(D, vals, action, name="uNat")


def nat_set(F: PshFunctor, G: PshFunctor) -> list[tuple]:
    """The plain set ``Nat(F, G)`` of natural families ``F(c) -> G(c)``."""
    return _families(F, G, terminal(F.C.index))


def yoneda_map(C: EnrichedCat, c: Hashable, G: PshFunctor) -> PshMap:
    """``uNat(uHom(c,-), G) -> G(c)``, evaluating a family at ``(id_c, id_d)``."""
    ci = C.obj(c)
    D = C.index
    U = enriched_nat(representable_functor(C, c), G)
    comps = []
    for d in range(D.n_objects):
        nw = len(D.hom(d, d))
        iid = list(D.hom(d, d)).index(D.identity[d])
        row = []
        for fam in U.elems[d]:
            row.append(fam[ci][d][C.unit[ci][d] * nw + iid])
        comps.append(row)
    return PshMap(U, G.values[ci], comps)
