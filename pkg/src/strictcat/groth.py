"""Grothendieck constructions, discrete opfibrations and their classifiers.

The classical side works with covariant set functors ``F: C -> Set`` and
functors ``p: E -> C``.  The enriched side works level by level over the
index category ``D``: at ``d`` an enriched category restricts to the
ordinary category ``Und_d C`` and a presheaf-valued functor to the set
functor ``c |-> G(c)(d)``.
"""
from __future__ import annotations

import functools
import itertools
from collections.abc import Hashable, Sequence
from dataclasses import dataclass, field

from .enriched import EnrichedCat, PshFunctor, _enriched_chains, _chain_reindex, d_nerve, und_levelwise
from .errors import AuditError, BaseMismatchError, StrictCatError
from .fincat import CatFunctor, FinCat, iter_functors, opposite_cat, slice_coslice
from .kanext import d_simplicial, union_classes
from .presheaf import Presheaf, PshMap, pi0, pullback, terminal

__all__ = [
    "SetFunctor",
    "OpfibCandidate",
    "ClassifyResult",
    "int_classical",
    "classify_opfib",
    "exists_grothendieck_preimage",
    "iter_set_functors",
    "t_functor",
    "t_unit",
    "h_functor",
    "h_counit",
    "over_functors",
    "t_of_int_iso",
    "h_of_int_iso",
    "pullback_cat",
    "universal_pullback",
    "level_set_functor",
    "int_enriched",
    "sint",
    "coslice_nerve",
    "slice_nerve",
    "sbt_at",
    "vertex_point",
    "fiber",
]


def _build(objects, mors, identity, compose, name=None) -> FinCat:
    """A FinCat from unordered morphisms ``(label, s, t)`` and ``compose(g, f)`` on positions."""
    order = sorted(range(len(mors)), key=lambda k: (mors[k][1], mors[k][2], k))
    new = {k: i for i, k in enumerate(order)}
    out = [mors[k] for k in order]
    comp = {}
    for f in range(len(mors)):
        for g in range(len(mors)):
            if mors[f][2] == mors[g][1]:
                comp[(new[g], new[f])] = new[compose(g, f)]
    return FinCat(objects, out, [new[i] for i in identity], comp, name=name), new


# -- set functors ---------------------------------------------------------


class SetFunctor:
    """A covariant functor ``C -> FinSet``; ``action[f]`` maps indices of ``F(src f)`` to ``F(tgt f)``."""

    def __init__(self, source: FinCat, elems: Sequence[Sequence[Hashable]], action: Sequence[Sequence[int]], *, name: str | None = None):
        self.source = source
        self.elems = tuple(tuple(e) for e in elems)
        self.action = tuple(tuple(a) for a in action)
        self.name = name

    def size(self, c: int) -> int:
        return len(self.elems[c])

    @property
    def sizes(self) -> tuple[int, ...]:
        return tuple(len(e) for e in self.elems)

    def to_presheaf(self) -> Presheaf:
        """The same data as a presheaf on ``C^op`` (morphism ids are shared)."""
        return Presheaf(_op(self.source), self.elems, self.action, name=self.name)

    @classmethod
    def from_presheaf(cls, C: FinCat, X: Presheaf) -> SetFunctor:
        return cls(C, X.elems, X.action, name=X.name)

    def validate(self) -> SetFunctor:
        try:
            self.to_presheaf().validate()
        except AuditError as exc:
            raise AuditError("set functor: " + exc.axiom, exc.witness) from None
        return self

    def __eq__(self, other):
        if not isinstance(other, SetFunctor):
            return NotImplemented
        return (self.elems, self.action) == (other.elems, other.action) and self.source == other.source

    def __hash__(self):
        return hash((self.elems, self.action))

    def __repr__(self):
        return f"<SetFunctor on {self.source.name or 'C'}: sizes {self.sizes}>"


@functools.lru_cache(maxsize=64)
def _op(C: FinCat) -> FinCat:
    return opposite_cat(C)


def nat_count(F: SetFunctor, G: SetFunctor) -> int:
    from .presheaf import count_maps

    return count_maps(F.to_presheaf(), G.to_presheaf())


def iter_set_functors(C: FinCat, sizes: Sequence[int], *, rng=None):
    """All set functors on ``C`` with ``|F(c)| = sizes[c]`` and elements ``0..n-1``.

    With ``rng`` the candidate tables are tried in random order, so the first
    functor yielded is a random one (not uniformly distributed).
    """
    nonid = [m for m in range(C.n_morphisms) if not C.is_identity(m)]
    pos = {m: k for k, m in enumerate(nonid)}
    checks = [[] for _ in nonid]
    for g, f in C.composable_pairs():
        h = C.compose(g, f)
        inv = [pos[m] for m in (g, f, h) if m in pos]
        if inv:
            checks[max(inv)].append((g, f, h))
    action: list = [None] * C.n_morphisms
    for x in range(C.n_objects):
        action[C.identity[x]] = tuple(range(sizes[x]))

    def rec(k):
        if k == len(nonid):
            yield SetFunctor(C, [range(n) for n in sizes], action)
            return
        m = nonid[k]
        tables = itertools.product(range(sizes[C.tgt[m]]), repeat=sizes[C.src[m]])
        if rng is not None:
            tables = list(tables)
            rng.shuffle(tables)
        for table in tables:
            action[m] = table
            if all(action[h] == tuple(action[g][i] for i in action[f]) for g, f, h in checks[k]):
                yield from rec(k + 1)
        action[m] = None

    yield from rec(0)


# -- functors over a base -------------------------------------------------


@dataclass
class OpfibCandidate:
    total: FinCat
    base: FinCat
    projection: CatFunctor

    def validate(self) -> OpfibCandidate:
        self.total.validate()
        self.base.validate()
        self.projection.validate()
        return self


def int_classical(C: FinCat, F: SetFunctor) -> OpfibCandidate:
    """``∫_C F``: objects ``(c, x)``, a morphism ``(c, x) -> (d, F(f)x)`` for each ``f``."""
    if not (F.source is C or F.source == C):
        raise BaseMismatchError("set functor is not over C")
    objs, where = [], {}
    for c in range(C.n_objects):
        for x in range(F.size(c)):
            where[(c, x)] = len(objs)
            objs.append((C.objects[c], F.elems[c][x]))
    mors, key = [], {}
    for f in range(C.n_morphisms):
        c, d = C.src[f], C.tgt[f]
        for x in range(F.size(c)):
            key[(f, x)] = len(mors)
            mors.append((C.labels[f], where[(c, x)], where[(d, F.action[f][x])]))
    src_of = [None] * len(mors)
    for (f, x), k in key.items():
        src_of[k] = (f, x)

    def compose(g, f):
        (gf_, _), (ff, x) = src_of[g], src_of[f]
        return key[(C.compose(gf_, ff), x)]

    ident = [key[(C.identity[c], x)] for c in range(C.n_objects) for x in range(F.size(c))]
    E, new = _build(objs, mors, ident, compose, name=f"∫{F.name or 'F'}")
    inv = {v: k for k, v in new.items()}
    proj = CatFunctor(E, C, [C.index(o[0]) for o in objs], [src_of[inv[m]][0] for m in range(E.n_morphisms)])
    return OpfibCandidate(E, C, proj)


@dataclass
class ClassifyResult:
    ok: bool
    functor: SetFunctor | None = None
    iso: CatFunctor | None = None  # ∫F -> total, over the base
    witness: dict | None = None


def classify_opfib(p: OpfibCandidate) -> ClassifyResult:
    """Recognise a discrete opfibration by unique lifts and return its classifying functor."""
    E, C, P = p.total, p.base, p.projection
    # non-identity morphisms are checked before identities
    order = sorted(range(C.n_morphisms), key=lambda f: (C.is_identity(f), f))
    for f in order:
        for e in range(E.n_objects):
            if P.obj_map[e] != C.src[f]:
                continue
            lifts = [m for m in E.out_of(e) if P.mor_map[m] == f]
            if len(lifts) != 1:
                return ClassifyResult(False, witness={
                    "morphism": C.labels[f], "source": C.objects[C.src[f]], "object": E.objects[e],
                    "lifts": len(lifts),
                })
    fibres = [[e for e in range(E.n_objects) if P.obj_map[e] == c] for c in range(C.n_objects)]
    pos = [{e: i for i, e in enumerate(fb)} for fb in fibres]
    lift = {}
    for e in range(E.n_objects):
        for m in E.out_of(e):
            lift[(P.mor_map[m], e)] = m
    action = [
        [pos[C.tgt[f]][E.tgt[lift[(f, e)]]] for e in fibres[C.src[f]]] for f in range(C.n_morphisms)
    ]
    F = SetFunctor(C, [[E.objects[e] for e in fb] for fb in fibres], action, name="fib")
    I = int_classical(C, F)
    obj_map = [fibres[I.projection.obj_map[o]][k] for o, k in enumerate(_int_positions(I, F))]
    mor_map = []
    for m in range(I.total.n_morphisms):
        s = obj_map[I.total.src[m]]
        mor_map.append(lift[(I.projection.mor_map[m], s)])
    iso = CatFunctor(I.total, E, obj_map, mor_map)
    return ClassifyResult(True, F, iso)


def _int_positions(I: OpfibCandidate, F: SetFunctor):
    C = I.base
    return [F.elems[C.index(o[0])].index(o[1]) for o in I.total.objects]


def exists_grothendieck_preimage(p: OpfibCandidate) -> bool:
    """Independent test: search all set functors with matching fibre sizes for ``∫F ≅ p`` over the base."""
    E, C, P = p.total, p.base, p.projection
    sizes = [sum(1 for e in range(E.n_objects) if P.obj_map[e] == c) for c in range(C.n_objects)]
    for F in iter_set_functors(C, sizes):
        I = int_classical(C, F)
        if I.total.n_morphisms != E.n_morphisms:
            continue
        if next(iter_functors(I.total, E, over=(I.projection, P), bijective=True), None) is not None:
            return True
    return False


def over_functors(p: OpfibCandidate, q: OpfibCandidate) -> list[CatFunctor]:
    """``Hom_{/C}(p, q)``: functors between totals commuting with the projections."""
    if not (p.base is q.base or p.base == q.base):
        raise BaseMismatchError("candidates live over different bases")
    return list(iter_functors(p.total, q.total, over=(p.projection, q.projection)))


# -- T and H --------------------------------------------------------------


def t_functor(p: OpfibCandidate) -> SetFunctor:
    """``T(p)(c) = π₀(C/c ×_C E)``; a component is labelled by its least ``(e, u: p(e) -> c)``."""
    E, C, P = p.total, p.base, p.projection
    elems, reps_all, cls_all, flat_all = [], [], [], []
    for c in range(C.n_objects):
        gens = [(e, u) for e in range(E.n_objects) for u in C.hom(P.obj_map[e], c)]
        flat = {g: i for i, g in enumerate(gens)}
        rel = []
        for m in range(E.n_morphisms):
            e, e2 = E.src[m], E.tgt[m]
            for u2 in C.hom(P.obj_map[e2], c):
                rel.append((flat[(e, C.compose(u2, P.mor_map[m]))], flat[(e2, u2)]))
        roots, cls = union_classes(len(gens), rel)
        reps = [gens[r] for r in roots]
        reps_all.append(reps)
        cls_all.append(cls)
        flat_all.append(flat)
        elems.append([(E.objects[e], C.labels[u]) for e, u in reps])
    action = []
    for g in range(C.n_morphisms):
        c, c2 = C.src[g], C.tgt[g]
        action.append([cls_all[c2][flat_all[c2][(e, C.compose(g, u))]] for e, u in reps_all[c]])
    T = SetFunctor(C, elems, action, name="T")
    T._tables = (flat_all, cls_all)
    return T


def t_unit(p: OpfibCandidate) -> CatFunctor:
    """The unit ``E -> ∫T(p)`` over ``C``: ``e |-> (p e, [e, id])``."""
    T = t_functor(p)
    I = int_classical(p.base, T)
    E, C, P = p.total, p.base, p.projection
    flat_all, cls_all = T._tables
    obj_map = []
    for e in range(E.n_objects):
        c = P.obj_map[e]
        k = cls_all[c][flat_all[c][(e, C.identity[c])]]
        obj_map.append(I.total.index((C.objects[c], T.elems[c][k])))
    mor_map = [
        I.total.find(obj_map[E.src[m]], obj_map[E.tgt[m]], C.labels[P.mor_map[m]]) for m in range(E.n_morphisms)
    ]
    return CatFunctor(E, I.total, obj_map, mor_map)


def h_functor(p: OpfibCandidate) -> SetFunctor:
    """``H(p)(c) = Hom_{/C}(C_{c/}, E)``; elements are labelled by the functor tables."""
    C = p.base
    cos = [slice_coslice(C, C.objects[c], "under") for c in range(C.n_objects)]
    vals = []
    for c in range(C.n_objects):
        S, proj = cos[c]
        q = OpfibCandidate(S, C, proj)
        vals.append([(F.obj_map, F.mor_map) for F in over_functors(q, p)])
    action = []
    for g in range(C.n_morphisms):
        c, c2 = C.src[g], C.tgt[g]
        S, _ = cos[c]
        S2, _ = cos[c2]
        # precomposition with C_{c2/} -> C_{c/}, u |-> u∘g
        o_map = [S.index((o[0], C.labels[C.compose(C.find(c2, C.index(o[0]), o[1]), g)])) for o in S2.objects]
        lookup = {v: i for i, v in enumerate(vals[c2])}
        row = []
        for om, mm in vals[c]:
            new_o = tuple(om[o_map[i]] for i in range(S2.n_objects))
            new_m = tuple(mm[S.find(o_map[S2.src[m]], o_map[S2.tgt[m]], S2.labels[m])] for m in range(S2.n_morphisms))
            row.append(lookup[(new_o, new_m)])
        action.append(row)
    return SetFunctor(C, vals, action, name="H")


def h_counit(p: OpfibCandidate) -> SetFunctor:  # pragma: no cover - alias for clarity
    return h_functor(p)


def t_of_int_iso(C: FinCat, F: SetFunctor) -> PshMap:
    """The explicit map ``T(∫F) -> F``, ``[(c', x), u] |-> F(u)(x)``, as a presheaf map on ``C^op``."""
    I = int_classical(C, F)
    T = t_functor(I)
    comps = []
    for c in range(C.n_objects):
        row = []
        for (o, ulab) in T.elems[c]:
            c2, x = C.index(o[0]), F.elems[C.index(o[0])].index(o[1])
            u = C.find(c2, c, ulab)
            row.append(F.action[u][x])
        comps.append(row)
    return PshMap(T.to_presheaf(), F.to_presheaf(), comps)


def h_of_int_iso(C: FinCat, F: SetFunctor) -> PshMap:
    """The explicit map ``H(∫F) -> F`` evaluating an over-functor at ``id_c``."""
    I = int_classical(C, F)
    H = h_functor(I)
    comps = []
    for c in range(C.n_objects):
        S, _ = slice_coslice(C, C.objects[c], "under")
        start = S.index((C.objects[c], C.labels[C.identity[c]]))
        row = []
        for om, _mm in H.elems[c]:
            o = I.total.objects[om[start]]
            row.append(F.elems[c].index(o[1]))
        comps.append(row)
    return PshMap(H.to_presheaf(), F.to_presheaf(), comps)


# -- universal opfibration, relative to a finite full subcategory of sets --


def pullback_cat(F: CatFunctor, G: CatFunctor) -> tuple[FinCat, CatFunctor, CatFunctor]:
    """The strict pullback ``A ×_C B`` of ``F: A -> C`` and ``G: B -> C``."""
    A, B = F.source, G.source
    objs = [(A.objects[a], B.objects[b]) for a in range(A.n_objects) for b in range(B.n_objects) if F.obj_map[a] == G.obj_map[b]]
    oidx = {(A.index(x), B.index(y)): i for i, (x, y) in enumerate(objs)}
    mors = [
        ((A.labels[f], B.labels[g]), oidx[(A.src[f], B.src[g])], oidx[(A.tgt[f], B.tgt[g])], f, g)
        for f in range(A.n_morphisms)
        for g in range(B.n_morphisms)
        if F.mor_map[f] == G.mor_map[g] and (A.src[f], B.src[g]) in oidx
    ]
    mkey = {(m[3], m[4]): i for i, m in enumerate(mors)}
    ident = [mkey[(A.identity[a], B.identity[b])] for a, b in oidx]

    def compose(g, f):
        return mkey[(A.compose(mors[g][3], mors[f][3]), B.compose(mors[g][4], mors[f][4]))]

    P, new = _build(objs, [m[:3] for m in mors], ident, compose)
    inv = {v: k for k, v in new.items()}
    pa = CatFunctor(P, A, [A.index(o[0]) for o in objs], [mors[inv[m]][3] for m in range(P.n_morphisms)])
    pb = CatFunctor(P, B, [B.index(o[1]) for o in objs], [mors[inv[m]][4] for m in range(P.n_morphisms)])
    return P, pa, pb


def universal_pullback(C: FinCat, F: SetFunctor) -> tuple[OpfibCandidate, CatFunctor | None]:
    """Pull the pointed-set opfibration back along ``F``, relative to the full
    subcategory of sets on the fibres of ``F``; returns the pullback and an
    isomorphism from ``∫F`` over ``C`` (or ``None``)."""
    sets = sorted({F.elems[c] for c in range(C.n_objects)}, key=lambda s: (len(s), repr(s)))
    smors = [
        (tab, i, j) for i, A in enumerate(sets) for j, B in enumerate(sets)
        for tab in itertools.product(range(len(B)), repeat=len(A))
    ]
    S = FinCat(
        sets, smors,
        [next(k for k, m in enumerate(smors) if m[1] == i and m[2] == i and m[0] == tuple(range(len(sets[i])))) for i in range(len(sets))],
        {(g, f): _fn_index(smors, f, g) for f in range(len(smors)) for g in range(len(smors)) if smors[f][2] == smors[g][1]},
    )
    pobjs = [(i, a) for i, A in enumerate(sets) for a in range(len(A))]
    pmors = [((k, a), pobjs.index((m[1], a)), pobjs.index((m[2], m[0][a]))) for k, m in enumerate(smors) for a in range(len(sets[m[1]]))]
    pkey = {lab: i for i, (lab, _, _) in enumerate(pmors)}
    Sp, new = _build(
        pobjs, pmors,
        [pkey[(S.identity[i], a)] for i, a in pobjs],
        lambda g, f: pkey[(S.compose(pmors[g][0][0], pmors[f][0][0]), pmors[f][0][1])],
    )
    inv = {v: k for k, v in new.items()}
    U = CatFunctor(Sp, S, [o[0] for o in pobjs], [pmors[inv[m]][0][0] for m in range(Sp.n_morphisms)])
    Fc = CatFunctor(
        C, S, [sets.index(F.elems[c]) for c in range(C.n_objects)],
        [next(k for k, m in enumerate(smors) if m[1] == sets.index(F.elems[C.src[f]]) and m[2] == sets.index(F.elems[C.tgt[f]]) and m[0] == F.action[f]) for f in range(C.n_morphisms)],
    )
    P, pc, _ = pullback_cat(Fc, U)
    cand = OpfibCandidate(P, C, pc)
    I = int_classical(C, F)
    iso = next(iter_functors(I.total, P, over=(I.projection, pc), bijective=True), None)
    return cand, iso


def _fn_index(smors, f, g):
    tab = tuple(smors[g][0][i] for i in smors[f][0])
    s, t = smors[f][1], smors[g][2]
    for k, m in enumerate(smors):
        if m[1] == s and m[2] == t and m[0] == tab:
            return k
    raise AssertionError("function category not closed")


# -- enriched Grothendieck construction -----------------------------------


def level_set_functor(C: EnrichedCat, G: PshFunctor, d: int, und_cat: FinCat) -> SetFunctor:
    """``c |-> G(c)(d)`` as a set functor on ``Und_d C``."""
    n = C.n_objects
    action = []
    for m in range(und_cat.n_morphisms):
        c, c2 = und_cat.src[m], und_cat.tgt[m]
        e = C.hom[(c, c2)].index_of(d, und_cat.labels[m])
        action.append([G.apply(d, c, c2, a, e) for a in range(G.values[c].size(d))])
    return SetFunctor(und_cat, [G.values[c].elems[d] for c in range(n)], action, name=G.name)


def int_enriched(C: EnrichedCat, G: PshFunctor) -> tuple[list[OpfibCandidate], dict[int, CatFunctor]]:
    """Level-wise ``∫``: for each ``d`` the classical construction on ``Und_d C``,
    and for ``f: d' -> d`` the transport functor between totals."""
    cats, functors = und_levelwise(C)
    D = C.index
    levels = [int_classical(cats[d], level_set_functor(C, G, d, cats[d])) for d in range(D.n_objects)]
    transports = {}
    for h in range(D.n_morphisms):
        d2, d = D.src[h], D.tgt[h]
        T, T2 = levels[d].total, levels[d2].total
        U = functors[h]
        obj_map = []
        for (cl, alab) in T.objects:
            c = C.obj(cl)
            a = G.values[c].index_of(d, alab)
            obj_map.append(T2.index((cl, G.values[c].elems[d2][G.values[c].action[h][a]])))
        mor_map = []
        for m in range(T.n_morphisms):
            base_m = levels[d].projection.mor_map[m]
            mor_map.append(T2.find(obj_map[T.src[m]], obj_map[T.tgt[m]], cats[d2].labels[U.mor_map[base_m]]))
        transports[h] = CatFunctor(T, T2, obj_map, mor_map)
    return levels, transports


def sint(C: EnrichedCat, G: PshFunctor, K: int) -> PshMap:
    """The presheaf ``∐_{c0 -> ... -> ck} G(c0)`` over ``D × Δ≤K`` with its projection to the D-nerve.

    Simplicial operators act on the chain by reindexing and move the element
    of ``G(c0)`` along the composite of the first ``α(0)`` arrows.
    """
    D = C.index
    N = d_nerve(C, K)
    B = N.base
    Dl = B.factors[1]
    entries = {}
    for x in range(B.n_objects):
        dl, k = B.objects[x]
        d = D.index(dl)
        entries[x] = [
            (xs, fs, a)
            for xs, fs in _enriched_chains(C, d, k)
            for a in range(G.values[xs[0]].size(d))
        ]
    pos = {x: {e: i for i, e in enumerate(v)} for x, v in entries.items()}
    elems, proj = [], []
    for x in range(B.n_objects):
        d = D.index(B.objects[x][0])
        row, prow = [], []
        for xs, fs, a in entries[x]:
            labs = tuple(C.hom[(xs[i], xs[i + 1])].elems[d][e] for i, e in enumerate(fs))
            chain = (tuple(C.objects[o] for o in xs), labs)
            row.append((chain, G.values[xs[0]].elems[d][a]))
            prow.append(N.index_of(x, chain))
        elems.append(row)
        proj.append(prow)
    action = []
    for m in range(B.n_morphisms):
        h, al = B.labels[m]
        s, t = B.src[m], B.tgt[m]
        d2 = D.src[h]
        alpha = Dl.labels[al]
        row = []
        for xs, fs, a in entries[t]:
            moved = tuple(C.hom[(xs[i], xs[i + 1])].action[h][e] for i, e in enumerate(fs))
            a2 = G.values[xs[0]].action[h][a]
            ys, gs = _chain_reindex(C, d2, xs, moved, alpha)
            # transport a along the composite xs[0] -> xs[alpha[0]]
            lead = _chain_reindex(C, d2, xs, moved, (0, alpha[0]))[1][0]
            a3 = G.apply(d2, xs[0], xs[alpha[0]], a2, lead)
            row.append(pos[s][(ys, gs, a3)])
        action.append(row)
    S = Presheaf(B, elems, action, name="sint")
    return PshMap(S, N, proj)


def _chain_nerve(C: EnrichedCat, c: int, K: int, side: str) -> PshMap:
    """Chains of length ``k+1`` starting (``under``) or ending (``over``) at ``c``,
    projected to the D-nerve by dropping that end."""
    D = C.index
    N = d_nerve(C, K)
    B = N.base
    Dl = B.factors[1]
    entries = {}
    for x in range(B.n_objects):
        dl, k = B.objects[x]
        d = D.index(dl)
        chains = _enriched_chains(C, d, k + 1)
        if side == "under":
            entries[x] = [ch for ch in chains if ch[0][0] == c]
        else:
            entries[x] = [ch for ch in chains if ch[0][-1] == c]
    pos = {x: {e: i for i, e in enumerate(v)} for x, v in entries.items()}
    elems, proj = [], []
    for x in range(B.n_objects):
        d = D.index(B.objects[x][0])
        row, prow = [], []
        for xs, fs in entries[x]:
            labs = tuple(C.hom[(xs[i], xs[i + 1])].elems[d][e] for i, e in enumerate(fs))
            row.append((tuple(C.objects[o] for o in xs), labs))
            if side == "under":
                prow.append(N.index_of(x, (row[-1][0][1:], labs[1:])))
            else:
                prow.append(N.index_of(x, (row[-1][0][:-1], labs[:-1])))
        elems.append(row)
        proj.append(prow)
    action = []
    for m in range(B.n_morphisms):
        h, al = B.labels[m]
        s, t = B.src[m], B.tgt[m]
        d2 = D.src[h]
        alpha = Dl.labels[al]
        k = Dl.tgt[al]
        if side == "under":
            beta = (0,) + tuple(a + 1 for a in alpha)
        else:
            beta = tuple(alpha) + (k + 1,)
        row = []
        for xs, fs in entries[t]:
            moved = tuple(C.hom[(xs[i], xs[i + 1])].action[h][e] for i, e in enumerate(fs))
            row.append(pos[s][_chain_reindex(C, d2, xs, moved, beta)])
        action.append(row)
    S = Presheaf(B, elems, action, name=f"N_{side}({C.objects[c]!r})")
    return PshMap(S, N, proj)


def coslice_nerve(C: EnrichedCat, c: Hashable, K: int) -> PshMap:
    """``N_D C_{c/} -> N_D C``."""
    return _chain_nerve(C, C.obj(c), K, "under")


def slice_nerve(C: EnrichedCat, c: Hashable, K: int) -> PshMap:
    """``N_D C_{/c} -> N_D C``."""
    return _chain_nerve(C, C.obj(c), K, "over")


@dataclass
class SbtResult:
    raw: Presheaf
    pi0: Presheaf
    legs: tuple = field(default_factory=tuple)


def sbt_at(p: PshMap, C: EnrichedCat, c: Hashable) -> SbtResult:
    """Pull ``p: Y -> N_D C`` back along ``N_D C_{/c}``.

    The input is discrete in the space direction, so restriction along the
    diagonal returns the pullback itself, read as a D-space over ``D × Δ≤K``.
    The ``pi0`` field collapses the simplicial direction, giving a presheaf on ``D``.
    """
    N = p.target
    K = N.base.factors[1].delta_level
    sl = slice_nerve(C, c, K)
    if not (sl.target == N):
        raise BaseMismatchError("map does not land in the D-nerve of C")
    P = pullback(p, sl)
    raw = P.obj
    return SbtResult(raw, _pi0_over_d(raw), P.legs)


def _pi0_over_d(X: Presheaf) -> Presheaf:
    from .kanext import und

    B = X.base
    D, Dl = B.factors
    K = Dl.delta_level
    comps = []
    elems = []
    for d in D.objects:
        S = und(X, d, D, K)
        n, cls = pi0(S)
        rep = [None] * n
        for e, k in enumerate(cls):
            if rep[k] is None:
                rep[k] = e
        elems.append([S.elems[0][e] for e in rep])
        comps.append(cls)
    action = []
    for h in range(D.n_morphisms):
        d2, d = D.src[h], D.tgt[h]
        m = B.find(B.index((D.objects[d2], 0)), B.index((D.objects[d], 0)), (h, Dl.identity[0]))
        first = {}
        for e, k in enumerate(comps[d]):
            first.setdefault(k, e)
        action.append([comps[d2][X.action[m][first[k]]] for k in range(len(elems[d]))])
    return Presheaf(D, elems, action, name="pi0")


def vertex_point(X: Presheaf, label: Hashable, P: Presheaf | None = None) -> PshMap:
    """The map from the terminal presheaf (or ``P``) picking the degenerate simplices on a vertex.

    ``label`` must name an element of the 0-level at every index object and be
    fixed by the index action.  Works over ``Δ≤K`` and ``D × Δ≤K``.
    """
    B = X.base
    P = P if P is not None else terminal(B)
    comps = []
    if B.delta_level is not None:
        if label not in X.elems[0]:
            raise StrictCatError(f"{label!r} is not a vertex")
        v = X.index_of(0, label)
        for k in range(B.n_objects):
            e = X.action[B.find(k, 0, (0,) * (k + 1))][v]
            comps.append([e] * P.size(k))
    elif B.factors and B.factors[-1].delta_level is not None:
        D = B.factors[0]
        rest = B.factors[1:]
        for x in range(B.n_objects):
            ob = B.objects[x]
            base0 = B.index((ob[0],) + (0,) * len(rest))
            if label not in X.elems[base0]:
                raise StrictCatError(f"{label!r} is not a vertex at {ob[0]!r}")
            v = X.index_of(base0, label)
            lab = (D.identity[D.index(ob[0])],) + tuple(
                F.find(k, 0, (0,) * (k + 1)) for F, k in zip(rest, ob[1:])
            )
            e = X.action[B.find(x, base0, lab)][v]
            comps.append([e] * P.size(x))
    else:
        raise StrictCatError("vertex_point needs a simplicial index category")
    return PshMap(P, X, comps).validate()


def fiber(p: PshMap, point: PshMap) -> Presheaf:
    """The pullback of ``p: L -> X`` along a point ``P -> X`` (typically from :func:`vertex_point`)."""
    if not (point.target == p.target):
        raise BaseMismatchError("point does not land in the codomain")
    return pullback(point, p).obj
