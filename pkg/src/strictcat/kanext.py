"""Restriction and Kan extensions of presheaves along functors, plus the
named functors between D-indexed simplicial categories and realization.

Kan extensions are computed from their coend/end formulas over explicit
comma data, so they are correct for arbitrary functors:

* ``lan(F, X)(d)`` is the set of triples ``(c, u: d -> Fc, x in X(c))``
  modulo ``(c', F(g)u, x') ~ (c, u, X(g)x')``;
* ``ran(F, X)(d)`` is the set of compatible families indexed by
  ``(c, v: Fc -> d)``.

Ambient categories follow one convention: a D-simplicial set lives over
``D × Δ≤N`` with objects ``(d, k)``, and a D-simplicial space over
``D × Δ≤N × Δ≤N`` with objects ``(d, k, l)`` where ``l`` is the space
direction.
"""
from __future__ import annotations

import functools
from collections.abc import Callable, Hashable
from dataclasses import dataclass

from .errors import BaseMismatchError, StrictCatError
from .fincat import CatFunctor, FinCat, delta_truncated, product_cat
from .presheaf import Presheaf, PshMap, _set_limit, chain_restrict, iter_chains, pi0

__all__ = [
    "restrict",
    "restrict_map",
    "lan",
    "lan_map",
    "lan_unit",
    "lan_counit",
    "ran",
    "ran_map",
    "ran_unit",
    "ran_counit",
    "union_classes",
    "d_simplicial",
    "d_bisimplicial",
    "product_functor",
    "NamedFunctorSpec",
    "named_functor",
    "apply_named",
    "und",
    "disc",
    "val",
    "vemb",
    "vemb_space",
    "fdiag",
    "diag_ran",
    "op",
    "reversal",
    "realize",
    "realize_by_chains",
]


def _check_over(F: CatFunctor, X: Presheaf, side: str) -> None:
    base = F.target if side == "target" else F.source
    if not (X.base is base or X.base == base):
        raise BaseMismatchError(f"presheaf is not over the functor {side}")


def union_classes(n: int, rel) -> tuple[list[int], list[int]]:
    """Classes of ``range(n)`` under the equivalence generated by ``rel``.

    Returns the least member of each class (in increasing order) and the
    class index of every item.
    """
    parent = list(range(n))

    def find(u):
        while parent[u] != u:
            parent[u] = parent[parent[u]]
            u = parent[u]
        return u

    for a, b in rel:
        ra, rb = find(a), find(b)
        if ra != rb:
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
    roots = sorted({find(u) for u in range(n)})
    pos = {r: k for k, r in enumerate(roots)}
    return roots, [pos[find(u)] for u in range(n)]


# -- restriction ----------------------------------------------------------


def restrict(F: CatFunctor, X: Presheaf) -> Presheaf:
    """``F^* X = X ∘ F``."""
    _check_over(F, X, "target")
    C = F.source
    elems = [X.elems[F.obj_map[c]] for c in range(C.n_objects)]
    action = [X.action[F.mor_map[f]] for f in range(C.n_morphisms)]
    return Presheaf(C, elems, action)


def restrict_map(F: CatFunctor, phi: PshMap) -> PshMap:
    return PshMap(
        restrict(F, phi.source),
        restrict(F, phi.target),
        [phi.components[F.obj_map[c]] for c in range(F.source.n_objects)],
    )


# -- left Kan extension ---------------------------------------------------


class _Lan:
    """Generator tables of the coend formula for ``F_! X``."""

    def __init__(self, F: CatFunctor, X: Presheaf):
        _check_over(F, X, "source")
        C, D = F.source, F.target
        self.F, self.X = F, X
        self.flat: list[dict[tuple[int, int, int], int]] = []
        self.cls: list[list[int]] = []
        self.reps: list[list[tuple[int, int, int]]] = []
        for d in range(D.n_objects):
            gens = [
                (c, u, x)
                for c in range(C.n_objects)
                for u in D.hom(d, F.obj_map[c])
                for x in range(X.size(c))
            ]
            flat = {g: i for i, g in enumerate(gens)}
            rel = []
            for g in range(C.n_morphisms):
                c, c2 = C.src[g], C.tgt[g]
                Fg = F.mor_map[g]
                for u in D.hom(d, F.obj_map[c]):
                    Fgu = D.compose(Fg, u)
                    for x2 in range(X.size(c2)):
                        rel.append((flat[(c2, Fgu, x2)], flat[(c, u, X.action[g][x2])]))
            roots, cls = union_classes(len(gens), rel)
            self.flat.append(flat)
            self.cls.append(cls)
            self.reps.append([gens[r] for r in roots])
        elems, action = [], []
        for d in range(D.n_objects):
            elems.append([
                (C.objects[c], D.labels[u], X.elems[c][x]) for c, u, x in self.reps[d]
            ])
        for h in range(D.n_morphisms):
            d2, d = D.src[h], D.tgt[h]
            action.append([self.cls_of(d2, (c, D.compose(u, h), x)) for c, u, x in self.reps[d]])
        self.obj = Presheaf(D, elems, action)

    def cls_of(self, d: int, gen: tuple[int, int, int]) -> int:
        return self.cls[d][self.flat[d][gen]]


@functools.lru_cache(maxsize=256)
def _lan(F: CatFunctor, X: Presheaf) -> _Lan:
    return _Lan(F, X)


def lan(F: CatFunctor, X: Presheaf) -> Presheaf:
    """Left Kan extension ``F_! X``; classes are labelled by their least generator."""
    return _lan(F, X).obj


def lan_map(F: CatFunctor, phi: PshMap) -> PshMap:
    L1, L2 = _lan(F, phi.source), _lan(F, phi.target)
    comps = [
        [L2.cls_of(d, (c, u, phi.components[c][x])) for c, u, x in L1.reps[d]]
        for d in range(F.target.n_objects)
    ]
    return PshMap(L1.obj, L2.obj, comps)


def lan_unit(F: CatFunctor, X: Presheaf) -> PshMap:
    """``X -> F^* F_! X``, sending ``x`` to the class of ``(c, id, x)``."""
    L = _lan(F, X)
    D = F.target
    comps = [
        [L.cls_of(F.obj_map[c], (c, D.identity[F.obj_map[c]], x)) for x in range(X.size(c))]
        for c in range(F.source.n_objects)
    ]
    return PshMap(X, restrict(F, L.obj), comps)


def lan_counit(F: CatFunctor, Y: Presheaf) -> PshMap:
    """``F_! F^* Y -> Y``, sending the class of ``(c, u, y)`` to ``Y(u)(y)``."""
    R = restrict(F, Y)
    L = _lan(F, R)
    comps = [[Y.action[u][y] for c, u, y in L.reps[d]] for d in range(F.target.n_objects)]
    return PshMap(L.obj, Y, comps)


# -- right Kan extension --------------------------------------------------


class _Ran:
    """Compatible-family tables of the end formula for ``F_* X``."""

    def __init__(self, F: CatFunctor, X: Presheaf):
        _check_over(F, X, "source")
        C, D = F.source, F.target
        self.F, self.X = F, X
        self.nodes: list[list[tuple[int, int]]] = []
        self.node_pos: list[dict[tuple[int, int], int]] = []
        self.fams: list[list[tuple[int, ...]]] = []
        self.index: list[dict[tuple[int, ...], int]] = []
        for d in range(D.n_objects):
            nodes = [(c, v) for c in range(C.n_objects) for v in D.hom(F.obj_map[c], d)]
            pos = {nd: i for i, nd in enumerate(nodes)}
            arrows = []
            for i, (c, v) in enumerate(nodes):
                for g in C.into(c):
                    if C.is_identity(g):
                        continue
                    arrows.append((i, pos[(C.src[g], D.compose(v, F.mor_map[g]))], X.action[g]))
            fams = _set_limit([X.size(c) for c, _ in nodes], arrows)
            self.nodes.append(nodes)
            self.node_pos.append(pos)
            self.fams.append(fams)
            self.index.append({t: k for k, t in enumerate(fams)})
        elems = [
            [tuple(X.elems[c][a] for (c, _), a in zip(self.nodes[d], t)) for t in self.fams[d]]
            for d in range(D.n_objects)
        ]
        action = []
        for h in range(D.n_morphisms):
            d2, d = D.src[h], D.tgt[h]
            pos = self.node_pos[d]
            picks = [pos[(c, D.compose(h, v))] for c, v in self.nodes[d2]]
            action.append([self.index[d2][tuple(t[p] for p in picks)] for t in self.fams[d]])
        self.obj = Presheaf(D, elems, action)


@functools.lru_cache(maxsize=256)
def _ran(F: CatFunctor, X: Presheaf) -> _Ran:
    return _Ran(F, X)


def ran(F: CatFunctor, X: Presheaf) -> Presheaf:
    """Right Kan extension ``F_* X``."""
    return _ran(F, X).obj


def ran_map(F: CatFunctor, phi: PshMap) -> PshMap:
    R1, R2 = _ran(F, phi.source), _ran(F, phi.target)
    comps = []
    for d in range(F.target.n_objects):
        comps.append([
            R2.index[d][tuple(phi.components[c][a] for (c, _), a in zip(R1.nodes[d], t))]
            for t in R1.fams[d]
        ])
    return PshMap(R1.obj, R2.obj, comps)


def ran_unit(F: CatFunctor, Y: Presheaf) -> PshMap:
    """``Y -> F_* F^* Y``, sending ``y`` to the family ``(Y(v)(y))``."""
    R = _ran(F, restrict(F, Y))
    comps = []
    for d in range(F.target.n_objects):
        comps.append([
            R.index[d][tuple(Y.action[v][y] for _, v in R.nodes[d])] for y in range(Y.size(d))
        ])
    return PshMap(Y, R.obj, comps)


def ran_counit(F: CatFunctor, X: Presheaf) -> PshMap:
    """``F^* F_* X -> X``, evaluating a family at ``(c, id)``."""
    R = _ran(F, X)
    D = F.target
    comps = []
    for c in range(F.source.n_objects):
        Fc = F.obj_map[c]
        p = R.node_pos[Fc][(c, D.identity[Fc])]
        comps.append([t[p] for t in R.fams[Fc]])
    return PshMap(restrict(F, R.obj), X, comps)


# -- ambient categories and named functors --------------------------------


@functools.lru_cache(maxsize=32)
def _delta(N: int) -> FinCat:
    return delta_truncated(N)


@functools.lru_cache(maxsize=32)
def d_simplicial(D: FinCat, N: int) -> FinCat:
    """``D × Δ≤N`` with objects ``(d, k)``."""
    return product_cat(D, _delta(N))


@functools.lru_cache(maxsize=32)
def d_bisimplicial(D: FinCat, N: int) -> FinCat:
    """``D × Δ≤N × Δ≤N`` with objects ``(d, k, l)``."""
    return product_cat(D, _delta(N), _delta(N))


def product_functor(
    S: FinCat,
    T: FinCat,
    on_objects: Callable[[Hashable], Hashable],
    on_morphisms: Callable[[int], Hashable],
) -> CatFunctor:
    """A functor given on object labels and by the ``T``-label of each ``S``-morphism id."""
    obj_map = [T.index(on_objects(x)) for x in S.objects]
    mor_map = [
        T.find(obj_map[S.src[m]], obj_map[S.tgt[m]], on_morphisms(m))
        for m in range(S.n_morphisms)
    ]
    return CatFunctor(S, T, obj_map, mor_map)


def _delta_id(N: int, k: int) -> int:
    return _delta(N).identity[k]


def _delta_const(N: int, k: int) -> int:
    """The unique map ``[k] -> [0]``."""
    D = _delta(N)
    return D.find(k, 0, (0,) * (k + 1))


def reversal(N: int) -> CatFunctor:
    """The automorphism of ``Δ≤N`` with ``σ(α)(j) = n - α(m - j)``."""
    D = _delta(N)
    mor_map = []
    for a in range(D.n_morphisms):
        n = D.tgt[a]
        lab = D.labels[a]
        m = len(lab) - 1
        mor_map.append(D.find(D.src[a], n, tuple(n - lab[m - j] for j in range(m + 1))))
    return CatFunctor(D, D, list(range(D.n_objects)), mor_map)


@dataclass(frozen=True)
class NamedFunctorSpec:
    """A named functor: ``und(d)``, ``disc``, ``val(k)``, ``vemb``,
    ``diag_restrict``, ``diag_ran`` or ``op``."""

    tag: str
    param: Hashable = None

    TAGS = ("und", "disc", "val", "vemb", "diag_restrict", "diag_ran", "op")

    @classmethod
    def parse(cls, text: str) -> NamedFunctorSpec:
        tag, _, param = text.partition(":")
        tag = {"fdiag": "diag_restrict", "diag": "diag_restrict"}.get(tag, tag)
        if tag not in cls.TAGS:
            raise StrictCatError(f"unknown named functor {tag!r}; expected one of {cls.TAGS}")
        if tag in ("und", "val") and not param:
            raise StrictCatError(f"{tag} needs a parameter, e.g. {tag}:x")
        if tag == "val":
            return cls(tag, int(param))
        return cls(tag, param or None)


def named_functor(spec: NamedFunctorSpec, D: FinCat, N: int) -> tuple[str, CatFunctor]:
    """Return ``(kind, functor)`` where kind is ``restrict``, ``lan`` or ``ran``."""
    DS = d_simplicial(D, N)
    Dl = _delta(N)
    tag = spec.tag
    if tag == "und":
        d = _resolve_object(D, spec.param)
        return "restrict", product_functor(Dl, DS, lambda n: (d, n), lambda a: (D.identity[D.index(d)], a))
    if tag == "disc":
        return "restrict", CatFunctor(
            DS, Dl, [Dl.index(x[1]) for x in DS.objects], [lab[1] for lab in DS.labels]
        )
    if tag in ("val", "vemb"):
        k = spec.param if tag == "val" else 0
        if not (0 <= k <= N):
            raise StrictCatError(f"level {k} outside 0..{N}")
        F = product_functor(D, DS, lambda d: (d, k), lambda f: (f, _delta_id(N, k)))
        return ("restrict" if tag == "val" else "lan"), F
    if tag in ("diag_restrict", "diag_ran"):
        DB = d_bisimplicial(D, N)
        lab = DS.labels
        F = product_functor(DS, DB, lambda x: (x[0], x[1], x[1]), lambda m: (lab[m][0], lab[m][1], lab[m][1]))
        return ("restrict" if tag == "diag_restrict" else "ran"), F
    if tag == "op":
        sigma = reversal(N)
        lab = DS.labels
        return "restrict", product_functor(DS, DS, lambda x: x, lambda m: (lab[m][0], sigma.mor_map[lab[m][1]]))
    raise StrictCatError(f"unknown named functor {tag!r}")


def _resolve_object(D: FinCat, param) -> Hashable:
    if D.has_object(param):
        return param
    for x in D.objects:
        if str(x) == str(param):
            return x
    return D.objects[D.index(param)]


def apply_named(spec: NamedFunctorSpec, X: Presheaf, D: FinCat, N: int) -> Presheaf:
    kind, F = named_functor(spec, D, N)
    if kind == "restrict":
        return restrict(F, X)
    if kind == "lan":
        return lan(F, X)
    return ran(F, X)


def und(X: Presheaf, d: Hashable, D: FinCat, N: int) -> Presheaf:
    """The underlying simplicial set at ``d`` of a presheaf over ``D × Δ≤N``."""
    return apply_named(NamedFunctorSpec("und", d), X, D, N)


def disc(S: Presheaf, D: FinCat, N: int) -> Presheaf:
    """Pull a simplicial set back to ``D × Δ≤N`` along the projection."""
    return apply_named(NamedFunctorSpec("disc"), S, D, N)


def val(X: Presheaf, k: int, D: FinCat, N: int) -> Presheaf:
    return apply_named(NamedFunctorSpec("val", k), X, D, N)


def vemb(A: Presheaf, D: FinCat, N: int) -> Presheaf:
    """Left Kan extension along ``d |-> (d, 0)``; constant in the simplicial direction."""
    return apply_named(NamedFunctorSpec("vemb"), A, D, N)


def _space_level_vemb_functor(D: FinCat, N: int) -> CatFunctor:
    DS, DB = d_simplicial(D, N), d_bisimplicial(D, N)
    lab = DS.labels
    return product_functor(
        DS, DB, lambda x: (x[0], 0, x[1]), lambda m: (lab[m][0], _delta_id(N, 0), lab[m][1])
    )


def vemb_space(A: Presheaf, D: FinCat, N: int) -> Presheaf:
    """The value embedding of a D-space ``A`` over ``D × Δ≤N`` (space direction ``l``)
    into D-simplicial spaces over ``D × Δ≤N × Δ≤N``: left Kan extension along
    ``(d, l) |-> (d, 0, l)``."""
    return lan(_space_level_vemb_functor(D, N), A)


def fdiag(Y: Presheaf, D: FinCat, N: int) -> Presheaf:
    """Restriction along ``Diag(d, k) = (d, k, k)``."""
    return apply_named(NamedFunctorSpec("diag_restrict"), Y, D, N)


def diag_ran(A: Presheaf, D: FinCat, N: int) -> Presheaf:
    """Right Kan extension along ``Diag``."""
    return apply_named(NamedFunctorSpec("diag_ran"), A, D, N)


def op(X: Presheaf, D: FinCat, N: int) -> Presheaf:
    """Reverse the simplicial direction of a presheaf over ``D × Δ≤N``."""
    return apply_named(NamedFunctorSpec("op"), X, D, N)


# -- geometric realization ------------------------------------------------


def realize(X: Presheaf, N: int) -> tuple[Presheaf, int]:
    """The coend of ``X`` against the nerves of the slices ``D/d``, truncated at ``N``.

    An element of ``N(D/d)_n`` is a chain ``d0 -> ... -> dn`` with a structure
    map ``s: dn -> d``.  Generators ``(d, x, chain, s)`` are identified along
    ``(d, X(g)x', chain, s) ~ (d', x', chain, g∘s)``.  Returns the realization
    and its number of connected components.
    """
    D = X.base
    Dl = _delta(N)
    chains = [list(iter_chains(D, n)) for n in range(N + 1)]
    ends = [[(x0 if not fs else D.tgt[fs[-1]]) for x0, fs in cs] for cs in chains]
    elems, flat_all, cls_all, reps_all = [], [], [], []
    for n in range(N + 1):
        gens = [
            (d, x, i, s)
            for d in range(D.n_objects)
            for x in range(X.size(d))
            for i, e in enumerate(ends[n])
            for s in D.hom(e, d)
        ]
        flat = {g: k for k, g in enumerate(gens)}
        rel = []
        for g in range(D.n_morphisms):
            d, d2 = D.src[g], D.tgt[g]
            for x2 in range(X.size(d2)):
                x = X.action[g][x2]
                for i, e in enumerate(ends[n]):
                    for s in D.hom(e, d):
                        rel.append((flat[(d, x, i, s)], flat[(d2, x2, i, D.compose(g, s))]))
        roots, cls = union_classes(len(gens), rel)
        reps = [gens[r] for r in roots]
        flat_all.append(flat)
        cls_all.append(cls)
        reps_all.append(reps)
        elems.append([
            (D.objects[d], X.elems[d][x], _chain_label(D, chains[n][i]), D.labels[s])
            for d, x, i, s in reps
        ])
    chain_pos = [{c: i for i, c in enumerate(cs)} for cs in chains]
    action = []
    for a in range(Dl.n_morphisms):
        m, n, alpha = Dl.src[a], Dl.tgt[a], Dl.labels[a]
        row = []
        for d, x, i, s in reps_all[n]:
            x0, fs = chains[n][i]
            y0, gs = chain_restrict(D, x0, fs, alpha)
            # the restricted chain ends at position alpha[-1]; extend s by the tail
            xs = [x0] + [D.tgt[f] for f in fs]
            tail = _compose_range(D, xs, fs, alpha[-1], len(fs))
            s2 = D.compose(s, tail)
            row.append(cls_all[m][flat_all[m][(d, x, chain_pos[m][(y0, gs)], s2)]])
        action.append(row)
    R = Presheaf(Dl, elems, action, name="realization")
    return R, pi0(R)[0]


def _compose_range(D: FinCat, xs, fs, a: int, b: int) -> int:
    m = D.identity[xs[a]]
    for i in range(a, b):
        m = D.compose(fs[i], m)
    return m


def _chain_label(D: FinCat, chain) -> tuple:
    x0, fs = chain
    return (D.objects[x0], tuple(D.labels[f] for f in fs))


def realize_by_chains(X: Presheaf, N: int) -> list[int]:
    """Level sizes of the realization from the closed chain formula
    ``∐_{d0 -> ... -> dn} X(dn)``; an independent count for cross-checks."""
    D = X.base
    out = []
    for n in range(N + 1):
        total = 0
        for x0, fs in iter_chains(D, n):
            total += X.size(D.tgt[fs[-1]] if fs else x0)
        out.append(total)
    return out
