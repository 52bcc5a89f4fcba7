"""Twisted arrows and under/over objects.

Convention for twisted arrows: ``[n]`` goes to ``[2n+1] = [n]^op ⋆ [n]`` and
``α: [m] -> [n]`` goes to the map sending ``j <= m`` to ``n - α(m - j)`` and
``m + 1 + i`` to ``n + 1 + α(i)``.  The face ``d_i`` thus becomes the pair
``(d_{n-i}, d_{n+1+i})`` and the structure map lands in ``X^op × X``.  With
``dual=True`` the blocks are swapped (``[n] ⋆ [n]^op``) and the structure map
lands in ``X × X^op``.

The walking-arrow exponential used by :func:`slice_object` is taken in the
truncated presheaf category.  For nerves (which are determined by their
2-skeleta) it agrees with the untruncated one at every level once the
truncation is at least 2; this is what the test-suite checks.
"""
from __future__ import annotations

from collections.abc import Hashable
from dataclasses import dataclass

from .errors import StrictCatError
from .fincat import CatFunctor, FinCat
from .groth import vertex_point
from .kanext import _delta, d_simplicial, restrict
from .presheaf import Presheaf, PshMap, exponential, product, pullback, representable

__all__ = ["TwistedArrow", "twisted_arrow", "walking_arrow", "slice_object", "truncation_of"]


def truncation_of(B: FinCat) -> int:
    if B.delta_level is not None:
        return B.delta_level
    if B.factors and len(B.factors) == 2 and B.factors[1].delta_level is not None:
        return B.factors[1].delta_level
    raise StrictCatError("expected a base Δ≤K or D × Δ≤K")


def _reindex(B: FinCat, K: int, on_obj, on_mor) -> CatFunctor:
    """The functor ``Δ≤K -> Δ≤M`` given by ``on_obj``/``on_mor`` (image tuples),
    extended by the identity on ``D`` when ``B = D × Δ≤M``."""
    M = truncation_of(B)
    S = _delta(K)
    T = _delta(M)
    obj = [on_obj(k) for k in range(S.n_objects)]
    mor = [T.find(obj[S.src[a]], obj[S.tgt[a]], on_mor(S.labels[a], S.tgt[a])) for a in range(S.n_morphisms)]
    if B.delta_level is not None:
        return CatFunctor(S, B, obj, mor)
    D = B.factors[0]
    src = d_simplicial(D, K)
    obj_map = [B.index((x[0], obj[x[1]])) for x in src.objects]
    mor_map = [
        B.find(obj_map[src.src[m]], obj_map[src.tgt[m]], (src.labels[m][0], mor[src.labels[m][1]]))
        for m in range(src.n_morphisms)
    ]
    return CatFunctor(src, B, obj_map, mor_map)


def _tw_map(alpha, n, dual):
    m = len(alpha) - 1
    if not dual:
        return tuple(n - alpha[m - j] for j in range(m + 1)) + tuple(n + 1 + a for a in alpha)
    return tuple(alpha) + tuple(n + 1 + (n - alpha[m - i]) for i in range(m + 1))


@dataclass
class TwistedArrow:
    input: Presheaf
    output: Presheaf
    structure: PshMap  # output -> X^op × X (or X × X^op when dual)
    K: int
    dual: bool = False


def twisted_arrow(X: Presheaf, K: int | None = None, *, dual: bool = False) -> TwistedArrow:
    """``Tw(X)[n] = X[2n+1]`` for ``n <= K`` with its projection to the two vertex blocks."""
    B = X.base
    M = truncation_of(B)
    if K is None:
        K = (M - 1) // 2
    if K < 0 or 2 * K + 1 > M:
        raise StrictCatError(f"twisted arrows up to level {K} need truncation >= {2 * K + 1}, have {M}")
    eps = _reindex(B, K, lambda k: 2 * k + 1, lambda a, n: _tw_map(a, n, dual))
    Tw = restrict(eps, X)
    Tw.name = "Tw"
    # the plain restriction and the reversed one, both to level K
    plain = restrict(_reindex(B, K, lambda k: k, lambda a, n: tuple(a)), X)
    rev = restrict(_reindex(B, K, lambda k: k, lambda a, n: tuple(n - a[len(a) - 1 - j] for j in range(len(a)))), X)
    first_op = _reindex(B, K, lambda k: k, lambda a, n: tuple(a))  # object map only
    BK = eps.source
    blocks = []
    for side in (0, 1):
        comps = []
        for x in range(BK.n_objects):
            n = _level(BK, x)
            incl = tuple(range(n + 1)) if side == 0 else tuple(range(n + 1, 2 * n + 2))
            m = _lift_vertex_map(B, first_op.obj_map[x], eps.obj_map[x], incl)
            comps.append(X.action[m])
        blocks.append(comps)
    first, second = (rev, plain) if not dual else (plain, rev)
    target = product(first, second)
    legs = [PshMap(Tw, first, blocks[0]), PshMap(Tw, second, blocks[1])]
    structure = target.induced(legs)
    return TwistedArrow(X, Tw, structure, K, dual)


def _level(B: FinCat, x: int) -> int:
    ob = B.objects[x]
    return ob if B.delta_level is not None else ob[1]


def _lift_vertex_map(B: FinCat, s: int, t: int, image: tuple) -> int:
    """The morphism ``s -> t`` of ``B`` whose simplicial part is ``image`` (identity on ``D``)."""
    if B.delta_level is not None:
        return B.find(s, t, image)
    D, Dl = B.factors
    d = D.index(B.objects[s][0])
    return B.find(s, t, (D.identity[d], Dl.find(B.objects[s][1], B.objects[t][1], image)))


def walking_arrow(B: FinCat) -> Presheaf:
    """``D[1]``: the representable ``F[1]`` pulled back to the base (or ``F[1]`` itself over ``Δ``)."""
    if B.delta_level is not None:
        return representable(B, 1)
    K = truncation_of(B)
    return restrict(_project_delta(B, K), representable(_delta(K), 1))


def _project_delta(B: FinCat, K: int) -> CatFunctor:
    Dl = B.factors[1]
    return CatFunctor(B, Dl, [Dl.index(o[1]) for o in B.objects], [lab[1] for lab in B.labels])


def _check_constant_vertices(W: Presheaf) -> None:
    B = W.base
    if B.delta_level is not None:
        return
    D = B.factors[0]
    zero = [B.index((d, 0)) for d in D.objects]
    labels = set(W.elems[zero[0]])
    for x in zero:
        if set(W.elems[x]) != labels:
            raise StrictCatError("slice_object needs a constant 0-level")
    for h in range(D.n_morphisms):
        s, t = D.objects[D.src[h]], D.objects[D.tgt[h]]
        m = B.find(B.index((s, 0)), B.index((t, 0)), (h, B.factors[1].identity[0]))
        xt, xs = B.index((t, 0)), B.index((s, 0))
        for e, lab in enumerate(W.elems[xt]):
            if W.elems[xs][W.action[m][e]] != lab:
                raise StrictCatError("slice_object needs a constant 0-level")


def slice_object(W: Presheaf, x: Hashable, direction: str = "under", *, method: str = "fibre") -> PshMap:
    """``W_{x/} = D[0] ×_W W^{D[1]}`` (evaluation at ``⟨0⟩``), projected to ``W`` by ``⟨1⟩``;
    ``direction="over"`` swaps the two vertices.

    ``method="fibre"`` enumerates only the maps whose pinned vertex is ``x``
    (the pullback as a sub-presheaf of the exponential); ``method="pullback"``
    builds the whole exponential first and pulls back along the point.
    """
    if direction not in ("under", "over"):
        raise ValueError(f"direction must be 'under' or 'over', not {direction!r}")
    if method not in ("fibre", "pullback"):
        raise ValueError(f"method must be 'fibre' or 'pullback', not {method!r}")
    _check_constant_vertices(W)
    B = W.base
    A = walking_arrow(B)
    pin, out = (0, 1) if direction == "under" else (1, 0)
    point = vertex_point(W, x)
    if method == "pullback":
        E = exponential(A, W)
        P = pullback(point, _evaluate(E, A, pin))
        return P.legs[1].then(_evaluate(E, A, out))

    def allowed(b, P):
        # elements (u, constant pinned vertex) must go to the degenerate x
        res = {}
        for y in range(B.n_objects):
            pinned = A.index_of(y, (pin,) * (_level(B, y) + 1))
            for e, (_, a) in enumerate(P.elems[y]):
                if a == A.elems[y][pinned]:
                    res[(y, e)] = [point.components[y][0]]
        return res

    E = exponential(A, W, allowed=allowed)
    E.obj.name = f"W_{x!r}/" if direction == "under" else f"W_/{x!r}"
    return _evaluate(E, A, out)


def _evaluate(E, A: Presheaf, v: int) -> PshMap:
    """``W^{D[1]} -> W`` evaluating at the constant vertex ``v`` of ``D[1]``."""
    B = E.base
    comps = []
    for b in range(B.n_objects):
        lab = (v,) * (_level(B, b) + 1)
        e = A.index_of(b, lab)
        iid = E._hom_pos[b][b][B.identity[b]]
        n1 = A.size(b)
        comps.append([alpha[b][iid * n1 + e] for alpha in E.obj.elems[b]])
    return PshMap(E.obj, E.Y, comps)
