"""Lifting problems, the pushout-product / pullback-exponential calculus,
strict left-fibration checks and a bounded small-object argument.

Every verdict here is strict: lifts are searched exhaustively among
natural transformations, and fibrancy is decided by level bijections.
"""
from __future__ import annotations

import os
from collections.abc import Sequence
from dataclasses import dataclass, field

from .errors import BaseMismatchError, BudgetExceededError, StrictCatError
from .fincat import FinCat
from .presheaf import (
    Presheaf,
    PshMap,
    _check_base,
    _nat_components,
    exp_map,
    exponential,
    finite_colimit,
    iter_maps,
    product,
    pullback,
    pushout,
    representable_map,
)

__all__ = [
    "LiftingProblem",
    "LiftReport",
    "RlpReport",
    "LeftFibReport",
    "Factorization",
    "default_budget",
    "product_map",
    "pushout_product",
    "pullback_exponential",
    "solve",
    "iter_squares",
    "has_rlp",
    "initial_vertex_maps",
    "left_fib_check",
    "right_fib_check",
    "attach_cells",
]

DEFAULT_BUDGET = 10**6


def default_budget() -> int:
    """The square budget, overridable through the ``TOOL_BUDGET`` environment variable."""
    raw = os.environ.get("TOOL_BUDGET")
    return int(raw) if raw else DEFAULT_BUDGET


# -- lifting problems -----------------------------------------------------


@dataclass
class LiftingProblem:
    """A commuting square ``right ∘ top = bottom ∘ left``."""

    left: PshMap  # A -> B
    right: PshMap  # Y -> X
    top: PshMap  # A -> Y
    bottom: PshMap  # B -> X

    def validate(self) -> LiftingProblem:
        _check_base(self.left, self.right, self.top, self.bottom)
        if self.left.source != self.top.source or self.left.target != self.bottom.source:
            raise BaseMismatchError("left/top/bottom do not share their endpoints")
        if self.right.source != self.top.target or self.right.target != self.bottom.target:
            raise BaseMismatchError("right/top/bottom do not share their endpoints")
        if self.top.then(self.right).components != self.left.then(self.bottom).components:
            raise StrictCatError("lifting square does not commute")
        return self

    def as_dict(self) -> dict:
        return {"top": [list(c) for c in self.top.components], "bottom": [list(c) for c in self.bottom.components]}


@dataclass
class LiftReport:
    count: int
    solutions: list[PshMap] = field(default_factory=list)
    exhaustive: bool = True

    def as_dict(self) -> dict:
        return {
            "count": self.count,
            "exhaustive": self.exhaustive,
            "solutions": [[list(c) for c in s.components] for s in self.solutions],
        }


def _filler_constraints(left: PshMap, right: PshMap, top: PshMap, bottom: PshMap):
    """Admissible images of each element of ``B``, or ``None`` if some element has none."""
    B, Y = left.target, right.source
    allowed = {}
    for x in range(B.base.n_objects):
        over = {}
        for y in range(Y.size(x)):
            over.setdefault(right.components[x][y], []).append(y)
        forced: dict[int, int] = {}
        for a, b in enumerate(left.components[x]):
            t = top.components[x][a]
            if forced.setdefault(b, t) != t:
                return None
        for b in range(B.size(x)):
            cands = over.get(bottom.components[x][b], [])
            if b in forced:
                cands = [forced[b]] if forced[b] in cands else []
            if not cands:
                return None
            allowed[(x, b)] = cands
    return allowed


def solve(problem: LiftingProblem, *, keep: int = 2, count_limit: int = 10**4) -> LiftReport:
    """All diagonal fillers ``h: B -> Y`` with ``h ∘ left = top`` and ``right ∘ h = bottom``."""
    problem.validate()
    allowed = _filler_constraints(problem.left, problem.right, problem.top, problem.bottom)
    if allowed is None:
        return LiftReport(0)
    B, Y = problem.left.target, problem.right.source
    count, sols = 0, []
    for comps in iter_maps(B, Y, allowed=allowed):
        count += 1
        if len(sols) < keep:
            sols.append(PshMap(B, Y, comps))
        if count >= count_limit:
            return LiftReport(count, sols, exhaustive=False)
    return LiftReport(count, sols)


def _count_fillers(left, right, top, bottom, stop: int) -> int:
    allowed = _filler_constraints(left, right, top, bottom)
    if allowed is None:
        return 0
    n = 0
    for _ in iter_maps(left.target, right.source, allowed=allowed):
        n += 1
        if n >= stop:
            break
    return n


def iter_squares(f: PshMap, p: PshMap, *, budget: int | None = None):
    """Commuting squares from ``f: A -> B`` to ``p: Y -> X``, lexicographic in (top, bottom)."""
    _check_base(f, p)
    budget = default_budget() if budget is None else budget
    A, B = f.source, f.target
    Y, X = p.source, p.target
    seen = 0
    for top in _nat_components(A, Y):
        allowed = {}
        dead = False
        for x in range(A.base.n_objects):
            need: dict[int, int] = {}
            for a, b in enumerate(f.components[x]):
                v = p.components[x][top[x][a]]
                if need.setdefault(b, v) != v:
                    dead = True
            for b, v in need.items():
                allowed[(x, b)] = [v]
        if dead:
            continue
        for bottom in sorted(iter_maps(B, X, allowed=allowed)):
            seen += 1
            if seen > budget:
                raise BudgetExceededError("lifting squares", budget)
            yield PshMap(A, Y, top), PshMap(B, X, bottom)


@dataclass
class RlpReport:
    """Verdict of ``f ⋔ p``; ``witness`` is the least failing square."""

    holds: bool
    mode: str
    squares: int
    witness: LiftingProblem | None = None
    witness_count: int | None = None
    verdict: str = "strict"

    def as_dict(self) -> dict:
        out = {"holds": self.holds, "mode": self.mode, "squares": self.squares, "verdict": self.verdict}
        if self.witness is not None:
            out["witness"] = self.witness.as_dict()
            out["witness_fillers"] = self.witness_count
        return out


def has_rlp(p: PshMap, f: PshMap, mode: str = "exists", *, budget: int | None = None) -> RlpReport:
    """Decide whether ``p`` has the right lifting property against ``f``.

    ``exists`` asks for a filler in every square, ``unique`` for exactly one.
    """
    if mode not in ("exists", "unique"):
        raise ValueError(f"mode must be 'exists' or 'unique', not {mode!r}")
    _check_base(p, f)
    stop = 1 if mode == "exists" else 2
    n = 0
    for top, bottom in iter_squares(f, p, budget=budget):
        n += 1
        k = _count_fillers(f, p, top, bottom, stop + 1)
        if (mode == "exists" and k == 0) or (mode == "unique" and k != 1):
            return RlpReport(False, mode, n, LiftingProblem(f, p, top, bottom), min(k, stop))
    return RlpReport(True, mode, n)


# -- the Joyal-Tierney calculus -------------------------------------------


def product_map(f: PshMap, g: PshMap):
    """``f × g: A × C -> B × D`` together with both products (as limits)."""
    src = product(f.source, g.source)
    tgt = product(f.target, g.target)
    m = tgt.induced([src.legs[0].then(f), src.legs[1].then(g)])
    return m, src, tgt


def pushout_product(f: PshMap, g: PshMap) -> PshMap:
    """``f □ g: A×D ∐_{A×C} B×C -> B×D`` for ``f: A -> B`` and ``g: C -> D``."""
    _check_base(f, g)
    A, C = f.source, g.source
    idA, idC = PshMap.identity(A), PshMap.identity(C)
    idB, idD = PshMap.identity(f.target), PshMap.identity(g.target)
    AxG, _, _ = product_map(idA, g)  # A×C -> A×D
    FxC, _, _ = product_map(f, idC)  # A×C -> B×C
    FxD, _, BD = product_map(f, idD)  # A×D -> B×D
    BxG, _, _ = product_map(idB, g)  # B×C -> B×D
    P = pushout(AxG, FxC)
    out = P.induced([FxD, BxG])
    if out.target != BD.obj:
        raise AssertionError("pushout product codomain mismatch")
    return out


def pullback_exponential(f: PshMap, p: PshMap, *, max_elements: int | None = None) -> PshMap:
    """``Y^B -> Y^A ×_{X^A} X^B`` for ``f: A -> B`` and ``p: Y -> X``.

    ``max_elements`` bounds each exponential value (see :class:`Exponential`).
    """
    _check_base(f, p)
    A, B = f.source, f.target
    Y, X = p.source, p.target
    YB, YA, XA, XB = (exponential(S, T, max_elements=max_elements) for S, T in ((B, Y), (A, Y), (A, X), (B, X)))
    to_XA_from_YA = exp_map(YA, XA, p=p)
    to_XA_from_XB = exp_map(XB, XA, f=f)
    L = pullback(to_XA_from_YA, to_XA_from_XB)
    return L.induced([exp_map(YB, YA, f=f), exp_map(YB, XB, p=p)])


# -- strict left fibrations -----------------------------------------------


def _simplicial_shape(B: FinCat):
    """Split the base into (index objects, level, object lookup) for ``Δ≤K`` or ``D × Δ≤K``."""
    if B.delta_level is not None:
        return [None], B.delta_level, lambda d, k: k, lambda d, m: m
    if B.factors and len(B.factors) == 2 and B.factors[1].delta_level is not None:
        D, Dl = B.factors
        return (
            list(range(D.n_objects)),
            Dl.delta_level,
            lambda d, k: B.index((D.objects[d], k)),
            lambda d, m: B.find(B.index((D.objects[d], 0)), B.index((D.objects[d], Dl.objects[Dl.tgt[m]])), (D.identity[d], m)),
        )
    raise StrictCatError("expected a base Δ≤K or D × Δ≤K")


def _vertex_morphism(B: FinCat, k: int, side: str = "left") -> int:
    Dl = B if B.delta_level is not None else B.factors[1]
    return Dl.find(0, k, (0,) if side == "left" else (k,))


def initial_vertex_maps(B: FinCat) -> list[tuple[object, int, PshMap]]:
    """The generating inclusions ``⟨0⟩: F[d,0] -> F[d,k]`` for ``1 <= k <= K``."""
    ds, K, obj, mor = _simplicial_shape(B)
    out = []
    for d in ds:
        for k in range(1, K + 1):
            out.append((d, k, representable_map(B, mor(d, _vertex_morphism(B, k)))))
    return out


@dataclass
class LeftFibReport:
    passed: bool
    checked: int
    witness: dict | None = None
    verdict: str = "strict"

    def as_dict(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "witness": self.witness, "verdict": self.verdict}


def left_fib_check(p: PshMap, *, side: str = "left") -> LeftFibReport:
    """Decide whether ``Y[d,k] -> X[d,k] ×_{X[d,0]} Y[d,0]``, ``y |-> (p y, ⟨0⟩* y)``, is bijective.

    ``side="right"`` uses the last vertex ``⟨k⟩`` instead (the dual check).
    """
    if side not in ("left", "right"):
        raise ValueError(f"side must be 'left' or 'right', not {side!r}")
    B = p.base
    ds, K, obj, mor = _simplicial_shape(B)
    if K < 1:
        raise StrictCatError("left_fib_check needs K >= 1")
    Y, X = p.source, p.target
    checked = 0
    for d in ds:
        o0 = obj(d, 0)
        for k in range(1, K + 1):
            ok = obj(d, k)
            v = mor(d, _vertex_morphism(B, k, side))
            target = {
                (x, y0)
                for x in range(X.size(ok))
                for y0 in range(Y.size(o0))
                if X.action[v][x] == p.components[o0][y0]
            }
            image = {}
            for y in range(Y.size(ok)):
                key = (p.components[ok][y], Y.action[v][y])
                image.setdefault(key, []).append(y)
            checked += 1
            dup = next((ys for ys in image.values() if len(ys) > 1), None)
            if dup is not None or len(image) != len(target):
                return LeftFibReport(False, checked, {
                    "index": B.factors[0].objects[d] if d is not None else None,
                    "k": k,
                    "kind": "not injective" if dup is not None else "not surjective",
                    "source_count": Y.size(ok),
                    "pullback_count": len(target),
                })
    return LeftFibReport(True, checked)


def right_fib_check(p: PshMap) -> LeftFibReport:
    """The dual level-bijection check, through the last vertex."""
    return left_fib_check(p, side="right")


# -- bounded small-object argument ----------------------------------------


@dataclass
class Factorization:
    """``Y -> Ŷ -> X`` with the recorded chain ``Y = Y₀ -> Y₁ -> ...``."""

    first: PshMap
    second: PshMap
    chain: list[PshMap]
    attached: list[int]
    resolved: bool
    saturated: bool

    def as_dict(self) -> dict:
        return {
            "rounds": len(self.chain),
            "attached": self.attached,
            "resolved": self.resolved,
            "saturated": self.saturated,
            "middle_sizes": list(self.first.target.sizes),
        }


def attach_cells(
    p: PshMap, generators: Sequence[PshMap], rounds: int = 3, *, budget: int | None = None
) -> Factorization:
    """Factor ``p`` by repeatedly pushing out along all unfilled squares against ``generators``."""
    if rounds < 0:
        raise ValueError("rounds must be non-negative")
    for g in generators:
        _check_base(p, g)
    Y = p.source
    first = PshMap.identity(Y)
    cur = p
    chain: list[PshMap] = []
    attached: list[int] = []
    saturated = False
    for _ in range(rounds):
        problems = []
        for g in generators:
            for top, bottom in iter_squares(g, cur, budget=budget):
                if _count_fillers(g, cur, top, bottom, 1) == 0:
                    problems.append((g, top, bottom))
        if not problems:
            saturated = True
            break
        As = finite_colimit([g.source for g, _, _ in problems])
        Bs = finite_colimit([g.target for g, _, _ in problems])
        gens = As.induced([g.then(leg) for (g, _, _), leg in zip(problems, Bs.legs)])
        tops = As.induced([top for _, top, _ in problems])
        P = pushout(tops, gens)
        step = P.legs[0]
        cur = P.induced([cur, Bs.induced([bottom for _, _, bottom in problems])])
        first = first.then(step)
        chain.append(step)
        attached.append(len(problems))
    resolved = all(has_rlp(cur, g, "exists", budget=budget).holds for g in generators)
    if resolved:
        saturated = True
    return Factorization(first, cur, chain, attached, resolved, saturated)
