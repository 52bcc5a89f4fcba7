"""Command-line front end: load JSON instances, run one operation, print a report.

Exit status is 0 on ``pass``, 1 on ``fail``/``refused`` and 2 on usage or
budget errors.
"""
from __future__ import annotations

import argparse
import json
import random
import sys
import time
from collections.abc import Sequence

from . import __version__
from .enriched import EnrichedCat, PshFunctor, d_nerve, strict_segal_check
from .errors import BudgetExceededError, StrictCatError
from .fincat import CatFunctor, FinCat, theta_construct, theta_hom_count
from .generate import random_category, random_enriched, random_index_category, random_presheaf
from .groth import OpfibCandidate, SetFunctor, classify_opfib, fiber, int_classical, int_enriched, sint, vertex_point
from .higher import slice_object, twisted_arrow
from .kanext import NamedFunctorSpec, apply_named, lan, ran, restrict
from .lifting import attach_cells, has_rlp, left_fib_check
from .presheaf import Presheaf, PshMap, nerve
from .schema import decode_label, load, save, to_payload

COMMANDS = (
    "validate", "grothendieck", "classify", "nerve", "segal", "tw", "slice",
    "rlp", "theta", "kan", "sint", "fiber", "attach",
)
DEFAULT_SEED = 0


_VALUE = "__value__"  # the object --output saves; never printed


class UsageError(StrictCatError):
    pass


def _report(command: str, verdict: str, *, witness=None, counts=None, result=None, value=None) -> dict:
    out = {"command": command, "verdict": verdict, "counts": counts or {}}
    if value is not None:
        out[_VALUE] = value
    if witness is not None:
        out["witness"] = witness
    if result is not None:
        out["result"] = result
    return out


def _want(instances, kinds: Sequence[type], command: str):
    if len(instances) != len(kinds):
        raise UsageError(f"{command} takes {len(kinds)} --input file(s), got {len(instances)}")
    for i, (v, k) in enumerate(zip(instances, kinds)):
        if not isinstance(v, k):
            raise UsageError(f"{command}: input {i + 1} must be {k.__name__}, got {type(v).__name__}")
    return instances


def _point(args) -> object:
    if args.point is None:
        raise UsageError("this command needs --point (a JSON label)")
    try:
        return decode_label(json.loads(args.point))
    except json.JSONDecodeError:
        return args.point


# -- commands -------------------------------------------------------------


def cmd_validate(args, inst):
    if not inst:
        raise UsageError("validate needs at least one --input")
    counts = {}
    for i, v in enumerate(inst):
        if isinstance(v, FinCat):
            counts[f"input{i + 1}"] = {"objects": v.n_objects, "morphisms": v.n_morphisms}
        elif isinstance(v, Presheaf):
            counts[f"input{i + 1}"] = {"sizes": list(v.sizes)}
        else:
            counts[f"input{i + 1}"] = {"kind": type(v).__name__}
    return _report("validate", "pass", counts=counts)


def cmd_grothendieck(args, inst):
    if len(inst) == 1 and isinstance(inst[0], PshFunctor):
        levels, transports = int_enriched(inst[0].C, inst[0])
        return _report("grothendieck", "pass", counts={
            "levels": [{"objects": L.total.n_objects, "morphisms": L.total.n_morphisms} for L in levels],
            "transports": len(transports),
        }, result={"levels": [to_payload(L.total) for L in levels]})
    (F,) = _want(inst, [SetFunctor], "grothendieck")
    I = int_classical(F.source, F)
    return _report("grothendieck", "pass", value=I.projection, counts={
        "objects": I.total.n_objects, "morphisms": I.total.n_morphisms,
    }, result={"total": to_payload(I.total), "projection": to_payload(I.projection)})


def cmd_classify(args, inst):
    (P,) = _want(inst, [CatFunctor], "classify")
    r = classify_opfib(OpfibCandidate(P.source, P.target, P))
    if not r.ok:
        return _report("classify", "refused", witness=r.witness)
    return _report("classify", "pass", value=r.functor, counts={"fibres": list(r.functor.sizes)},
                   result={"functor": to_payload(r.functor), "iso": to_payload(r.iso)})


def cmd_nerve(args, inst):
    if len(inst) != 1 or not isinstance(inst[0], (FinCat, EnrichedCat)):
        raise UsageError("nerve takes one fincat or enriched_cat")
    K = args.level if args.level is not None else 3
    N = nerve(inst[0], K) if isinstance(inst[0], FinCat) else d_nerve(inst[0], K)
    return _report("nerve", "pass", value=N, counts={"sizes": list(N.sizes)}, result={"nerve": to_payload(N)})


def cmd_segal(args, inst):
    (X,) = _want(inst, [Presheaf], "segal")
    r = strict_segal_check(X)
    return _report("segal", "pass" if r.passed else "fail", witness=r.witness,
                   counts={"checked": len(r.checked)})


def cmd_tw(args, inst):
    (X,) = _want(inst, [Presheaf], "tw")
    T = twisted_arrow(X, args.level, dual=args.dual)
    counts = {"sizes": list(T.output.sizes), "level": T.K}
    witness = None
    ok = True
    # the fibration test needs at least one nondegenerate level
    if T.K >= 1:
        lf = left_fib_check(T.structure, side="right" if args.dual else "left")
        ok, witness = lf.passed, lf.witness
        counts["fibration_check"] = lf.passed
    return _report("tw", "pass" if ok else "fail", witness=witness, counts=counts, value=T.structure,
                   result={"tw": to_payload(T.output), "structure": to_payload(T.structure)})


def cmd_slice(args, inst):
    (W,) = _want(inst, [Presheaf], "slice")
    s = slice_object(W, _point(args), args.direction)
    side = "left" if args.direction == "under" else "right"
    lf = left_fib_check(s, side=side)
    return _report("slice", "pass" if lf.passed else "fail", witness=lf.witness, value=s, counts={"sizes": list(s.source.sizes), "fibration_check": lf.passed},
                   result={"projection": to_payload(s)})


def cmd_rlp(args, inst):
    p, f = _want(inst, [PshMap, PshMap], "rlp")
    r = has_rlp(p, f, args.mode, budget=args.budget)
    return _report("rlp", "pass" if r.holds else "fail", witness=r.as_dict().get("witness"),
                   counts={"squares": r.squares, "mode": r.mode, "verdict": r.verdict})


def cmd_theta(args, inst):
    (C,) = _want(inst, [FinCat], "theta")
    K = args.level if args.level is not None else 2
    T = theta_construct(C, K)
    if T.is_materialized:
        T.validate()
    bad = None
    pairs = 0
    for x in range(T.n_objects):
        for y in range(T.n_objects):
            pairs += 1
            a, b = len(T.hom(x, y)), theta_hom_count(C, T.objects[x], T.objects[y])
            if a != b and bad is None:
                bad = {"source": list(T.objects[x]), "target": list(T.objects[y]), "generated": a, "formula": b}
    return _report("theta", "fail" if bad else "pass", witness=bad,
                   counts={"objects": T.n_objects, "morphisms": T.n_morphisms, "pairs": pairs,
                           "audited": T.is_materialized})


def _named_shape(spec: NamedFunctorSpec, X: Presheaf, extra, level):
    """Recover ``(D, N)`` from the input's base; ``disc`` needs D as a second input
    and ``vemb`` needs N from ``--level``."""
    B = X.base
    if spec.tag == "disc":
        if B.delta_level is None or len(extra) != 1 or not isinstance(extra[0], FinCat):
            raise UsageError("kan --functor disc takes a presheaf over Δ≤N and the index category D")
        return extra[0], B.delta_level
    if extra:
        raise UsageError(f"kan --functor {spec.tag} takes a single presheaf")
    if spec.tag == "vemb":
        return B, level if level is not None else 2
    if not B.factors or B.factors[1].delta_level is None:
        raise UsageError(f"kan --functor {spec.tag} needs a presheaf over D × Δ≤N")
    return B.factors[0], B.factors[1].delta_level


def cmd_kan(args, inst):
    if args.named:
        if not inst or not isinstance(inst[0], Presheaf):
            raise UsageError("kan --functor takes a presheaf first")
        spec = NamedFunctorSpec.parse(args.named)
        D, N = _named_shape(spec, inst[0], inst[1:], args.level)
        Y = apply_named(spec, inst[0], D, N)
    else:
        F, X = _want(inst, [CatFunctor, Presheaf], "kan")
        Y = {"lan": lan, "ran": ran, "restrict": restrict}[args.ext](F, X)
    return _report("kan", "pass", value=Y, counts={"sizes": list(Y.sizes)}, result={"presheaf": to_payload(Y)})


def cmd_sint(args, inst):
    (G,) = _want(inst, [PshFunctor], "sint")
    K = args.level if args.level is not None else 2
    p = sint(G.C, G, K)
    lf = left_fib_check(p)
    return _report("sint", "pass" if lf.passed else "fail", witness=lf.witness, value=p,
                   counts={"sizes": list(p.source.sizes), "level_bijection": lf.passed},
                   result={"projection": to_payload(p)})


def cmd_fiber(args, inst):
    (p,) = _want(inst, [PshMap], "fiber")
    F = fiber(p, vertex_point(p.target, _point(args)))
    return _report("fiber", "pass", value=F, counts={"sizes": list(F.sizes)}, result={"fiber": to_payload(F)})


def cmd_attach(args, inst):
    if len(inst) < 1 or not all(isinstance(v, PshMap) for v in inst):
        raise UsageError("attach takes the map first, then generator maps")
    fac = attach_cells(inst[0], inst[1:], args.rounds, budget=args.budget)
    return _report("attach", "pass" if fac.resolved else "fail", value=fac.second,
                   witness=None if fac.resolved else {"rounds": len(fac.chain), "attached": fac.attached},
                   counts=fac.as_dict(), result={"first": to_payload(fac.first), "second": to_payload(fac.second)})


HANDLERS = {name: globals()[f"cmd_{name}"] for name in COMMANDS}


# -- random instances -----------------------------------------------------


def random_instance(kind: str, seed: int):
    rng = random.Random(seed)
    if kind == "fincat":
        return random_category(rng)
    if kind == "presheaf":
        from .fincat import delta_truncated

        return random_presheaf(rng, delta_truncated(2))
    if kind == "enriched_cat":
        return random_enriched(rng, random_index_category(rng))
    raise UsageError(f"--random supports fincat, presheaf, enriched_cat; not {kind!r}")


# -- entry point ----------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="strictcat", description="Exact finite category theory computations.")
    ap.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--input", "-i", action="append", default=[], metavar="FILE", help="JSON instance; repeat for several")
    ap.add_argument("--random", metavar="KIND", help="generate the input instead of reading it")
    ap.add_argument("--level", "-k", type=int, help="truncation level K")
    ap.add_argument("--mode", choices=("exists", "unique"), default="exists")
    ap.add_argument("--budget", type=int, help="square budget for lifting searches (default: TOOL_BUDGET or 10^6)")
    ap.add_argument("--seed", type=int, default=DEFAULT_SEED)
    ap.add_argument("--point", help="a vertex label, as JSON")
    ap.add_argument("--direction", choices=("under", "over"), default="under")
    ap.add_argument("--dual", action="store_true", help="twisted arrows with the swapped block convention")
    ap.add_argument("--rounds", type=int, default=3)
    ap.add_argument("--ext", choices=("lan", "ran", "restrict"), default="lan")
    ap.add_argument("--functor", "--named", dest="named", help="named functor spec, e.g. und:d or fdiag")
    ap.add_argument("--output", "-o", metavar="FILE", help="save the command's main result as an instance")
    ap.add_argument("--timing", action="store_true", help="add wall-clock time to the report")
    fmt = ap.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="pretty", action="store_false", help="compact JSON (default)")
    fmt.add_argument("--pretty", dest="pretty", action="store_true", help="indented JSON")
    ap.set_defaults(pretty=False)
    return ap


def run(command: str, args: argparse.Namespace, instances: list) -> dict:
    if command not in HANDLERS:
        raise UsageError(f"unknown command {command!r}")
    return HANDLERS[command](args, instances)


def main(argv: Sequence[str] | None = None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    start = time.perf_counter()
    try:
        instances = [load(path).value for path in args.input]
        if args.random:
            instances.append(random_instance(args.random, args.seed))
        report = run(args.command, args, instances)
        code = 0 if report["verdict"] == "pass" else 1
    except BudgetExceededError as exc:
        report = _report(args.command, "budget", witness={"what": exc.what, "budget": exc.budget})
        code = 2
    except (UsageError, OSError) as exc:
        print(f"strictcat: {exc}", file=sys.stderr)
        return 2
    except StrictCatError as exc:
        report = _report(args.command, "fail", witness={"error": type(exc).__name__, "message": str(exc),
                                                         "axiom": getattr(exc, "axiom", None)})
        code = 1
    value = report.pop(_VALUE, None)
    if args.output:
        if value is None:
            print(f"strictcat: {args.command} produced nothing to save", file=sys.stderr)
            return 2
        save(value, args.output, name=args.command, pretty=args.pretty)
    if args.timing:
        report["timing"] = round(time.perf_counter() - start, 6)
    indent = 2 if args.pretty else None
    seps = None if args.pretty else (",", ":")
    sys.stdout.write(json.dumps(report, sort_keys=True, indent=indent, separators=seps, ensure_ascii=False, default=_jsonable) + "\n")
    return code


def _jsonable(x):
    if isinstance(x, (set, frozenset)):
        return sorted(x)
    return repr(x)


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
