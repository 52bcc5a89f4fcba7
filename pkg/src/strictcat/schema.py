"""JSON instances: a versioned envelope ``{version, kind, name, payload}``.

Objects and morphisms are arrays of records with string ids; composition is
an array of ``[g, f, gf]`` id triples; presheaf actions are per-morphism
index lists.  Labels may be any JSON scalar or (nested) array; arrays are
read back as tuples so that labels stay hashable.  Loading runs the full
audit of the corresponding type.
"""
from __future__ import annotations

import json
from collections.abc import Hashable
from dataclasses import dataclass
from typing import Any

from .enriched import EnrichedCat, PshFunctor
from .errors import AuditError, StrictCatError
from .fincat import CatFunctor, FinCat, delta_truncated, product_cat
from .groth import SetFunctor
from .presheaf import Presheaf, PshMap

__all__ = [
    "SCHEMA_VERSION",
    "KINDS",
    "Instance",
    "SchemaError",
    "encode_label",
    "decode_label",
    "to_payload",
    "from_payload",
    "dumps",
    "loads",
    "load",
    "save",
]

SCHEMA_VERSION = 1
KINDS = ("fincat", "functor", "presheaf", "pshmap", "enriched_cat", "enriched_functor", "set_functor")


class SchemaError(StrictCatError):
    pass


@dataclass
class Instance:
    kind: str
    value: Any
    name: str | None = None


def encode_label(x: Hashable):
    if isinstance(x, tuple):
        return [encode_label(v) for v in x]
    if x is None or isinstance(x, (str, int, float, bool)):
        return x
    raise SchemaError(f"label {x!r} is not JSON-representable")


def decode_label(x):
    if isinstance(x, list):
        return tuple(decode_label(v) for v in x)
    return x


# -- finite categories ----------------------------------------------------


def _cat_payload(C: FinCat) -> dict:
    out = {
        "objects": [{"id": f"o{i}", "label": encode_label(x)} for i, x in enumerate(C.objects)],
        "morphisms": [
            {"id": f"m{m}", "label": encode_label(C.labels[m]), "source": f"o{C.src[m]}", "target": f"o{C.tgt[m]}"}
            for m in range(C.n_morphisms)
        ],
        "identities": [f"m{i}" for i in C.identity],
        "composition": [[f"m{g}", f"m{f}", f"m{C.compose(g, f)}"] for g, f in sorted(C.composable_pairs(), key=lambda p: (p[1], p[0]))],
    }
    if C.factors:
        out["shape"] = {"kind": "product", "factors": [_cat_payload(F) for F in C.factors]}
    elif C.delta_level is not None:
        out["shape"] = {"kind": "delta", "N": C.delta_level}
    if C.name:
        out["name"] = C.name
    return out


def _ids(records, what):
    pos = {}
    for i, r in enumerate(records):
        rid = r.get("id")
        if not isinstance(rid, str):
            raise SchemaError(f"{what} {i} needs a string id")
        if rid in pos:
            raise AuditError(f"distinct {what} ids", rid)
        pos[rid] = i
    return pos


def _lookup(pos, key, what):
    try:
        return pos[key]
    except KeyError:
        raise AuditError(f"{what} ids resolve", key) from None


def _cat_from(p: dict) -> FinCat:
    try:
        objs, mors = p["objects"], p["morphisms"]
        opos = _ids(objs, "object")
        mpos = _ids(mors, "morphism")
        morphisms = [
            (decode_label(r["label"]), _lookup(opos, r["source"], "object"), _lookup(opos, r["target"], "object"))
            for r in mors
        ]
        identity = [_lookup(mpos, i, "morphism") for i in p["identities"]]
        comp = {}
        for triple in p["composition"]:
            g, f, h = (_lookup(mpos, t, "morphism") for t in triple)
            if (g, f) in comp:
                raise AuditError("composition is a function", (triple[0], triple[1]))
            comp[(g, f)] = h
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, StrictCatError):
            raise
        raise SchemaError(f"malformed category payload: {exc}") from None
    C = FinCat([decode_label(r["label"]) for r in objs], morphisms, identity, comp, name=p.get("name"))
    C.validate()
    shape = p.get("shape")
    if shape:
        if shape.get("kind") == "delta":
            R = delta_truncated(int(shape["N"]))
        elif shape.get("kind") == "product":
            R = product_cat(*(_cat_from(f) for f in shape["factors"]))
        else:
            raise SchemaError(f"unknown category shape {shape.get('kind')!r}")
        if R._key() != C._key() or R.table != C.table:
            raise AuditError("declared shape matches the tables", shape.get("kind"))
        return R
    return C


# -- presheaves and maps --------------------------------------------------


def _psh_body(X: Presheaf) -> dict:
    return {
        "values": [[encode_label(e) for e in es] for es in X.elems],
        "action": [list(a) for a in X.action],
    }


def _psh_payload(X: Presheaf) -> dict:
    out = {"base": _cat_payload(X.base), **_psh_body(X)}
    if X.name:
        out["name"] = X.name
    return out


def _psh_body_from(B: FinCat, p: dict, name=None) -> Presheaf:
    try:
        X = Presheaf(B, [[decode_label(e) for e in es] for es in p["values"]], p["action"], name=name)
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed presheaf payload: {exc}") from None
    if len(X.elems) != B.n_objects or len(X.action) != B.n_morphisms:
        raise AuditError("presheaf tables cover the base", (len(X.elems), len(X.action)))
    return X.validate()


def _psh_from(p: dict) -> Presheaf:
    return _psh_body_from(_cat_from(p["base"]), p, p.get("name"))


def _map_payload(f: PshMap) -> dict:
    return {"source": _psh_payload(f.source), "target": _psh_payload(f.target), "components": [list(c) for c in f.components]}


def _map_from(p: dict) -> PshMap:
    X, Y = _psh_from(p["source"]), _psh_from(p["target"])
    if X.base != Y.base:
        raise AuditError("map endpoints share a base", None)
    return PshMap(X, Y, p["components"]).validate()


def _functor_payload(F: CatFunctor) -> dict:
    return {
        "source": _cat_payload(F.source),
        "target": _cat_payload(F.target),
        "objects": [f"o{y}" for y in F.obj_map],
        "morphisms": [f"m{m}" for m in F.mor_map],
    }


def _functor_from(p: dict) -> CatFunctor:
    S, T = _cat_from(p["source"]), _cat_from(p["target"])
    opos = {f"o{i}": i for i in range(T.n_objects)}
    mpos = {f"m{i}": i for i in range(T.n_morphisms)}
    F = CatFunctor(S, T, [_lookup(opos, o, "object") for o in p["objects"]], [_lookup(mpos, m, "morphism") for m in p["morphisms"]])
    return F.validate()


def _set_functor_payload(F: SetFunctor) -> dict:
    return {"source": _cat_payload(F.source), "values": [[encode_label(e) for e in es] for es in F.elems], "action": [list(a) for a in F.action]}


def _set_functor_from(p: dict) -> SetFunctor:
    C = _cat_from(p["source"])
    F = SetFunctor(C, [[decode_label(e) for e in es] for es in p["values"]], p["action"])
    return F.validate()


# -- enriched -------------------------------------------------------------


def _enriched_payload(C: EnrichedCat) -> dict:
    n = C.n_objects
    return {
        "index": _cat_payload(C.index),
        "objects": [encode_label(x) for x in C.objects],
        "homs": [
            {"source": x, "target": y, **_psh_body(C.hom[(x, y)])} for x in range(n) for y in range(n)
        ],
        "composition": [
            {"x": x, "y": y, "z": z, "tables": [list(t) for t in C.comp[(x, y, z)]]}
            for x in range(n) for y in range(n) for z in range(n)
        ],
        "units": [list(u) for u in C.unit],
    }


def _enriched_from(p: dict) -> EnrichedCat:
    D = _cat_from(p["index"])
    objs = [decode_label(x) for x in p["objects"]]
    hom = {(r["source"], r["target"]): _psh_body_from(D, r) for r in p["homs"]}
    comp = {(r["x"], r["y"], r["z"]): r["tables"] for r in p["composition"]}
    C = EnrichedCat(D, objs, hom, comp, p["units"], name=p.get("name"))
    n = len(objs)
    for key in [(x, y) for x in range(n) for y in range(n)]:
        if key not in hom:
            raise AuditError("every hom-presheaf is given", key)
    return C.validate()


def _psh_functor_payload(G: PshFunctor) -> dict:
    n = G.C.n_objects
    return {
        "category": _enriched_payload(G.C),
        "values": [_psh_body(v) for v in G.values],
        "action": [{"source": x, "target": y, "tables": [list(t) for t in G.act[(x, y)]]} for x in range(n) for y in range(n)],
    }


def _psh_functor_from(p: dict) -> PshFunctor:
    C = _enriched_from(p["category"])
    values = [_psh_body_from(C.index, v) for v in p["values"]]
    act = {(r["source"], r["target"]): r["tables"] for r in p["action"]}
    return PshFunctor(C, values, act).validate()


_ENCODERS = {
    "fincat": (FinCat, _cat_payload, _cat_from),
    "functor": (CatFunctor, _functor_payload, _functor_from),
    "presheaf": (Presheaf, _psh_payload, _psh_from),
    "pshmap": (PshMap, _map_payload, _map_from),
    "enriched_cat": (EnrichedCat, _enriched_payload, _enriched_from),
    "enriched_functor": (PshFunctor, _psh_functor_payload, _psh_functor_from),
    "set_functor": (SetFunctor, _set_functor_payload, _set_functor_from),
}


def kind_of(value) -> str:
    for kind, (cls, _, _) in _ENCODERS.items():
        if isinstance(value, cls):
            return kind
    raise SchemaError(f"cannot serialize {type(value).__name__}")


def to_payload(value) -> dict:
    return _ENCODERS[kind_of(value)][1](value)


def from_payload(kind: str, payload: dict):
    if kind not in _ENCODERS:
        raise SchemaError(f"unknown kind {kind!r}; expected one of {KINDS}")
    return _ENCODERS[kind][2](payload)


def dumps(value, *, name: str | None = None, pretty: bool = False) -> str:
    """Canonical JSON text for ``value`` (sorted keys; compact unless ``pretty``)."""
    env = {"version": SCHEMA_VERSION, "kind": kind_of(value), "name": name, "payload": to_payload(value)}
    if pretty:
        return json.dumps(env, sort_keys=True, indent=2, ensure_ascii=False) + "\n"
    return json.dumps(env, sort_keys=True, separators=(",", ":"), ensure_ascii=False) + "\n"


def loads(text: str) -> Instance:
    try:
        env = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc}") from None
    if not isinstance(env, dict):
        raise SchemaError("instance must be a JSON object")
    if env.get("version") != SCHEMA_VERSION:
        raise SchemaError(f"unsupported or missing schema version {env.get('version')!r}")
    kind = env.get("kind")
    if "payload" not in env:
        raise SchemaError("instance has no payload")
    return Instance(kind, from_payload(kind, env["payload"]), env.get("name"))


def load(path) -> Instance:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())


def save(value, path, *, name: str | None = None, pretty: bool = False) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(value, name=name, pretty=pretty))
