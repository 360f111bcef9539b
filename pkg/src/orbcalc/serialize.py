"""Strict JSON for decompositions, move scripts, move logs and reports.

Weights are integers or ``"inf"``; rationals are ``"p/q"`` strings (or ``"p"``
when integral).  Every object has a fixed key set and unknown keys are
rejected, so a misspelt field is an error rather than a silent default.
"""
from __future__ import annotations

import json
import re
from fractions import Fraction

from .bounds import ExampleReport
from .compressionbody import Ball, OneHandle, Product
from .decomposition import Decomposition, Piece, Role, Surface
from .errors import OrbcalcError, SchemaError
from .moves import MoveKind, MoveRecord, ThinningSequence
from .orbifold import INF, SurfaceComponent, check_weight

FORMAT_VERSION = 1

_RATIONAL = re.compile(r"-?\d+(/[1-9]\d*)?")


def dump_weight(w):
    return "inf" if w is INF else w


def load_weight(v, where: str, allow_one: bool = False):
    if v == "inf":
        return INF
    if allow_one and v == 1 and not isinstance(v, bool):
        return 1
    try:
        return check_weight(v)
    except OrbcalcError as exc:
        raise SchemaError(f"{where}: {exc}") from None


def dump_rational(x) -> str:
    return str(Fraction(x))


def load_rational(v, where: str) -> Fraction:
    if not isinstance(v, str) or not _RATIONAL.fullmatch(v):
        raise SchemaError(f"{where}: expected a rational string like '3/7', got {v!r}")
    return Fraction(v)


def _obj(v, where: str, required: set, optional: set = frozenset()) -> dict:
    if not isinstance(v, dict):
        raise SchemaError(f"{where}: expected an object, got {type(v).__name__}")
    keys = set(v)
    unknown = keys - required - optional
    if unknown:
        raise SchemaError(f"{where}: unknown fields {sorted(unknown)}")
    missing = required - keys
    if missing:
        raise SchemaError(f"{where}: missing fields {sorted(missing)}")
    return v


def _list(v, where: str) -> list:
    if not isinstance(v, list):
        raise SchemaError(f"{where}: expected a list, got {type(v).__name__}")
    return v


def _int(v, where: str, minimum: int = 0) -> int:
    if isinstance(v, bool) or not isinstance(v, int) or v < minimum:
        raise SchemaError(f"{where}: expected an integer >= {minimum}, got {v!r}")
    return v


def _str(v, where: str) -> str:
    if not isinstance(v, str) or not v:
        raise SchemaError(f"{where}: expected a nonempty string, got {v!r}")
    return v


def _version(v: dict, where: str):
    if v.get("format_version") != FORMAT_VERSION:
        raise SchemaError(f"{where}: unsupported format_version {v.get('format_version')!r}")


# ---------------------------------------------------------------- components and handles


def dump_component(c: SurfaceComponent) -> dict:
    return {"genus": c.genus, "punctures": [dump_weight(w) for w in c.punctures]}


def load_component(v, where: str) -> SurfaceComponent:
    v = _obj(v, where, {"genus", "punctures"})
    ps = [load_weight(w, f"{where}.punctures[{i}]") for i, w in enumerate(_list(v["punctures"], where))]
    return SurfaceComponent(_int(v["genus"], f"{where}.genus"), ps)


def _dump_zero(z) -> dict:
    if isinstance(z, Ball):
        return {"type": "ball", "cone": [dump_weight(w) for w in z.cone]}
    return {"type": "product", "genus": z.genus, "arcs": [dump_weight(w) for w in z.arcs]}


def _load_zero(v, where: str):
    if isinstance(v, dict) and v.get("type") == "ball":
        v = _obj(v, where, {"type", "cone"})
        return Ball([load_weight(w, f"{where}.cone") for w in _list(v["cone"], where)])
    if isinstance(v, dict) and v.get("type") == "product":
        v = _obj(v, where, {"type", "genus", "arcs"})
        return Product(_int(v["genus"], f"{where}.genus"), [load_weight(w, f"{where}.arcs") for w in _list(v["arcs"], where)])
    raise SchemaError(f"{where}: a 0-handle needs type 'ball' or 'product'")


def _dump_one(e: OneHandle) -> dict:
    out = {"a": e.a, "b": e.b}
    if e.weighted:
        out.update({"weight": dump_weight(e.weight), "a_slot": e.a_slot, "b_slot": e.b_slot})
    return out


def _load_one(v, where: str) -> OneHandle:
    if isinstance(v, dict) and "weight" in v:
        v = _obj(v, where, {"a", "b", "weight", "a_slot", "b_slot"})
        return OneHandle(
            _int(v["a"], f"{where}.a"),
            _int(v["b"], f"{where}.b"),
            load_weight(v["weight"], f"{where}.weight"),
            _int(v["a_slot"], f"{where}.a_slot"),
            _int(v["b_slot"], f"{where}.b_slot"),
        )
    v = _obj(v, where, {"a", "b"})
    return OneHandle(_int(v["a"], f"{where}.a"), _int(v["b"], f"{where}.b"))


# ---------------------------------------------------------------- decompositions


def decomposition_to_dict(d: Decomposition) -> dict:
    surfaces = []
    for s in d.surfaces:
        row = {"id": s.id, "role": s.role.value, **dump_component(s.component)}
        if s.role is not Role.BOUNDARY:
            row.update({"tail": s.tail, "head": s.head})
        surfaces.append(row)
    pieces = [
        {
            "id": p.id,
            "plus": p.plus,
            "minus": list(p.minus),
            "zero_handles": [_dump_zero(z) for z in p.zero_handles],
            "one_handles": [_dump_one(e) for e in p.one_handles],
        }
        for p in d.pieces
    ]
    return {"format_version": FORMAT_VERSION, "surfaces": surfaces, "pieces": pieces, "assertions": list(d.assertions)}


def decomposition_from_dict(v) -> Decomposition:
    v = _obj(v, "decomposition", {"format_version", "surfaces", "pieces", "assertions"})
    _version(v, "decomposition")
    surfaces = []
    for i, s in enumerate(_list(v["surfaces"], "surfaces")):
        where = f"surfaces[{i}]"
        role = s.get("role") if isinstance(s, dict) else None
        if role not in {r.value for r in Role}:
            raise SchemaError(f"{where}: role must be thick, thin or boundary")
        oriented = role != Role.BOUNDARY.value
        keys = {"id", "role", "genus", "punctures"} | ({"tail", "head"} if oriented else set())
        s = _obj(s, where, keys)
        comp = load_component({"genus": s["genus"], "punctures": s["punctures"]}, where)
        tail = _str(s["tail"], f"{where}.tail") if oriented else None
        head = _str(s["head"], f"{where}.head") if oriented else None
        surfaces.append(Surface(_str(s["id"], f"{where}.id"), Role(role), comp, tail, head))
    pieces = []
    for i, p in enumerate(_list(v["pieces"], "pieces")):
        where = f"pieces[{i}]"
        p = _obj(p, where, {"id", "plus", "minus", "zero_handles", "one_handles"})
        zs = [_load_zero(z, f"{where}.zero_handles[{k}]") for k, z in enumerate(_list(p["zero_handles"], where))]
        os_ = [_load_one(e, f"{where}.one_handles[{k}]") for k, e in enumerate(_list(p["one_handles"], where))]
        minus = [_str(m, f"{where}.minus") for m in _list(p["minus"], where)]
        pieces.append(Piece(_str(p["id"], f"{where}.id"), zs, os_, _str(p["plus"], f"{where}.plus"), minus))
    assertions = [_str(a, "assertions") for a in _list(v["assertions"], "assertions")]
    return Decomposition(surfaces, pieces, assertions)


def dumps(obj: dict) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def loads(text: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"not valid JSON: {exc}") from None


def serialize_decomposition(d: Decomposition) -> str:
    return dumps(decomposition_to_dict(d))


def parse_decomposition(text: str) -> Decomposition:
    return decomposition_from_dict(loads(text))


# ---------------------------------------------------------------- move parameters

_WEIGHT_KEYS = {"weight", "w1", "w2"}
_COMPONENT_KEYS = {"discarded", "h1", "h2", "f"}
_STRING_KEYS = {"thick", "thin", "piece", "thick1", "thick2", "name"}

PARAM_KEYS = {
    MoveKind.TYPE1_NONSEP: ({"thick"}, {"weight", "separating", "discarded", "piece", "handles"}),
    MoveKind.TYPE1_SEP: ({"thick", "discarded"}, {"weight", "separating", "piece", "handles"}),
    MoveKind.TYPE2: ({"thick", "weight"}, {"piece", "handles"}),
    MoveKind.CONSOLIDATION: ({"thick", "thin"}, set()),
    MoveKind.UNTELESCOPE: ({"thick", "w1", "w2", "h1", "h2", "f"}, {"handles", "names"}),
    MoveKind.CREATE_REMOVABLE: ({"piece", "ghost_arc"}, {"weight"}),
    MoveKind.AMALGAMATE: ({"thick1", "thick2", "thin"}, {"name"}),
}


def _dump_param(key, v):
    if v is None:
        return None
    if key in _WEIGHT_KEYS:
        return dump_weight(v)
    if key in _COMPONENT_KEYS:
        return dump_component(v)
    return v


def _load_param(key, v, where):
    where = f"{where}.{key}"
    if v is None and key not in _STRING_KEYS - {"piece", "name"}:
        return None
    if key in _WEIGHT_KEYS:
        return load_weight(v, where, allow_one=True)
    if key in _COMPONENT_KEYS:
        return load_component(v, where)
    if key in _STRING_KEYS:
        return _str(v, where)
    if key == "separating":
        if not isinstance(v, bool):
            raise SchemaError(f"{where}: expected a boolean")
        return v
    if key == "ghost_arc":
        return _int(v, where)
    if key == "handles":
        return [None if j is None else _int(j, where) for j in _list(v, where)]
    if key == "names":
        return [_str(n, where) for n in _list(v, where)]
    raise SchemaError(f"{where}: unknown parameter")


def params_to_dict(params: dict) -> dict:
    return {k: _dump_param(k, v) for k, v in params.items()}


def params_from_dict(kind: MoveKind, v, where: str) -> dict:
    required, optional = PARAM_KEYS[kind]
    v = _obj(v, where, required, optional)
    return {k: _load_param(k, x, where) for k, x in v.items()}


def _load_kind(v, where) -> MoveKind:
    try:
        return MoveKind(v)
    except ValueError:
        raise SchemaError(f"{where}: unknown move kind {v!r}") from None


def script_to_dict(steps) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "moves": [{"kind": MoveKind(k).value, "params": params_to_dict(p)} for k, p in steps],
    }


def script_from_dict(v) -> list:
    v = _obj(v, "script", {"format_version", "moves"})
    _version(v, "script")
    steps = []
    for i, m in enumerate(_list(v["moves"], "moves")):
        where = f"moves[{i}]"
        m = _obj(m, where, {"kind", "params"})
        kind = _load_kind(m["kind"], f"{where}.kind")
        steps.append((kind, params_from_dict(kind, m["params"], f"{where}.params")))
    return steps


def parse_script(text: str) -> list:
    return script_from_dict(loads(text))


def serialize_script(steps) -> str:
    return dumps(script_to_dict(steps))


def record_to_dict(r: MoveRecord) -> dict:
    return {
        "kind": r.kind.value,
        "params": params_to_dict(r.params),
        "delta_net_x": dump_rational(r.delta_net_x),
        "delta_net_iota": r.delta_net_iota,
    }


def record_from_dict(v, where: str = "record") -> MoveRecord:
    v = _obj(v, where, {"kind", "params", "delta_net_x", "delta_net_iota"})
    kind = _load_kind(v["kind"], f"{where}.kind")
    di = v["delta_net_iota"]
    if isinstance(di, bool) or not isinstance(di, int):
        raise SchemaError(f"{where}.delta_net_iota: expected an integer")
    return MoveRecord(
        kind,
        params_from_dict(kind, v["params"], f"{where}.params"),
        load_rational(v["delta_net_x"], f"{where}.delta_net_x"),
        di,
    )


def sequence_to_dict(seq: ThinningSequence) -> dict:
    return {
        "format_version": FORMAT_VERSION,
        "initial": decomposition_to_dict(seq.initial),
        "records": [record_to_dict(r) for r in seq.records],
        "final": decomposition_to_dict(seq.final),
    }


def sequence_from_dict(v) -> ThinningSequence:
    v = _obj(v, "sequence", {"format_version", "initial", "records", "final"})
    _version(v, "sequence")
    records = tuple(record_from_dict(r, f"records[{i}]") for i, r in enumerate(_list(v["records"], "records")))
    return ThinningSequence(decomposition_from_dict(v["initial"]), records, decomposition_from_dict(v["final"]))


# ---------------------------------------------------------------- reports


def _dump_value(v):
    if isinstance(v, bool) or v is None or isinstance(v, str):
        return v
    if v is INF:
        return "inf"
    if isinstance(v, (int, Fraction)):
        return dump_rational(v)
    return str(v)


def report_to_dict(rep: ExampleReport) -> dict:
    return {
        "name": rep.name,
        "params": {k: _dump_value(v) for k, v in rep.params.items()},
        "quantities": {k: _dump_value(v) for k, v in rep.quantities.items()},
        "claims": [{"text": c.text, "holds": c.holds} for c in rep.claims],
        "ok": rep.ok,
    }
