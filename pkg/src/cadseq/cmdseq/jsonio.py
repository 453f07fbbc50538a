"""Reading and writing the sequence-JSON format.

Canonical output has sorted keys, no whitespace and floats printed with
9 significant digits, so structurally equal sequences serialize to identical
bytes.
"""
from __future__ import annotations

import json
import math
import warnings
from typing import Any

from ..errors import (InvalidSequence, MalformedJson, SketchWithoutExtrusion,
                      UnknownCurveType, ValueOutOfRange)
from .model import (BOOL_NAMES, EXTENT_NAMES, Arc, BoolKind, CadSequence, Circle,
                    Extrude, Line, Loop, Profile, Step)

_BOOL_BY_NAME = {v: k for k, v in BOOL_NAMES.items()}
_EXTENT_BY_NAME = {v: k for k, v in EXTENT_NAMES.items()}


def canonical_float(v: float) -> str:
    if not math.isfinite(v):
        raise ValueOutOfRange(f"non-finite value {v!r} cannot be serialized")
    text = format(float(v), ".9g")
    if text == "-0":
        text = "0"
    return text


def dumps_canonical(obj: Any) -> str:
    """Minimal JSON emitter with fixed float formatting and sorted keys."""
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return canonical_float(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, (list, tuple)):
        return "[" + ",".join(dumps_canonical(x) for x in obj) + "]"
    if isinstance(obj, dict):
        items = sorted(obj.items())
        return "{" + ",".join(json.dumps(k) + ":" + dumps_canonical(v) for k, v in items) + "}"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def sequence_to_dict(seq: CadSequence) -> dict:
    steps = []
    for step in seq.steps:
        loops = []
        for loop in step.profile.loops:
            if loop.is_circle:
                c = loop.curves[0]
                loops.append({"circle": {"cx": float(c.x), "cy": float(c.y), "r": float(c.r)}})
                continue
            curves = []
            for c in loop.curves:
                if isinstance(c, Line):
                    curves.append({"line": {"x": float(c.x), "y": float(c.y)}})
                elif isinstance(c, Arc):
                    curves.append({"arc": {"x": float(c.x), "y": float(c.y),
                                           "alpha": float(c.alpha), "ccw": bool(c.ccw)}})
                else:
                    curves.append({"circle": {"cx": float(c.x), "cy": float(c.y), "r": float(c.r)}})
            loops.append({"curves": curves})
        e = step.extrude
        ext = {"theta": e.theta, "phi": e.phi, "gamma": e.gamma,
               "ox": e.origin[0], "oy": e.origin[1], "oz": e.origin[2],
               "s": e.s, "e_p": e.e_p, "e_n": e.e_n,
               "bool": BOOL_NAMES[e.b], "extent": EXTENT_NAMES[e.u]}
        ext = {k: (float(v) if not isinstance(v, str) else v) for k, v in ext.items()}
        steps.append({"profile": {"loops": loops}, "extrude": ext})
    return {"steps": steps}


def serialize_sequence(seq: CadSequence) -> str:
    return dumps_canonical(sequence_to_dict(seq))


def _num(d: dict, key: str, where: str) -> float:
    if not isinstance(d, dict) or key not in d:
        raise MalformedJson(f"missing numeric field {key!r}", at=where)
    v = d[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise MalformedJson(f"field {key!r} must be a number", at=where)
    v = float(v)
    if not math.isfinite(v):
        raise ValueOutOfRange(f"field {key!r} is not finite", at=where)
    return v


def _curve(obj: Any, where: str):
    if not isinstance(obj, dict) or len(obj) != 1:
        raise MalformedJson("curve must be an object with exactly one key", at=where)
    (kind, body), = obj.items()
    if kind == "line":
        return Line(_num(body, "x", where), _num(body, "y", where))
    if kind == "arc":
        ccw = body.get("ccw", True) if isinstance(body, dict) else True
        if not isinstance(ccw, (bool, int)):
            raise MalformedJson("arc 'ccw' must be a boolean", at=where)
        return Arc(_num(body, "x", where), _num(body, "y", where),
                   _num(body, "alpha", where), bool(ccw))
    if kind == "circle":
        raise MalformedJson("circle must be a standalone loop", at=where)
    raise UnknownCurveType(f"unknown curve type {kind!r}", at=where)


def _loop(obj: Any, where: str) -> Loop:
    if not isinstance(obj, dict):
        raise MalformedJson("loop must be an object", at=where)
    if "circle" in obj:
        c = obj["circle"]
        return Loop((Circle(_num(c, "cx", where), _num(c, "cy", where), _num(c, "r", where)),))
    if "curves" in obj:
        curves = obj["curves"]
        if not isinstance(curves, list):
            raise MalformedJson("'curves' must be a list", at=where)
        return Loop(tuple(_curve(c, f"{where}.curves[{i}]") for i, c in enumerate(curves)))
    keys = [k for k in obj if k not in ("circle", "curves")]
    if keys:
        raise UnknownCurveType(f"unknown loop entry {keys[0]!r}", at=where)
    raise MalformedJson("loop needs 'circle' or 'curves'", at=where)


def _extrude(e: Any, where: str) -> Extrude:
    if not isinstance(e, dict):
        raise MalformedJson("extrude must be an object", at=where)
    b = e.get("bool", "new")
    u = e.get("extent", "one")
    if b not in _BOOL_BY_NAME:
        raise MalformedJson(f"unknown boolean kind {b!r}", at=where)
    if u not in _EXTENT_BY_NAME:
        raise MalformedJson(f"unknown extent kind {u!r}", at=where)
    return Extrude(
        theta=_num(e, "theta", where), phi=_num(e, "phi", where), gamma=_num(e, "gamma", where),
        origin=(_num(e, "ox", where), _num(e, "oy", where), _num(e, "oz", where)),
        s=_num(e, "s", where), e_p=_num(e, "e_p", where),
        e_n=_num(e, "e_n", where) if "e_n" in e else 0.0,
        b=_BOOL_BY_NAME[b], u=_EXTENT_BY_NAME[u])


def sequence_from_dict(data: Any) -> CadSequence:
    if not isinstance(data, dict) or not isinstance(data.get("steps"), list):
        raise MalformedJson("top level must be an object with a 'steps' list")
    steps = []
    for i, s in enumerate(data["steps"]):
        where = f"steps[{i}]"
        if not isinstance(s, dict) or "profile" not in s:
            raise MalformedJson("step needs a 'profile'", at=where)
        if "extrude" not in s:
            raise SketchWithoutExtrusion("sketch is not followed by an extrusion", at=where)
        prof = s["profile"]
        if not isinstance(prof, dict) or not isinstance(prof.get("loops"), list):
            raise MalformedJson("profile must carry a 'loops' list", at=where)
        loops = tuple(_loop(lp, f"{where}.loops[{j}]") for j, lp in enumerate(prof["loops"]))
        steps.append(Step(Profile(loops), _extrude(s["extrude"], f"{where}.extrude")))
    return CadSequence(tuple(steps))


def coerce_first_join(seq: CadSequence) -> CadSequence:
    """A Join onto the empty scene is read as NewBody (with a warning)."""
    if seq.steps and seq.steps[0].extrude.b == BoolKind.JOIN:
        warnings.warn("first extrusion uses 'join' on an empty scene; treating it as 'new'",
                      stacklevel=3)
        first = seq.steps[0]
        e = first.extrude
        fixed = Extrude(e.theta, e.phi, e.gamma, e.origin, e.s, e.e_p, e.e_n, BoolKind.NEW, e.u)
        return CadSequence((Step(first.profile, fixed),) + seq.steps[1:])
    return seq


def parse_sequence(text: str, validate: bool = True) -> CadSequence:
    """Parse sequence-JSON text.

    With ``validate`` (the default) the result is checked with
    :func:`validate_sequence`; range problems raise :class:`ValueOutOfRange`,
    any other violation raises :class:`InvalidSequence`. Both carry
    ``.violations``.
    """
    try:
        data = json.loads(text)
    except (json.JSONDecodeError, TypeError) as exc:
        raise MalformedJson(str(exc)) from None
    seq = coerce_first_join(sequence_from_dict(data))
    if validate:
        from .validate import validate_sequence
        violations = validate_sequence(seq)
        if violations:
            if all(v.kind == "ValueOutOfRange" for v in violations):
                err = ValueOutOfRange("; ".join(str(v) for v in violations))
                err.violations = violations
                raise err
            raise InvalidSequence(violations)
    return seq


def canonical(text: str) -> str:
    """Canonical form of sequence-JSON text without validating it."""
    return serialize_sequence(coerce_first_join(sequence_from_dict(json.loads(text))))
