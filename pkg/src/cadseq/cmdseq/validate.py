"""Structural and range checks on a :class:`CadSequence`.

Violations are returned as data; nothing here raises.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List

from .model import Arc, BoolKind, CadSequence, Circle, Line
from .quantize import SLOT_RANGES

#: closure tolerance for raw (unquantized) input, plane units
EPS_CLOSE_RAW = 1e-9
#: closure tolerance after a quantization round trip
EPS_CLOSE = 1e-6
EPS_ARC = 1e-9


@dataclass(frozen=True)
class Violation:
    kind: str
    message: str
    where: str = ""

    def __str__(self):
        return f"{self.kind} at {self.where}: {self.message}" if self.where else \
            f"{self.kind}: {self.message}"


def _in_range(name: str, v: float) -> bool:
    lo, hi = SLOT_RANGES[name]
    slack = 1e-12 * (hi - lo)
    return lo - slack <= v <= hi + slack


def validate_sequence(seq: CadSequence, eps_close: float = EPS_CLOSE_RAW) -> List[Violation]:
    out: List[Violation] = []
    add = lambda kind, msg, where: out.append(Violation(kind, msg, where))  # noqa: E731

    if not seq.steps:
        add("EmptySequence", "sequence has no steps", "")
        return out

    for i, step in enumerate(seq.steps):
        sw = f"steps[{i}]"
        loops = step.profile.loops
        if not loops:
            add("EmptyProfile", "profile has no loops", sw)
        for j, loop in enumerate(loops):
            lw = f"{sw}.loops[{j}]"
            if not loop.curves:
                add("EmptyLoop", "loop has no curves", lw)
                continue
            if any(isinstance(c, Circle) for c in loop.curves) and not loop.is_circle:
                add("CircleInChain", "a circle must be the only curve of its loop", lw)
                continue
            if loop.is_circle:
                c = loop.curves[0]
                if not all(map(math.isfinite, (c.x, c.y, c.r))):
                    add("ValueOutOfRange", "non-finite circle", lw)
                    continue
                for name, v in (("x", c.x), ("y", c.y)):
                    if not _in_range(name, v):
                        add("ValueOutOfRange", f"circle center {name}={v}", lw)
                if c.r <= 0:
                    add("DegenerateCircle", f"radius {c.r} is not positive", lw)
                elif not _in_range("r", c.r):
                    add("ValueOutOfRange", f"radius {c.r}", lw)
                continue
            start = (0.0, 0.0)
            for k, c in enumerate(loop.curves):
                cw = f"{lw}.curves[{k}]"
                vals = (c.x, c.y) + ((c.alpha,) if isinstance(c, Arc) else ())
                if not all(map(math.isfinite, vals)):
                    add("ValueOutOfRange", "non-finite value", cw)
                    start = (c.x, c.y)
                    continue
                for name, v in (("x", c.x), ("y", c.y)):
                    if not _in_range(name, v):
                        add("ValueOutOfRange", f"endpoint {name}={v}", cw)
                chord = math.hypot(c.x - start[0], c.y - start[1])
                if isinstance(c, Arc):
                    if not (EPS_ARC < c.alpha < 2 * math.pi - EPS_ARC):
                        add("DegenerateArc", f"sweep {c.alpha} outside (0, 2pi)", cw)
                    elif chord <= EPS_ARC:
                        add("DegenerateArc", "arc start and end coincide", cw)
                elif isinstance(c, Line) and chord <= 1e-12:
                    add("ZeroLengthCurve", "line start and end coincide", cw)
                start = (c.x, c.y)
            miss = math.hypot(start[0], start[1])
            if miss > eps_close:
                add("OpenLoop", f"last endpoint misses the loop start by {miss:.3g}", lw)

        e = step.extrude
        ew = f"{sw}.extrude"
        scalars = dict(theta=e.theta, phi=e.phi, gamma=e.gamma, px=e.origin[0],
                       py=e.origin[1], pz=e.origin[2], s=e.s, e_p=e.e_p, e_n=e.e_n)
        if not all(map(math.isfinite, scalars.values())):
            add("ValueOutOfRange", "non-finite extrusion parameter", ew)
            continue
        if e.s <= 0:
            add("NonPositiveScale", f"scale {e.s} is not positive", ew)
        for name, v in scalars.items():
            if name == "s" and v <= 0:
                continue
            if not _in_range(name, v):
                add("ValueOutOfRange", f"{name}={v}", ew)
        z0, z1 = e.extent_interval()
        if not z1 > z0:
            add("EmptyExtent", f"extent interval [{z0}, {z1}] is empty", ew)
        if i == 0 and e.b != BoolKind.NEW:
            add("FirstStepNotNewBody", f"first extrusion uses {e.b.name.lower()}", ew)
    return out
