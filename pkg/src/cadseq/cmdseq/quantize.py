"""256-level quantization of command sequences.

Every command becomes one row: a type plus 16 slots laid out as
``(x, y, alpha, f, r, theta, phi, gamma, px, py, pz, s, e_p, e_n, b, u)``.
Slots a command does not use hold ``PAD``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Dict, List, Tuple

import numpy as np

from ..errors import IllegalTokenAtPosition, MissingRequiredSlot, ValueOutOfRange
from .model import (Arc, BoolKind, CadSequence, Circle, ExtentKind, Extrude, Line,
                    Loop, Profile, Step)

N_LEVELS = 256
N_SLOTS = 16
PAD = 263

SLOT_NAMES = ("x", "y", "alpha", "f", "r", "theta", "phi", "gamma",
              "px", "py", "pz", "s", "e_p", "e_n", "b", "u")
SLOT = {name: i for i, name in enumerate(SLOT_NAMES)}

# continuous slot ranges; discrete slots (f, b, u) map to None
SLOT_RANGES: Dict[str, Tuple[float, float] | None] = {
    "x": (-1.0, 1.0), "y": (-1.0, 1.0),
    "alpha": (0.0, 2.0 * math.pi),
    "f": None,
    "r": (0.0, 1.0),
    "theta": (-math.pi, math.pi), "phi": (-math.pi, math.pi), "gamma": (-math.pi, math.pi),
    "px": (-1.0, 1.0), "py": (-1.0, 1.0), "pz": (-1.0, 1.0),
    "s": (0.0, 2.0), "e_p": (0.0, 2.0), "e_n": (0.0, 2.0),
    "b": None, "u": None,
}
DISCRETE_LEVELS = {"f": 2, "b": len(BoolKind), "u": len(ExtentKind)}


class RowType(enum.IntEnum):
    """Row/command types; the values double as token ids."""
    L = 256
    A = 257
    R = 258
    E = 259
    SOS = 260
    SOE = 261
    EOS = 262


ROW_SLOTS: Dict[RowType, Tuple[int, ...]] = {
    RowType.L: (SLOT["x"], SLOT["y"]),
    RowType.A: (SLOT["x"], SLOT["y"], SLOT["alpha"], SLOT["f"]),
    RowType.R: (SLOT["x"], SLOT["y"], SLOT["r"]),
    RowType.E: tuple(range(SLOT["theta"], N_SLOTS)),
    RowType.SOS: (),
    RowType.SOE: (),
    RowType.EOS: (),
}


@dataclass(frozen=True)
class CommandRow:
    type: RowType
    slots: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "type", RowType(self.type))
        object.__setattr__(self, "slots", tuple(int(v) for v in self.slots))
        if len(self.slots) != N_SLOTS:
            raise ValueError(f"row needs {N_SLOTS} slots, got {len(self.slots)}")

    @classmethod
    def make(cls, kind: RowType, **values: int) -> "CommandRow":
        slots = [PAD] * N_SLOTS
        for name, q in values.items():
            slots[SLOT[name]] = int(q)
        return cls(kind, tuple(slots))


@dataclass(frozen=True)
class VectorizedSequence:
    rows: Tuple[CommandRow, ...]

    def __post_init__(self):
        object.__setattr__(self, "rows", tuple(self.rows))

    def as_array(self):
        """(n, 17) integer array: type id followed by the 16 slots."""
        return np.array([[r.type, *r.slots] for r in self.rows], dtype=np.int64)


def round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def quantize_value(v: float, lo: float, hi: float, name: str = "value") -> int:
    span = hi - lo
    slack = 1e-12 * span
    if not math.isfinite(v) or v < lo - slack or v > hi + slack:
        raise ValueOutOfRange(f"{name}={v!r} outside [{lo}, {hi}]")
    v = min(max(v, lo), hi)
    return round_half_up((v - lo) / span * (N_LEVELS - 1))


def dequantize_value(q: int, lo: float, hi: float) -> float:
    return lo + q / (N_LEVELS - 1) * (hi - lo)


def quantize_slot(name: str, v) -> int:
    rng = SLOT_RANGES[name]
    if rng is None:
        q = int(v)
        if not 0 <= q < DISCRETE_LEVELS[name]:
            raise ValueOutOfRange(f"{name}={v!r} is not a valid level")
        return q
    return quantize_value(float(v), rng[0], rng[1], name)


def dequantize_slot(name: str, q: int) -> float:
    rng = SLOT_RANGES[name]
    if rng is None:
        return q
    return dequantize_value(q, rng[0], rng[1])


def slot_tolerance(name: str) -> float:
    """Worst-case round-trip error of a continuous slot (one full bin)."""
    lo, hi = SLOT_RANGES[name]
    return (hi - lo) / (N_LEVELS - 1)


# quantized plane origin; a loop closes when its running endpoint returns here
ORIGIN_LEVEL = quantize_value(0.0, -1.0, 1.0)


def _curve_row(c) -> CommandRow:
    if isinstance(c, Line):
        return CommandRow.make(RowType.L, x=quantize_slot("x", c.x), y=quantize_slot("y", c.y))
    if isinstance(c, Arc):
        return CommandRow.make(RowType.A, x=quantize_slot("x", c.x), y=quantize_slot("y", c.y),
                               alpha=quantize_slot("alpha", c.alpha), f=int(bool(c.ccw)))
    if isinstance(c, Circle):
        return CommandRow.make(RowType.R, x=quantize_slot("x", c.x), y=quantize_slot("y", c.y),
                               r=quantize_slot("r", c.r))
    raise TypeError(f"not a curve command: {c!r}")


def _extrude_row(e: Extrude) -> CommandRow:
    vals = dict(theta=e.theta, phi=e.phi, gamma=e.gamma,
                px=e.origin[0], py=e.origin[1], pz=e.origin[2],
                s=e.s, e_p=e.e_p, e_n=e.e_n, b=int(e.b), u=int(e.u))
    return CommandRow.make(RowType.E, **{k: quantize_slot(k, v) for k, v in vals.items()})


def quantize_sequence(seq: CadSequence) -> VectorizedSequence:
    rows: List[CommandRow] = []
    for step in seq.steps:
        rows.append(CommandRow.make(RowType.SOS))
        for loop in step.profile.loops:
            rows.extend(_curve_row(c) for c in loop.curves)
        rows.append(CommandRow.make(RowType.SOE))
        rows.append(_extrude_row(step.extrude))
    rows.append(CommandRow.make(RowType.EOS))
    return VectorizedSequence(tuple(rows))


def _required(row: CommandRow, i: int) -> Dict[str, int]:
    out = {}
    for idx in ROW_SLOTS[row.type]:
        q = row.slots[idx]
        name = SLOT_NAMES[idx]
        if q == PAD:
            raise MissingRequiredSlot(f"{row.type.name} row lacks slot {name!r}", row=i)
        if not 0 <= q < N_LEVELS:
            raise ValueOutOfRange(f"slot {name!r} holds {q}", row=i)
        if SLOT_RANGES[name] is None and q >= DISCRETE_LEVELS[name]:
            raise ValueOutOfRange(f"slot {name!r} holds {q}", row=i)
        out[name] = q
    return out


def dequantize_sequence(vseq: VectorizedSequence) -> CadSequence:
    """Rebuild a :class:`CadSequence`, re-segmenting loops by closure.

    Within a sketch, a line/arc whose quantized endpoint equals the quantized
    plane origin closes the current loop; its endpoint is restored to exactly
    (0, 0). Circles are always standalone loops.
    """
    rows = vseq.rows
    steps: List[Step] = []
    i = 0
    n = len(rows)

    def expect(kind: RowType):
        nonlocal i
        if i >= n or rows[i].type != kind:
            got = rows[i].type.name if i < n else "end"
            raise IllegalTokenAtPosition(f"expected {kind.name} row, got {got}", row=i)
        i += 1

    while i < n and rows[i].type != RowType.EOS:
        expect(RowType.SOS)
        loops: List[Loop] = []
        current: list = []
        while i < n and rows[i].type in (RowType.L, RowType.A, RowType.R):
            row = rows[i]
            q = _required(row, i)
            x, y = dequantize_slot("x", q["x"]), dequantize_slot("y", q["y"])
            if row.type == RowType.R:
                if current:
                    loops.append(Loop(tuple(current)))
                    current = []
                loops.append(Loop((Circle(x, y, dequantize_slot("r", q["r"])),)))
            else:
                closes = q["x"] == ORIGIN_LEVEL and q["y"] == ORIGIN_LEVEL
                if closes:
                    x = y = 0.0
                if row.type == RowType.L:
                    current.append(Line(x, y))
                else:
                    current.append(Arc(x, y, dequantize_slot("alpha", q["alpha"]), bool(q["f"])))
                if closes:
                    loops.append(Loop(tuple(current)))
                    current = []
            i += 1
        if current:
            loops.append(Loop(tuple(current)))
        expect(RowType.SOE)
        if i >= n or rows[i].type != RowType.E:
            raise IllegalTokenAtPosition("SOE must be followed by an E row", row=i)
        q = _required(rows[i], i)
        i += 1
        ext = Extrude(
            theta=dequantize_slot("theta", q["theta"]), phi=dequantize_slot("phi", q["phi"]),
            gamma=dequantize_slot("gamma", q["gamma"]),
            origin=(dequantize_slot("px", q["px"]), dequantize_slot("py", q["py"]),
                    dequantize_slot("pz", q["pz"])),
            s=dequantize_slot("s", q["s"]), e_p=dequantize_slot("e_p", q["e_p"]),
            e_n=dequantize_slot("e_n", q["e_n"]),
            b=BoolKind(q["b"]), u=ExtentKind(q["u"]))
        steps.append(Step(Profile(tuple(loops)), ext))
    if i >= n:
        raise IllegalTokenAtPosition("sequence has no EOS row", row=i)
    if i != n - 1:
        raise IllegalTokenAtPosition("rows after EOS", row=i + 1)
    return CadSequence(tuple(steps))
