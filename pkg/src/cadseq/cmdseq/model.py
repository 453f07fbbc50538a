"""Structured form of a sketch-and-extrude command sequence.

A sequence is a list of steps; each step pairs one sketch profile with the
extrusion that turns it into a solid. All types are frozen dataclasses so a
parsed sequence can be shared freely between threads.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Tuple, Union


class BoolKind(enum.IntEnum):
    NEW = 0
    JOIN = 1
    INTERSECT = 2
    CUT = 3


class ExtentKind(enum.IntEnum):
    ONE_SIDED = 0
    SYMMETRIC = 1
    TWO_SIDED = 2


BOOL_NAMES = {BoolKind.NEW: "new", BoolKind.JOIN: "join",
              BoolKind.INTERSECT: "intersect", BoolKind.CUT: "cut"}
EXTENT_NAMES = {ExtentKind.ONE_SIDED: "one", ExtentKind.SYMMETRIC: "symmetric",
                ExtentKind.TWO_SIDED: "two"}


@dataclass(frozen=True)
class Line:
    """Straight segment ending at (x, y); the start is implied by chaining."""
    x: float
    y: float


@dataclass(frozen=True)
class Arc:
    """Circular arc ending at (x, y) with sweep ``alpha`` radians."""
    x: float
    y: float
    alpha: float
    ccw: bool = True


@dataclass(frozen=True)
class Circle:
    """Full circle; (x, y) is the center."""
    x: float
    y: float
    r: float


CurveCommand = Union[Line, Arc, Circle]


@dataclass(frozen=True)
class Loop:
    curves: Tuple[CurveCommand, ...]

    def __post_init__(self):
        object.__setattr__(self, "curves", tuple(self.curves))

    @property
    def is_circle(self) -> bool:
        return len(self.curves) == 1 and isinstance(self.curves[0], Circle)


@dataclass(frozen=True)
class Profile:
    loops: Tuple[Loop, ...]

    def __post_init__(self):
        object.__setattr__(self, "loops", tuple(self.loops))


@dataclass(frozen=True)
class Extrude:
    theta: float
    phi: float
    gamma: float
    origin: Tuple[float, float, float]
    s: float
    e_p: float
    e_n: float
    b: BoolKind = BoolKind.NEW
    u: ExtentKind = ExtentKind.ONE_SIDED

    def __post_init__(self):
        object.__setattr__(self, "origin", tuple(float(v) for v in self.origin))
        object.__setattr__(self, "b", BoolKind(self.b))
        object.__setattr__(self, "u", ExtentKind(self.u))

    def extent_interval(self) -> Tuple[float, float]:
        return resolve_extent(self.e_p, self.e_n, self.u)


@dataclass(frozen=True)
class Step:
    profile: Profile
    extrude: Extrude


@dataclass(frozen=True)
class CadSequence:
    steps: Tuple[Step, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))

    def __len__(self):
        return len(self.steps)

    def prefix(self, k: int) -> "CadSequence":
        return CadSequence(self.steps[:k])


def resolve_extent(e_p: float, e_n: float, u: ExtentKind) -> Tuple[float, float]:
    """Signed travel interval ``(z0, z1)`` along the sketch normal.

    One-sided goes ``[0, e_p]``, two-sided ``[-e_n, e_p]``; symmetric splits
    the total travel ``e_p`` evenly about the sketch plane.
    """
    u = ExtentKind(u)
    if u == ExtentKind.ONE_SIDED:
        return 0.0, float(e_p)
    if u == ExtentKind.SYMMETRIC:
        return -e_p / 2.0, e_p / 2.0
    return -float(e_n), float(e_p)


def curve_endpoint(curve: CurveCommand) -> Tuple[float, float]:
    return (curve.x, curve.y)


def is_finite(*values) -> bool:
    return all(math.isfinite(v) for v in values)
