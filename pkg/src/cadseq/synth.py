"""Random and templated command sequences for fuzzing, fixtures and experiments.

Everything is driven by a ``numpy.random.Generator`` so runs are reproducible.
"""
from __future__ import annotations

import math
from typing import List, Optional, Sequence

import numpy as np

from .cmdseq.model import (Arc, BoolKind, CadSequence, Circle, ExtentKind, Extrude, Line, Loop,
                           Profile, Step)
from .errors import GeometryError
from .sketch2d import assemble_profile


def _r(x: float) -> float:
    # keep values representable in 9 significant digits so JSON round trips exactly
    return float(f"{x:.6g}")


def fan_polygon(rng: np.random.Generator, n: int, r_lo: float = 0.25, r_hi: float = 0.85,
                span: float = math.pi / 2) -> List[np.ndarray]:
    """Vertices of a polygon that is star-shaped from the origin, which is its first corner."""
    a0 = rng.uniform(-math.pi, math.pi)
    ang = np.sort(rng.uniform(0.05, span - 0.05, size=n))
    ang = np.maximum.accumulate(ang + np.arange(n) * 1e-3)
    rad = rng.uniform(r_lo, r_hi, size=n)
    return [np.array([rad[i] * math.cos(a0 + ang[i]), rad[i] * math.sin(a0 + ang[i])])
            for i in range(n)]


def polygon_loop(pts: Sequence[np.ndarray], rng: Optional[np.random.Generator] = None,
                 p_arc: float = 0.0, max_alpha: float = math.pi / 2) -> Loop:
    """Closed loop origin -> pts -> origin; each edge becomes an outward arc with prob ``p_arc``."""
    ends = [tuple(map(_r, p)) for p in pts] + [(0.0, 0.0)]
    curves = []
    for x, y in ends:
        if rng is not None and rng.random() < p_arc:
            curves.append(Arc(x, y, _r(rng.uniform(0.2, max_alpha)), True))
        else:
            curves.append(Line(x, y))
    return Loop(tuple(curves))


def rect_loop(w: float, h: float) -> Loop:
    return Loop((Line(w, 0.0), Line(w, h), Line(0.0, h), Line(0.0, 0.0)))


def circle_loop(cx: float, cy: float, r: float) -> Loop:
    return Loop((Circle(_r(cx), _r(cy), _r(r)),))


def random_extrude(rng: np.random.Generator, b: BoolKind = BoolKind.NEW,
                   u: Optional[ExtentKind] = None, axis_aligned: bool = False,
                   origin_span: float = 0.4) -> Extrude:
    u = ExtentKind(int(rng.integers(3))) if u is None else u
    if axis_aligned:
        theta = phi = gamma = 0.0
    else:
        theta, phi, gamma = (_r(v) for v in rng.uniform(-math.pi, math.pi, 3))
    origin = tuple(_r(v) for v in rng.uniform(-origin_span, origin_span, 3))
    e_p = _r(rng.uniform(0.1, 0.8))
    e_n = _r(rng.uniform(0.1, 0.6)) if u == ExtentKind.TWO_SIDED else 0.0
    return Extrude(theta, phi, gamma, origin, _r(rng.uniform(0.3, 1.5)), e_p, e_n, b, u)


def random_profile(rng: np.random.Generator, p_arc: float = 0.3, p_circle: float = 0.25,
                   max_tries: int = 50) -> Profile:
    """A profile that assembles cleanly: a polygon (maybe with arcs and a circular hole) or circles."""
    for _ in range(max_tries):
        kind = rng.random()
        if kind < p_circle:
            c = rng.uniform(-0.4, 0.4, 2)
            r = rng.uniform(0.15, 0.5)
            loops = [circle_loop(c[0], c[1], r)]
            if rng.random() < 0.5:
                loops.append(circle_loop(c[0], c[1], r * rng.uniform(0.3, 0.7)))
            prof = Profile(tuple(loops))
        else:
            pts = fan_polygon(rng, int(rng.integers(2, 7)))
            loops = [polygon_loop(pts, rng, p_arc)]
            if rng.random() < 0.3:
                # hole near the centroid of the fan's widest triangle
                i = int(rng.integers(len(pts) - 1)) if len(pts) > 1 else 0
                tri = [np.zeros(2), pts[i], pts[min(i + 1, len(pts) - 1)]]
                cen = sum(tri) / 3.0
                loops.append(circle_loop(cen[0], cen[1], 0.05))
            prof = Profile(tuple(loops))
        try:
            for n_arc in (16, 32, 64):
                assemble_profile(prof, n_arc)
        except GeometryError:
            continue
        return prof
    return Profile((rect_loop(0.5, 0.5),))


def random_sequence(rng: np.random.Generator, n_steps: Optional[int] = None,
                    axis_aligned: bool = False) -> CadSequence:
    """Syntactically valid multi-step sequence; it need not produce a non-empty solid."""
    n_steps = int(rng.integers(1, 5)) if n_steps is None else n_steps
    steps = []
    for i in range(n_steps):
        b = BoolKind.NEW if i == 0 else BoolKind(int(rng.integers(4)))
        steps.append(Step(random_profile(rng), random_extrude(rng, b, axis_aligned=axis_aligned)))
    return CadSequence(tuple(steps))


def box_step(lo: Sequence[float], hi: Sequence[float], b: BoolKind = BoolKind.NEW) -> Step:
    """Axis-aligned box from corner ``lo`` to ``hi`` as one sketch and extrusion."""
    lo, hi = np.asarray(lo, float), np.asarray(hi, float)
    size = hi - lo
    s = float(max(size[0], size[1]))
    prof = Profile((rect_loop(size[0] / s, size[1] / s),))
    ext = Extrude(0.0, 0.0, 0.0, tuple(float(v) for v in lo), s, float(size[2]), 0.0, b,
                  ExtentKind.ONE_SIDED)
    return Step(prof, ext)


def stacked_sequence(rng: np.random.Generator, n_steps: int = 7) -> CadSequence:
    """A tower of joined blocks; every step changes the solid, handy for prefix checks."""
    steps = []
    z = 0.0
    for i in range(n_steps):
        # every footprint contains [-0.2, -0.05]^2, and each block dips into the one below
        w, d = (round(float(v), 3) for v in rng.uniform(0.25, 0.6, 2))
        x, y = (round(float(v), 3) for v in rng.uniform(-0.3, -0.2, 2))
        h = round(float(rng.uniform(0.05, 0.15)), 3)
        base = max(0.0, round(z - 0.01, 3))
        b = BoolKind.NEW if i == 0 else BoolKind.JOIN
        steps.append(box_step((x, y, base), (x + w, y + d, z + h), b))
        z = round(z + h, 3)
    return CadSequence(tuple(steps))
