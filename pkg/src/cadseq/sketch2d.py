"""Sketch profiles as discretized polygons with holes, and their triangulation."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .cmdseq.model import Arc, Circle, CurveCommand, Line, Loop, Profile
from .cmdseq.validate import EPS_CLOSE
from .errors import CrossingLoops, DegenerateArc, DegenerateRegion, MultipleOuterLoops, OpenLoop

log = logging.getLogger(__name__)

N_ARC = 64
_EPS_POINT = 1e-12


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Polyline2:
    points: np.ndarray
    closed: bool = False

    def __post_init__(self):
        object.__setattr__(self, "points", _frozen(self.points).reshape(-1, 2))

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        return (isinstance(other, Polyline2) and self.closed == other.closed
                and np.array_equal(self.points, other.points))

    def length(self) -> float:
        pts = self.points
        if self.closed:
            pts = np.vstack([pts, pts[:1]])
        return float(np.linalg.norm(np.diff(pts, axis=0), axis=1).sum())


@dataclass(frozen=True, eq=False)
class PolygonWithHoles:
    outer: np.ndarray
    holes: Tuple[np.ndarray, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "outer", _frozen(self.outer).reshape(-1, 2))
        object.__setattr__(self, "holes", tuple(_frozen(h).reshape(-1, 2) for h in self.holes))

    @property
    def rings(self) -> Tuple[np.ndarray, ...]:
        return (self.outer,) + self.holes

    def area(self) -> float:
        return sum(signed_area(r) for r in self.rings)


def signed_area(ring: np.ndarray) -> float:
    """Shoelace area; positive for counter-clockwise rings."""
    x, y = ring[:, 0], ring[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def _cross2(a, b):
    return a[..., 0] * b[..., 1] - a[..., 1] * b[..., 0]


# ---------------------------------------------------------------------------
# curves

def chain_loop(loop: Loop, eps_close: float = EPS_CLOSE) -> List[Tuple[CurveCommand, Tuple[float, float]]]:
    """Pair each curve of a loop with its start point.

    The first curve starts at the plane origin, every later one at its
    predecessor's endpoint, and the last endpoint must return to the origin.
    A circle loop yields a single ``(circle, center)`` entry.
    """
    if loop.is_circle:
        c = loop.curves[0]
        return [(c, (c.x, c.y))]
    out = []
    start = (0.0, 0.0)
    for c in loop.curves:
        if isinstance(c, Circle):
            raise OpenLoop("circle inside a curve chain")
        out.append((c, start))
        start = (c.x, c.y)
    miss = math.hypot(*start)
    if not out or miss > eps_close:
        raise OpenLoop(f"loop ends {miss:.3g} away from its start")
    return out


def arc_center(start, end, alpha: float, ccw: bool) -> Tuple[np.ndarray, float]:
    """Center and radius of the arc from ``start`` to ``end`` sweeping ``alpha``."""
    s = np.asarray(start, float)
    e = np.asarray(end, float)
    d = e - s
    chord = float(np.hypot(*d))
    if alpha <= 1e-9 or alpha >= 2 * math.pi or chord <= 1e-12:
        raise DegenerateArc(f"sweep {alpha}, chord {chord}")
    r = chord / (2.0 * math.sin(alpha / 2.0))
    h = r * math.cos(alpha / 2.0)
    left = np.array([-d[1], d[0]]) / chord
    center = (s + e) / 2.0 + (h if ccw else -h) * left
    return center, r


def discretize_curve(curve: CurveCommand, start, n_arc: int = N_ARC) -> Polyline2:
    if isinstance(curve, Line):
        return Polyline2([start, (curve.x, curve.y)])
    if isinstance(curve, Circle):
        t = 2 * math.pi * np.arange(n_arc) / n_arc
        pts = np.column_stack([curve.x + curve.r * np.cos(t), curve.y + curve.r * np.sin(t)])
        return Polyline2(pts, closed=True)
    if isinstance(curve, Arc):
        center, r = arc_center(start, (curve.x, curve.y), curve.alpha, curve.ccw)
        m = max(1, math.ceil(n_arc * curve.alpha / (2 * math.pi)))
        a0 = math.atan2(start[1] - center[1], start[0] - center[0])
        sign = 1.0 if curve.ccw else -1.0
        t = a0 + sign * curve.alpha * np.arange(1, m) / m
        mid = np.column_stack([center[0] + r * np.cos(t), center[1] + r * np.sin(t)])
        pts = np.vstack([[start], mid, [(curve.x, curve.y)]])
        return Polyline2(pts)
    raise TypeError(f"not a curve command: {curve!r}")


def loop_ring(loop: Loop, n_arc: int = N_ARC, eps_close: float = EPS_CLOSE) -> np.ndarray:
    """Closed ring of a loop, without the repeated closing point."""
    chain = chain_loop(loop, eps_close)
    if loop.is_circle:
        return discretize_curve(chain[0][0], chain[0][1], n_arc).points.copy()
    pieces = []
    for curve, start in chain:
        pts = discretize_curve(curve, start, n_arc).points
        pieces.append(pts if not pieces else pts[1:])
    ring = np.vstack(pieces)[:-1]
    keep = np.linalg.norm(ring - np.roll(ring, 1, axis=0), axis=1) > _EPS_POINT
    return ring[keep]


# ---------------------------------------------------------------------------
# profile assembly

def _segments(ring: np.ndarray) -> np.ndarray:
    return np.stack([ring, np.roll(ring, -1, axis=0)], axis=1)


def segments_intersect(a: np.ndarray, b: np.ndarray, eps: float = 1e-12) -> np.ndarray:
    """Pairwise closed-segment intersection test, (n,2,2) x (m,2,2) -> (n,m) bool."""
    p, r = a[:, None, 0], (a[:, 1] - a[:, 0])[:, None]
    q, s = b[None, :, 0], (b[:, 1] - b[:, 0])[None]
    b0, b1 = b[None, :, 0], b[None, :, 1]
    a0, a1 = a[:, None, 0], a[:, None, 1]
    o1 = _cross2(r, b0 - p)
    o2 = _cross2(r, b1 - p)
    o3 = _cross2(s, a0 - q)
    o4 = _cross2(s, a1 - q)
    proper = (((o1 > eps) & (o2 < -eps)) | ((o1 < -eps) & (o2 > eps))) & \
             (((o3 > eps) & (o4 < -eps)) | ((o3 < -eps) & (o4 > eps)))

    def on_seg(o, pt, s0, s1):
        lo = np.minimum(s0, s1) - eps
        hi = np.maximum(s0, s1) + eps
        return (np.abs(o) <= eps) & np.all((pt >= lo) & (pt <= hi), axis=-1)

    touch = on_seg(o1, b0, a0, a1) | on_seg(o2, b1, a0, a1) | \
        on_seg(o3, a0, b0, b1) | on_seg(o4, a1, b0, b1)
    return proper | touch


def point_in_ring(pt, ring: np.ndarray) -> bool:
    x, y = pt
    a = ring
    b = np.roll(ring, -1, axis=0)
    cond = (a[:, 1] > y) != (b[:, 1] > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = a[:, 0] + (y - a[:, 1]) * (b[:, 0] - a[:, 0]) / (b[:, 1] - a[:, 1])
    return bool(np.count_nonzero(cond & (x < xi)) % 2)


def ring_is_simple(ring: np.ndarray) -> bool:
    n = len(ring)
    if n < 3:
        return False
    seg = _segments(ring)
    hit = segments_intersect(seg, seg)
    i, j = np.triu_indices(n, k=2)
    adjacent_wrap = (i == 0) & (j == n - 1)
    return not np.any(hit[i, j] & ~adjacent_wrap)


def assemble_profile(profile: Profile, n_arc: int = N_ARC,
                     allow_multiple: bool = True) -> List[PolygonWithHoles]:
    """Discretize a profile and sort its loops into outer boundaries and holes.

    Nesting depth decides the role of each loop: even depth bounds material,
    odd depth is a hole of its innermost container. Disjoint outer loops give
    several polygons unless ``allow_multiple`` is false.
    """
    rings = [loop_ring(lp, n_arc) for lp in profile.loops]
    if not rings:
        raise DegenerateRegion("profile has no loops")
    for k, r in enumerate(rings):
        if len(r) < 3 or abs(signed_area(r)) < 1e-12:
            raise DegenerateRegion(f"loop {k} encloses no area")
        if not ring_is_simple(r):
            raise CrossingLoops(f"loop {k} intersects itself")
    segs = [_segments(r) for r in rings]
    n = len(rings)
    for i in range(n):
        for j in range(i + 1, n):
            if np.any(segments_intersect(segs[i], segs[j])):
                raise CrossingLoops(f"loops {i} and {j} touch or cross")
    inside = np.zeros((n, n), bool)  # inside[i, j]: ring i lies inside ring j
    for i in range(n):
        for j in range(n):
            if i != j:
                inside[i, j] = point_in_ring(rings[i][0], rings[j])
    depth = inside.sum(axis=1)
    areas = [abs(signed_area(r)) for r in rings]

    def oriented(r, ccw):
        return r if (signed_area(r) > 0) == ccw else r[::-1].copy()

    outers = [i for i in range(n) if depth[i] % 2 == 0]
    if len(outers) > 1 and not allow_multiple:
        raise MultipleOuterLoops(f"{len(outers)} loops are not contained in any other")
    polys = []
    for o in outers:
        holes = []
        for h in range(n):
            if depth[h] != depth[o] + 1 or not inside[h, o]:
                continue
            parent = min((j for j in range(n) if inside[h, j]), key=lambda j: areas[j])
            if parent == o:
                holes.append(oriented(rings[h], False))
        polys.append(PolygonWithHoles(oriented(rings[o], True), tuple(holes)))
    return polys


def drop_collinear(ring: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Remove vertices where the boundary continues straight on."""
    ring = np.asarray(ring, float)
    changed = True
    while changed and len(ring) > 3:
        prev = np.roll(ring, 1, axis=0)
        nxt = np.roll(ring, -1, axis=0)
        d0, d1 = ring - prev, nxt - ring
        cr = _cross2(d0, d1)
        scale = np.linalg.norm(d0, axis=1) * np.linalg.norm(d1, axis=1)
        straight = (np.abs(cr) <= tol * np.maximum(scale, 1e-300)) & (np.einsum("ij,ij->i", d0, d1) > 0)
        changed = bool(straight.any())
        if changed:
            # drop every other flagged vertex so neighbours are re-evaluated
            idx = np.flatnonzero(straight)
            keep = np.ones(len(ring), bool)
            keep[idx[::2]] = False
            ring = ring[keep]
    return ring


# ---------------------------------------------------------------------------
# triangulation

def _in_wedge(prev, cur, nxt, p) -> bool:
    """Is ``p`` inside the interior angle at ``cur`` of a CCW polygon?"""
    left_in = _cross2(cur - prev, p - prev) >= 0
    left_out = _cross2(nxt - cur, p - cur) >= 0
    if _cross2(cur - prev, nxt - cur) >= 0:
        return bool(left_in and left_out)
    return bool(left_in or left_out)


def _bridge_target(pts: np.ndarray, poly: List[int], m_idx: int) -> int:
    """Position in ``poly`` of a vertex mutually visible with hole vertex ``m_idx``."""
    M = pts[m_idx]
    P = pts[poly]
    A, B = P, np.roll(P, -1, axis=0)
    spans = (np.minimum(A[:, 1], B[:, 1]) <= M[1]) & (np.maximum(A[:, 1], B[:, 1]) >= M[1]) \
        & (A[:, 1] != B[:, 1])
    with np.errstate(divide="ignore", invalid="ignore"):
        xi = A[:, 0] + (M[1] - A[:, 1]) * (B[:, 0] - A[:, 0]) / (B[:, 1] - A[:, 1])
    ok = spans & (xi >= M[0])
    if not np.any(ok):
        raise DegenerateRegion("hole is not enclosed by the outer boundary")
    xi = np.where(ok, xi, np.inf)
    e = int(np.argmin(xi))
    I = np.array([xi[e], M[1]])
    n = len(poly)
    a, b = e, (e + 1) % n
    if np.allclose(P[a], I, atol=1e-14, rtol=0):
        cand = a
    elif np.allclose(P[b], I, atol=1e-14, rtol=0):
        cand = b
    else:
        cand = a if P[a, 0] > P[b, 0] else b
        # vertices inside triangle (M, I, P[cand]) would block the bridge
        tri = np.array([M, I, P[cand]])
        if _cross2(tri[1] - tri[0], tri[2] - tri[0]) < 0:
            tri = tri[[0, 2, 1]]
        d = P - M
        c0 = _cross2(tri[1] - tri[0], P - tri[0])
        c1 = _cross2(tri[2] - tri[1], P - tri[1])
        c2 = _cross2(tri[0] - tri[2], P - tri[2])
        blocked = (c0 >= 0) & (c1 >= 0) & (c2 >= 0) & np.any(P != P[cand], axis=1) \
            & np.any(P != M, axis=1)
        if np.any(blocked):
            ang = np.abs(np.arctan2(d[:, 1], d[:, 0]))
            dist = np.hypot(d[:, 0], d[:, 1])
            order = np.lexsort((dist, ang))
            cand = int(next(k for k in order if blocked[k]))
    # among duplicates of the chosen position, use the copy whose wedge sees M
    same = [k for k in range(n) if poly[k] == poly[cand]]
    for k in same:
        if _in_wedge(P[k - 1], P[k], P[(k + 1) % n], M):
            return k
    return cand


def _bridge_holes(pts: np.ndarray, outer: List[int], holes: List[List[int]]) -> List[int]:
    poly = list(outer)
    order = sorted(range(len(holes)), key=lambda h: -pts[holes[h], 0].max())
    for h in order:
        hole = holes[h]
        hx = pts[hole]
        mi = int(np.lexsort((hx[:, 1], -hx[:, 0]))[0])
        k = _bridge_target(pts, poly, hole[mi])
        seq = hole[mi:] + hole[:mi] + [hole[mi]]
        poly = poly[: k + 1] + seq + [poly[k]] + poly[k + 1:]
    return poly


def _ear_clip(pts: np.ndarray, poly: List[int]) -> List[Tuple[int, int, int]]:
    idx = np.asarray(poly)
    n = len(idx)
    prv = np.roll(np.arange(n), 1)
    nxt = np.roll(np.arange(n), -1)
    alive = np.ones(n, bool)
    remaining = n
    tris: List[Tuple[int, int, int]] = []
    xy = pts[idx]
    span = float(np.ptp(xy, axis=0).max()) if n else 1.0
    eps = 1e-14 * span * span

    def convexity(c):
        a, b, d = xy[prv[c]], xy[c], xy[nxt[c]]
        return _cross2(b - a, d - b)

    def is_ear(c) -> bool:
        if convexity(c) <= eps:
            return False
        p, q = prv[c], nxt[c]
        a, b, d = xy[p], xy[c], xy[q]
        corners = (idx[p], idx[c], idx[q])
        cand = np.flatnonzero(alive)
        cand = cand[~np.isin(idx[cand], corners)]
        if cand.size == 0:
            return True
        X = xy[cand]
        c0 = _cross2(b - a, X - a)
        c1 = _cross2(d - b, X - b)
        c2 = _cross2(a - d, X - d)
        return not np.any((c0 >= -eps) & (c1 >= -eps) & (c2 >= -eps))

    def clip(c):
        nonlocal remaining
        p, q = prv[c], nxt[c]
        tris.append((int(idx[p]), int(idx[c]), int(idx[q])))
        nxt[p], prv[q] = q, p
        alive[c] = False
        remaining -= 1

    c = 0
    misses = 0
    while remaining > 3:
        if is_ear(c):
            nx = nxt[c]
            clip(c)
            c = prv[nx]
            misses = 0
            continue
        c = nxt[c]
        misses += 1
        if misses > remaining:
            live = np.flatnonzero(alive)
            conv = np.array([convexity(k) for k in live])
            best = live[int(np.argmax(conv))]
            log.warning("ear clipping found no clean ear; clipping the most convex vertex")
            nx = nxt[best]
            clip(best)
            c = prv[nx]
            misses = 0
    c = int(np.flatnonzero(alive)[0])
    if convexity(c) > eps:
        tris.append((int(idx[prv[c]]), int(idx[c]), int(idx[nxt[c]])))
    return tris


def triangulate_indices(poly: PolygonWithHoles) -> Tuple[np.ndarray, np.ndarray]:
    """Triangulate a polygon with holes.

    Returns the stacked ring points (outer first, then holes in order) and an
    ``(m, 3)`` array of CCW triangles indexing into them.
    """
    if abs(poly.area()) < 1e-12 or signed_area(poly.outer) <= 0:
        raise DegenerateRegion(f"region area {poly.area():.3g} is degenerate")
    pts = np.vstack(poly.rings)
    offsets = np.cumsum([0] + [len(r) for r in poly.rings])
    outer = list(range(offsets[0], offsets[1]))
    holes = [list(range(offsets[k], offsets[k + 1])) for k in range(1, len(poly.rings))]
    merged = _bridge_holes(pts, outer, holes) if holes else outer
    tris = np.array(_ear_clip(pts, merged), dtype=np.int64).reshape(-1, 3)
    return pts, tris


def triangulate(poly: PolygonWithHoles) -> np.ndarray:
    """CCW triangles covering the region, as an ``(m, 3, 2)`` coordinate array."""
    pts, tris = triangulate_indices(poly)
    return pts[tris]


def triangle_areas(tris: np.ndarray) -> np.ndarray:
    a, b, c = tris[:, 0], tris[:, 1], tris[:, 2]
    return 0.5 * _cross2(b - a, c - a)
