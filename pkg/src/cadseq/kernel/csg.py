"""Mesh booleans with BSP trees.

The tree logic follows the classic clip/invert formulation: to merge ``a``
and ``b``, clip each solid's polygons against the other's tree, then
recombine. Trees are walked with explicit stacks, so deep chains of
coplanar-free planes do not hit the recursion limit.

The polygon soup that comes out is turned back into an indexed mesh:
collinear vertices are dropped, convex polygons are fanned, vertices are
welded, and T-junctions left by splits on one side of an edge are removed by
splitting the neighbouring triangles.
"""
from __future__ import annotations

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..cmdseq.model import BoolKind
from ..errors import OpenInputMesh
from .mesh import WELD_TOL, TriMesh, compact, concat, signed_volume, surface_area, weld

log = logging.getLogger(__name__)

PLANE_EPS = 1e-9
LINE_TOL = 1e-9
MIN_VOLUME = 1e-12

COPLANAR, FRONT, BACK, SPANNING = 0, 1, 2, 3

Vec = Tuple[float, float, float]


def _sub(a: Vec, b: Vec) -> Vec:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def _cross(a: Vec, b: Vec) -> Vec:
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def _dot(a: Vec, b: Vec) -> float:
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]


class Plane:
    __slots__ = ("normal", "w")

    def __init__(self, normal: Vec, w: float):
        self.normal = normal
        self.w = w

    @classmethod
    def from_points(cls, a: Vec, b: Vec, c: Vec) -> Optional["Plane"]:
        n = _cross(_sub(b, a), _sub(c, a))
        length = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]) ** 0.5
        if length == 0.0:
            return None
        n = (n[0] / length, n[1] / length, n[2] / length)
        return cls(n, _dot(n, a))

    def flipped(self) -> "Plane":
        n = self.normal
        return Plane((-n[0], -n[1], -n[2]), -self.w)


class Polygon:
    __slots__ = ("vertices", "plane")

    def __init__(self, vertices: List[Vec], plane: Plane):
        self.vertices = vertices
        self.plane = plane

    def flipped(self) -> "Polygon":
        return Polygon(self.vertices[::-1], self.plane.flipped())


def split_polygon(plane: Plane, poly: Polygon, coplanar_front, coplanar_back, front, back):
    n, w = plane.normal, plane.w
    types = []
    ptype = 0
    for v in poly.vertices:
        t = _dot(n, v) - w
        kind = BACK if t < -PLANE_EPS else FRONT if t > PLANE_EPS else COPLANAR
        ptype |= kind
        types.append(kind)
    if ptype == COPLANAR:
        (coplanar_front if _dot(n, poly.plane.normal) > 0 else coplanar_back).append(poly)
    elif ptype == FRONT:
        front.append(poly)
    elif ptype == BACK:
        back.append(poly)
    else:
        f: List[Vec] = []
        b: List[Vec] = []
        verts = poly.vertices
        k = len(verts)
        for i in range(k):
            j = (i + 1) % k
            ti, tj = types[i], types[j]
            vi, vj = verts[i], verts[j]
            if ti != BACK:
                f.append(vi)
            if ti != FRONT:
                b.append(vi)
            if (ti | tj) == SPANNING:
                d = _sub(vj, vi)
                t = (w - _dot(n, vi)) / _dot(n, d)
                p = (vi[0] + t * d[0], vi[1] + t * d[1], vi[2] + t * d[2])
                f.append(p)
                b.append(p)
        if len(f) >= 3:
            front.append(Polygon(f, poly.plane))
        if len(b) >= 3:
            back.append(Polygon(b, poly.plane))


class Node:
    __slots__ = ("plane", "front", "back", "polygons")

    def __init__(self, polygons: Optional[List[Polygon]] = None):
        self.plane: Optional[Plane] = None
        self.front: Optional[Node] = None
        self.back: Optional[Node] = None
        self.polygons: List[Polygon] = []
        if polygons:
            self.build(polygons)

    def nodes(self):
        stack = [self]
        while stack:
            node = stack.pop()
            yield node
            if node.front is not None:
                stack.append(node.front)
            if node.back is not None:
                stack.append(node.back)

    def invert(self) -> None:
        for node in self.nodes():
            node.polygons = [p.flipped() for p in node.polygons]
            if node.plane is not None:
                node.plane = node.plane.flipped()
            node.front, node.back = node.back, node.front

    def clip_polygons(self, polygons: List[Polygon]) -> List[Polygon]:
        """Remove the parts of ``polygons`` that lie inside this solid."""
        out: List[Polygon] = []
        stack = [(self, polygons)]
        while stack:
            node, polys = stack.pop()
            if node.plane is None:
                out.extend(polys)
                continue
            front: List[Polygon] = []
            back: List[Polygon] = []
            for p in polys:
                split_polygon(node.plane, p, front, back, front, back)
            if node.front is not None:
                stack.append((node.front, front))
            else:
                out.extend(front)
            if node.back is not None:
                stack.append((node.back, back))
        return out

    def clip_to(self, other: "Node") -> None:
        for node in self.nodes():
            node.polygons = other.clip_polygons(node.polygons)

    def all_polygons(self) -> List[Polygon]:
        out: List[Polygon] = []
        for node in self.nodes():
            out.extend(node.polygons)
        return out

    def build(self, polygons: List[Polygon]) -> None:
        stack = [(self, polygons)]
        while stack:
            node, polys = stack.pop()
            if not polys:
                continue
            if node.plane is None:
                node.plane = polys[0].plane
            front: List[Polygon] = []
            back: List[Polygon] = []
            for p in polys:
                split_polygon(node.plane, p, node.polygons, node.polygons, front, back)
            if front:
                if node.front is None:
                    node.front = Node()
                stack.append((node.front, front))
            if back:
                if node.back is None:
                    node.back = Node()
                stack.append((node.back, back))


# ---------------------------------------------------------------------------
# mesh <-> polygons

def mesh_to_polygons(m: TriMesh) -> List[Polygon]:
    out = []
    verts = [tuple(v) for v in m.vertices.tolist()]
    for a, b, c in m.faces.tolist():
        pl = Plane.from_points(verts[a], verts[b], verts[c])
        if pl is not None:
            out.append(Polygon([verts[a], verts[b], verts[c]], pl))
    return out


def _drop_collinear_3d(vs: List[Vec]) -> List[Vec]:
    changed = True
    while changed and len(vs) >= 3:
        changed = False
        k = len(vs)
        for i in range(k):
            a, b, c = vs[i - 1], vs[i], vs[(i + 1) % k]
            ab, bc = _sub(b, a), _sub(c, b)
            lab = _dot(ab, ab) ** 0.5
            if lab <= WELD_TOL:
                del vs[i]
                changed = True
                break
            cr = _cross(ab, bc)
            # b is within LINE_TOL of the line through a and c
            lac = _dot(_sub(c, a), _sub(c, a)) ** 0.5
            if lac > 0 and _dot(cr, cr) ** 0.5 <= LINE_TOL * lac and _dot(ab, bc) > 0:
                del vs[i]
                changed = True
                break
    return vs


def polygons_to_soup(polys: List[Polygon]) -> Tuple[np.ndarray, np.ndarray]:
    verts: List[Vec] = []
    faces: List[Tuple[int, int, int]] = []
    for p in polys:
        vs = _drop_collinear_3d(list(p.vertices))
        if len(vs) < 3:
            continue
        base = len(verts)
        verts.extend(vs)
        for k in range(1, len(vs) - 1):
            faces.append((base, base + k, base + k + 1))
    return np.array(verts, float).reshape(-1, 3), np.array(faces, np.int64).reshape(-1, 3)


def _drop_slivers(m: TriMesh, tol: float = LINE_TOL) -> TriMesh:
    """Drop triangles whose height over their longest edge is below ``tol``."""
    if m.is_empty():
        return m
    t = m.triangles()
    edges = np.stack([t[:, 1] - t[:, 0], t[:, 2] - t[:, 1], t[:, 0] - t[:, 2]], axis=1)
    longest = np.linalg.norm(edges, axis=2).max(axis=1)
    twice_area = np.linalg.norm(np.cross(edges[:, 0], -edges[:, 2]), axis=1)
    keep = twice_area > tol * longest
    if keep.all():
        return m
    return compact(m.vertices, m.faces[keep])


def repair_t_junctions(m: TriMesh, tol: float = LINE_TOL, max_rounds: int = 32) -> TriMesh:
    """Split triangles whose edges pass through other mesh vertices."""
    verts = m.vertices
    faces = m.faces.copy()
    for _ in range(max_rounds):
        if len(faces) == 0:
            break
        directed = np.concatenate([faces[:, [0, 1]], faces[:, [1, 2]], faces[:, [2, 0]]])
        und = np.sort(directed, axis=1)
        uniq, inv, counts = np.unique(und, axis=0, return_inverse=True, return_counts=True)
        inv = inv.reshape(-1)
        lonely = np.flatnonzero(counts == 1)
        if lonely.size == 0:
            break
        cand_v = np.unique(uniq[lonely])
        P = verts[cand_v]
        splits = {}
        for e in lonely:
            a, b = uniq[e]
            A, B = verts[a], verts[b]
            d = B - A
            L2 = float(d @ d)
            if L2 == 0.0:
                continue
            lo = np.minimum(A, B) - tol
            hi = np.maximum(A, B) + tol
            near = np.all((P >= lo) & (P <= hi), axis=1)
            if not near.any():
                continue
            idx = cand_v[near]
            Q = verts[idx]
            t = (Q - A) @ d / L2
            dist = np.linalg.norm(Q - A - t[:, None] * d, axis=1)
            L = L2 ** 0.5
            on = (dist <= tol) & (t * L > tol) & ((1 - t) * L > tol) & (idx != a) & (idx != b)
            if on.any():
                order = np.argsort(t[on], kind="stable")
                splits[(int(a), int(b))] = idx[on][order].tolist()
        if not splits:
            break
        new_faces = []
        for f in faces.tolist():
            done = False
            for k in range(3):
                i, j, o = f[k], f[(k + 1) % 3], f[(k + 2) % 3]
                if (i, j) in splits:
                    chain = [i] + splits[(i, j)] + [j]
                elif (j, i) in splits:
                    chain = [i] + splits[(j, i)][::-1] + [j]
                else:
                    continue
                for p, q in zip(chain[:-1], chain[1:]):
                    new_faces.append([p, q, o])
                done = True
                break
            if not done:
                new_faces.append(f)
        faces = np.array(new_faces, np.int64)
    return compact(verts, faces)


def soup_to_mesh(verts: np.ndarray, faces: np.ndarray) -> TriMesh:
    m = weld(TriMesh(verts, faces), WELD_TOL) if len(faces) else TriMesh.empty()
    m = _drop_slivers(m)
    m = repair_t_junctions(m)
    m = _drop_slivers(m)
    if abs(signed_volume(m)) < MIN_VOLUME:
        return TriMesh.empty()
    return m


# ---------------------------------------------------------------------------
# booleans

def _disjoint(a: TriMesh, b: TriMesh) -> bool:
    alo, ahi = a.vertices.min(axis=0), a.vertices.max(axis=0)
    blo, bhi = b.vertices.min(axis=0), b.vertices.max(axis=0)
    return bool(np.any(ahi < blo - PLANE_EPS) or np.any(bhi < alo - PLANE_EPS))


def _check_closed(m: TriMesh, name: str) -> None:
    from ..metrics.topology import flux_enclosure_error
    if m.is_empty():
        return
    area = surface_area(m)
    if flux_enclosure_error(m) > 1e-9 * max(area, 1.0):
        raise OpenInputMesh(f"operand {name} is not a closed surface")


def csg_polygons(a: TriMesh, b: TriMesh, op: BoolKind) -> List[Polygon]:
    A = Node(mesh_to_polygons(a))
    B = Node(mesh_to_polygons(b))
    if op == BoolKind.JOIN:
        A.clip_to(B)
        B.clip_to(A)
        B.invert()
        B.clip_to(A)
        B.invert()
        A.build(B.all_polygons())
    elif op == BoolKind.CUT:
        A.invert()
        A.clip_to(B)
        B.clip_to(A)
        B.invert()
        B.clip_to(A)
        B.invert()
        A.build(B.all_polygons())
        A.invert()
    elif op == BoolKind.INTERSECT:
        A.invert()
        B.clip_to(A)
        B.invert()
        A.clip_to(B)
        B.clip_to(A)
        A.build(B.all_polygons())
        A.invert()
    else:
        raise ValueError(f"unsupported boolean {op!r}")
    return A.all_polygons()


def boolean_op(a: TriMesh, b: TriMesh, op) -> TriMesh:
    """Union (join), intersection or difference (cut, ``a - b``) of two solids.

    Both operands must be closed and outward oriented. An empty result is
    returned as a mesh with no faces.
    """
    op = BoolKind(op)
    if op == BoolKind.NEW:
        op = BoolKind.JOIN
    _check_closed(a, "a")
    _check_closed(b, "b")
    if a.is_empty() or b.is_empty():
        if op == BoolKind.JOIN:
            return b if a.is_empty() else a
        if op == BoolKind.CUT:
            return a
        return TriMesh.empty()
    if _disjoint(a, b):
        if op == BoolKind.JOIN:
            return concat([a, b])
        if op == BoolKind.CUT:
            return a
        return TriMesh.empty()
    verts, faces = polygons_to_soup(csg_polygons(a, b, op))
    out = soup_to_mesh(verts, faces)
    if not out.is_empty():
        from ..metrics.topology import dangling_edge_length  # avoids an import cycle
        dl = dangling_edge_length(out)
        if dl > 0:
            log.warning("boolean %s left %.3g of dangling edge length", op.name, dl)
    return out
