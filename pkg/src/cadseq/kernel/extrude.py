from __future__ import annotations

from typing import Sequence

import numpy as np

from ..cmdseq.model import ExtentKind, resolve_extent
from ..errors import EmptyExtent
from ..sketch2d import PolygonWithHoles, drop_collinear, triangulate_indices
from .frame import PlaneFrame
from .mesh import TriMesh, concat


def _prism(poly: PolygonWithHoles, frame: PlaneFrame, z0: float, z1: float) -> TriMesh:
    rings = [drop_collinear(r) for r in poly.rings]
    clean = PolygonWithHoles(rings[0], tuple(rings[1:]))
    pts, tris = triangulate_indices(clean)
    n = len(pts)
    verts = np.vstack([frame.to_world(pts, z0), frame.to_world(pts, z1)])
    faces = [tris[:, ::-1], tris + n]
    off = 0
    for r in rings:
        k = len(r)
        i = off + np.arange(k)
        j = off + (np.arange(k) + 1) % k
        faces.append(np.column_stack([i, j, j + n]))
        faces.append(np.column_stack([i, j + n, i + n]))
        off += k
    return TriMesh(verts, np.vstack(faces))


def extrude_profile(polys: Sequence[PolygonWithHoles], frame: PlaneFrame, e_p: float,
                    e_n: float = 0.0, u: ExtentKind = ExtentKind.ONE_SIDED) -> TriMesh:
    """Closed, outward-oriented prism(s) swept from sketch polygons.

    Caps come from the triangulation (bottom reversed), walls are two
    triangles per boundary segment of every ring. Disjoint polygons give
    disjoint prisms in one mesh.
    """
    z0, z1 = resolve_extent(e_p, e_n, u)
    if not z1 > z0:
        raise EmptyExtent(f"extent interval [{z0}, {z1}] is empty")
    if isinstance(polys, PolygonWithHoles):
        polys = [polys]
    return concat(_prism(p, frame, z0, z1) for p in polys)
