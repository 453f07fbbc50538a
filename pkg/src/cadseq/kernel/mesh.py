"""Indexed triangle meshes and the small utilities every other module needs."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy.spatial import cKDTree

from ..errors import EmptyMesh, InvalidFaceIndex

WELD_TOL = 1e-9


def _frozen(a, dtype) -> np.ndarray:
    a = np.array(a, dtype=dtype)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class TriMesh:
    """Vertices ``(n, 3)`` and CCW faces ``(m, 3)``; CCW seen from outside."""

    vertices: np.ndarray
    faces: np.ndarray

    def __post_init__(self):
        v = _frozen(self.vertices, np.float64).reshape(-1, 3)
        f = _frozen(self.faces, np.int64).reshape(-1, 3)
        if f.size and (f.min() < 0 or f.max() >= len(v)):
            raise InvalidFaceIndex(f"face index outside 0..{len(v) - 1}")
        if not np.all(np.isfinite(v)):
            raise ValueError("mesh has non-finite coordinates")
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "faces", f)

    @classmethod
    def empty(cls) -> "TriMesh":
        return cls(np.zeros((0, 3)), np.zeros((0, 3), np.int64))

    def __eq__(self, other):
        return (isinstance(other, TriMesh) and np.array_equal(self.vertices, other.vertices)
                and np.array_equal(self.faces, other.faces))

    def __repr__(self):
        return f"TriMesh(n_vertices={len(self.vertices)}, n_faces={len(self.faces)})"

    @property
    def n_faces(self) -> int:
        return len(self.faces)

    def is_empty(self) -> bool:
        return len(self.faces) == 0

    def triangles(self) -> np.ndarray:
        return self.vertices[self.faces]

    def face_cross(self) -> np.ndarray:
        t = self.triangles()
        return np.cross(t[:, 1] - t[:, 0], t[:, 2] - t[:, 0])

    def face_areas(self) -> np.ndarray:
        return 0.5 * np.linalg.norm(self.face_cross(), axis=1)

    def face_normals(self) -> np.ndarray:
        c = self.face_cross()
        n = np.linalg.norm(c, axis=1, keepdims=True)
        with np.errstate(invalid="ignore", divide="ignore"):
            return np.where(n > 0, c / n, 0.0)

    def flipped(self, which=None) -> "TriMesh":
        """Reverse the winding of all faces, or of the faces selected by ``which``."""
        f = self.faces.copy()
        sel = slice(None) if which is None else which
        f[sel] = f[sel][:, ::-1]
        return TriMesh(self.vertices, f)

    def transformed(self, scale: float = 1.0, offset=(0.0, 0.0, 0.0)) -> "TriMesh":
        return TriMesh(self.vertices * scale + np.asarray(offset, float), self.faces)


@dataclass(frozen=True)
class AABB:
    lo: tuple
    hi: tuple

    @property
    def extent(self) -> np.ndarray:
        return np.asarray(self.hi) - np.asarray(self.lo)

    @property
    def center(self) -> np.ndarray:
        return (np.asarray(self.hi) + np.asarray(self.lo)) / 2.0


def concat(meshes: Iterable[TriMesh]) -> TriMesh:
    meshes = [m for m in meshes if not m.is_empty()]
    if not meshes:
        return TriMesh.empty()
    verts, faces, off = [], [], 0
    for m in meshes:
        verts.append(m.vertices)
        faces.append(m.faces + off)
        off += len(m.vertices)
    return TriMesh(np.vstack(verts), np.vstack(faces))


def signed_volume(m: TriMesh) -> float:
    if m.is_empty():
        return 0.0
    t = m.triangles()
    return float(np.einsum("ij,ij->i", t[:, 0], np.cross(t[:, 1], t[:, 2])).sum() / 6.0)


def bounding_box(m: TriMesh) -> AABB:
    if m.is_empty():
        raise EmptyMesh("bounding box of an empty mesh")
    used = m.vertices[np.unique(m.faces)]
    return AABB(tuple(used.min(axis=0).tolist()), tuple(used.max(axis=0).tolist()))


def surface_area(m: TriMesh) -> float:
    return math.fsum(m.face_areas().tolist())


def _union_find_roots(n: int, pairs: np.ndarray) -> np.ndarray:
    parent = np.arange(n)

    def find(i):
        root = i
        while parent[root] != root:
            root = parent[root]
        while parent[i] != root:
            parent[i], i = root, parent[i]
        return root

    for a, b in pairs:
        ra, rb = find(a), find(b)
        if ra != rb:
            # smaller index wins so the result does not depend on pair order
            if ra < rb:
                parent[rb] = ra
            else:
                parent[ra] = rb
    return np.array([find(i) for i in range(n)], dtype=np.int64)


def compact(vertices: np.ndarray, faces: np.ndarray) -> TriMesh:
    """Drop unreferenced vertices and faces that repeat an index."""
    faces = np.asarray(faces, np.int64).reshape(-1, 3)
    ok = (faces[:, 0] != faces[:, 1]) & (faces[:, 1] != faces[:, 2]) & (faces[:, 0] != faces[:, 2])
    faces = faces[ok]
    if faces.size == 0:
        return TriMesh.empty()
    used, inv = np.unique(faces, return_inverse=True)
    return TriMesh(np.asarray(vertices)[used], inv.reshape(-1, 3))


def weld(m: TriMesh, tol: float = WELD_TOL) -> TriMesh:
    """Merge vertices closer than ``tol``; faces that collapse are removed."""
    if len(m.vertices) == 0:
        return m
    pairs = cKDTree(m.vertices).query_pairs(tol, output_type="ndarray")
    if len(pairs) == 0:
        return compact(m.vertices, m.faces)
    roots = _union_find_roots(len(m.vertices), pairs)
    return compact(m.vertices, roots[m.faces])


# ---------------------------------------------------------------------------
# OBJ

def write_obj(m: TriMesh, path) -> None:
    with open(path, "w") as fh:
        fh.write(format_obj(m))


def format_obj(m: TriMesh) -> str:
    lines = ["v " + " ".join(format(float(c), ".9g") for c in v) for v in m.vertices]
    lines += ["f " + " ".join(str(int(i) + 1) for i in f) for f in m.faces]
    return "\n".join(lines) + "\n"


def read_obj(path) -> TriMesh:
    with open(path) as fh:
        return parse_obj(fh.read())


def parse_obj(text: str) -> TriMesh:
    verts, faces = [], []
    for raw in text.splitlines():
        parts = raw.split()
        if not parts:
            continue
        if parts[0] == "v":
            verts.append([float(x) for x in parts[1:4]])
        elif parts[0] == "f":
            idx = []
            for tok in parts[1:]:
                i = int(tok.split("/")[0])
                idx.append(i - 1 if i > 0 else len(verts) + i)
            for k in range(1, len(idx) - 1):
                faces.append([idx[0], idx[k], idx[k + 1]])
    return TriMesh(np.array(verts, float).reshape(-1, 3), np.array(faces, np.int64).reshape(-1, 3))
