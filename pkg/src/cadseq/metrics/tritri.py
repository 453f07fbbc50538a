"""Batched triangle-triangle intersection and a BVH for self-intersection queries.

Two triangles count as intersecting when they share a positive-length
segment (longer than ``eps``) or, if coplanar, a region of positive area.
Touching at a point is not an intersection.
"""
from __future__ import annotations

from typing import Iterator, List, Tuple

import numpy as np

EPS_INT = 1e-9
_LEAF = 8


def _unit(v: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    n = np.linalg.norm(v, axis=-1)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(n[..., None] > 0, v / n[..., None], 0.0)
    return u, n


def _signs(d: np.ndarray, eps: float) -> np.ndarray:
    return np.where(np.abs(d) <= eps, 0, np.sign(d)).astype(np.int8)


def _interval(T: np.ndarray, d: np.ndarray, s: np.ndarray, D: np.ndarray):
    """Extent along ``D`` of triangle ``T`` cut by the plane giving distances ``d``."""
    lo = np.full(len(T), np.inf)
    hi = np.full(len(T), -np.inf)
    for i in range(3):
        on = s[:, i] == 0
        t = np.einsum("ij,ij->i", T[:, i], D)
        lo = np.where(on, np.minimum(lo, t), lo)
        hi = np.where(on, np.maximum(hi, t), hi)
    for i, j in ((0, 1), (1, 2), (2, 0)):
        cross = (s[:, i] * s[:, j]) < 0
        with np.errstate(invalid="ignore", divide="ignore"):
            w = np.where(cross, d[:, i] / (d[:, i] - d[:, j]), 0.0)
        p = T[:, i] + w[:, None] * (T[:, j] - T[:, i])
        t = np.einsum("ij,ij->i", p, D)
        lo = np.where(cross, np.minimum(lo, t), lo)
        hi = np.where(cross, np.maximum(hi, t), hi)
    return lo, hi


def _coplanar_overlap(A: np.ndarray, B: np.ndarray, n: np.ndarray, eps: float) -> np.ndarray:
    """Positive-area overlap of coplanar triangles by separating axes."""
    if len(A) == 0:
        return np.zeros(0, bool)
    drop = np.argmax(np.abs(n), axis=1)
    keep = np.array([[1, 2], [0, 2], [0, 1]])[drop]
    rows = np.arange(len(A))[:, None, None]
    a2 = A[rows, np.arange(3)[None, :, None], keep[:, None, :]]
    b2 = B[rows, np.arange(3)[None, :, None], keep[:, None, :]]
    ok = np.ones(len(A), bool)
    for tri in (a2, b2):
        for i in range(3):
            e = tri[:, (i + 1) % 3] - tri[:, i]
            axis, length = _unit(np.column_stack([-e[:, 1], e[:, 0]]))
            pa = np.einsum("ikj,ij->ik", a2, axis)
            pb = np.einsum("ikj,ij->ik", b2, axis)
            overlap = np.minimum(pa.max(1), pb.max(1)) - np.maximum(pa.min(1), pb.min(1))
            ok &= (overlap > eps) | (length == 0)
    return ok


def tri_tri_intersect(A: np.ndarray, B: np.ndarray, eps: float = EPS_INT) -> np.ndarray:
    """Vectorized test on paired triangles ``A[k]``, ``B[k]`` of shape ``(k, 3, 3)``."""
    A = np.asarray(A, float).reshape(-1, 3, 3)
    B = np.asarray(B, float).reshape(-1, 3, 3)
    n1, l1 = _unit(np.cross(A[:, 1] - A[:, 0], A[:, 2] - A[:, 0]))
    n2, l2 = _unit(np.cross(B[:, 1] - B[:, 0], B[:, 2] - B[:, 0]))
    valid = (l1 > 0) & (l2 > 0)
    dB = np.einsum("ikj,ij->ik", B - A[:, :1], n1)
    dA = np.einsum("ikj,ij->ik", A - B[:, :1], n2)
    sB, sA = _signs(dB, eps), _signs(dA, eps)
    separated = (np.all(sB > 0, 1) | np.all(sB < 0, 1) | np.all(sA > 0, 1) | np.all(sA < 0, 1))
    D, lD = _unit(np.cross(n1, n2))
    coplanar = (np.all(sA == 0, 1) & np.all(sB == 0, 1)) | (lD < 1e-12)
    out = np.zeros(len(A), bool)
    gen = valid & ~separated & ~coplanar
    if gen.any():
        loA, hiA = _interval(A[gen], dA[gen], sA[gen], D[gen])
        loB, hiB = _interval(B[gen], dB[gen], sB[gen], D[gen])
        out[gen] = (np.minimum(hiA, hiB) - np.maximum(loA, loB)) > eps
    cop = valid & ~separated & coplanar
    if cop.any():
        out[cop] = _coplanar_overlap(A[cop], B[cop], n1[cop], eps)
    return out


# ---------------------------------------------------------------------------
# candidate pair generation

class BVH:
    """Axis-aligned bounding-volume hierarchy over triangle boxes."""

    def __init__(self, lo: np.ndarray, hi: np.ndarray, leaf_size: int = _LEAF):
        self.order = np.arange(len(lo))
        self.node_lo: List[np.ndarray] = []
        self.node_hi: List[np.ndarray] = []
        self.children: List[Tuple[int, int]] = []
        self.span: List[Tuple[int, int]] = []
        centers = (lo + hi) / 2.0
        stack = [(0, len(lo), -1, 0)]
        # iterative build; children are patched in after creation
        while stack:
            start, end, parent, side = stack.pop()
            idx = self.order[start:end]
            node = len(self.children)
            self.node_lo.append(lo[idx].min(axis=0))
            self.node_hi.append(hi[idx].max(axis=0))
            self.children.append((-1, -1))
            self.span.append((start, end))
            if parent >= 0:
                c = list(self.children[parent])
                c[side] = node
                self.children[parent] = tuple(c)
            if end - start <= leaf_size:
                continue
            c = centers[idx]
            axis = int(np.argmax(c.max(axis=0) - c.min(axis=0)))
            sorted_idx = idx[np.argsort(c[:, axis], kind="stable")]
            self.order[start:end] = sorted_idx
            mid = (start + end) // 2
            stack.append((mid, end, node, 1))
            stack.append((start, mid, node, 0))
        self.node_lo = np.array(self.node_lo)
        self.node_hi = np.array(self.node_hi)

    def _overlap(self, i: int, j: int) -> bool:
        return bool(np.all(self.node_lo[i] <= self.node_hi[j]) and
                    np.all(self.node_lo[j] <= self.node_hi[i]))

    def self_pairs(self) -> Iterator[Tuple[np.ndarray, np.ndarray]]:
        """Yield batches of face-index pairs whose leaf boxes overlap."""
        if not self.children:
            return
        stack = [(0, 0)]
        while stack:
            i, j = stack.pop()
            if i != j and not self._overlap(i, j):
                continue
            ci, cj = self.children[i], self.children[j]
            leaf_i, leaf_j = ci[0] < 0, cj[0] < 0
            if leaf_i and leaf_j:
                fi = self.order[slice(*self.span[i])]
                fj = self.order[slice(*self.span[j])]
                if i == j:
                    a, b = np.triu_indices(len(fi), k=1)
                    yield fi[a], fi[b]
                else:
                    a, b = np.meshgrid(fi, fj, indexing="ij")
                    yield a.ravel(), b.ravel()
            elif i == j:
                l, r = ci
                stack.extend([(l, l), (r, r), (l, r)])
            elif leaf_i or (not leaf_j and
                            self.span[j][1] - self.span[j][0] > self.span[i][1] - self.span[i][0]):
                stack.extend([(i, cj[0]), (i, cj[1])])
            else:
                stack.extend([(ci[0], j), (ci[1], j)])


def _share_vertex(faces: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    fa, fb = faces[a], faces[b]
    return np.any(fa[:, :, None] == fb[:, None, :], axis=(1, 2))


def _test_pairs(verts, faces, a, b, eps, hits: set, batch: int = 200_000) -> None:
    for k in range(0, len(a), batch):
        ia, ib = a[k:k + batch], b[k:k + batch]
        keep = ~_share_vertex(faces, ia, ib)
        ia, ib = ia[keep], ib[keep]
        if len(ia) == 0:
            continue
        hit = tri_tri_intersect(verts[faces[ia]], verts[faces[ib]], eps)
        hits.update(ia[hit].tolist())
        hits.update(ib[hit].tolist())


def intersecting_faces(vertices: np.ndarray, faces: np.ndarray, eps: float = EPS_INT,
                       brute_force: bool = False) -> np.ndarray:
    """Sorted indices of faces that intersect some face they share no vertex with."""
    vertices = np.asarray(vertices, float)
    faces = np.asarray(faces, np.int64).reshape(-1, 3)
    F = len(faces)
    hits: set = set()
    if F < 2:
        return np.zeros(0, np.int64)
    if brute_force:
        for start in range(0, F, 256):
            rows = np.arange(start, min(F, start + 256))
            a = np.repeat(rows, F)
            b = np.tile(np.arange(F), len(rows))
            m = b > a
            _test_pairs(vertices, faces, a[m], b[m], eps, hits)
    else:
        tri = vertices[faces]
        lo = tri.min(axis=1) - eps
        hi = tri.max(axis=1) + eps
        bvh = BVH(lo, hi)
        pa, pb = [], []
        for a, b in bvh.self_pairs():
            box = np.all(lo[a] <= hi[b], axis=1) & np.all(lo[b] <= hi[a], axis=1)
            pa.append(a[box])
            pb.append(b[box])
        if pa:
            _test_pairs(vertices, faces, np.concatenate(pa), np.concatenate(pb), eps, hits)
    return np.array(sorted(hits), np.int64)
