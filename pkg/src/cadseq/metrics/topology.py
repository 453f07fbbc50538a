"""Topology and enclosure metrics on triangle meshes.

* segment count / SegE: connected components of the vertex-edge graph,
  compared against ground truth;
* DangEL: total length of edges bounded by exactly one face;
* SIR: fraction of faces that cut through a face they share no vertex with;
* FluxEE: magnitude of the flux of the constant field (1, 1, 1) through the
  surface, zero for a closed, consistently wound mesh.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import EmptyGroundTruth, EmptyMesh, InvalidFaceIndex
from ..kernel.mesh import TriMesh
from .tritri import EPS_INT, intersecting_faces


@dataclass(frozen=True, eq=False)
class HalfEdgeIndex:
    """Half-edges ``(tail, head, face)`` plus undirected edge incidence counts."""

    half_edges: np.ndarray  # (3F, 3)
    edges: np.ndarray  # (E, 2), sorted vertex pairs
    incidence: np.ndarray  # (E,)
    edge_of_half: np.ndarray  # (3F,) index into edges

    @property
    def n_half_edges(self) -> int:
        return len(self.half_edges)

    def dangling(self) -> np.ndarray:
        return self.edges[self.incidence == 1]

    def non_manifold(self) -> np.ndarray:
        return self.edges[self.incidence >= 3]

    def as_dict(self) -> dict:
        return {(int(a), int(b)): int(c) for (a, b), c in zip(self.edges, self.incidence)}


def build_half_edge(m: TriMesh) -> HalfEdgeIndex:
    f = np.asarray(m.faces, np.int64).reshape(-1, 3)
    if f.size and (f.min() < 0 or f.max() >= len(m.vertices)):
        raise InvalidFaceIndex("face index out of range")
    fid = np.arange(len(f))
    tails = np.concatenate([f[:, 0], f[:, 1], f[:, 2]])
    heads = np.concatenate([f[:, 1], f[:, 2], f[:, 0]])
    faces = np.concatenate([fid, fid, fid])
    he = np.column_stack([tails, heads, faces])
    if len(he) == 0:
        z = np.zeros((0, 2), np.int64)
        return HalfEdgeIndex(he.reshape(0, 3), z, np.zeros(0, np.int64), np.zeros(0, np.int64))
    und = np.sort(he[:, :2], axis=1)
    edges, inv, counts = np.unique(und, axis=0, return_inverse=True, return_counts=True)
    return HalfEdgeIndex(he, edges, counts, inv.reshape(-1))


def segment_count(m: TriMesh) -> int:
    """Connected components among referenced vertices, by union-find."""
    if m.is_empty():
        return 0
    used = np.unique(m.faces)
    parent = {int(v): int(v) for v in used}

    def find(x):
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    count = len(parent)
    for a, b in build_half_edge(m).edges.tolist():
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[max(ra, rb)] = min(ra, rb)
            count -= 1
    return count


def seg_error(gt: TriMesh, gen: TriMesh) -> float:
    s_gt = segment_count(gt)
    if s_gt == 0:
        raise EmptyGroundTruth("ground truth mesh has no segments")
    return abs(segment_count(gen) - s_gt) / s_gt


def dangling_edge_length(m: TriMesh) -> float:
    if m.is_empty():
        return 0.0
    e = build_half_edge(m).dangling()
    if len(e) == 0:
        return 0.0
    d = m.vertices[e[:, 0]] - m.vertices[e[:, 1]]
    return math.fsum(np.linalg.norm(d, axis=1).tolist())


def flux_terms(m: TriMesh) -> np.ndarray:
    """Per-face ``(n_x + n_y + n_z) * area`` with unit normals from the winding."""
    if m.is_empty():
        return np.zeros(0)
    cross = m.face_cross()
    norm = np.linalg.norm(cross, axis=1)
    area = 0.5 * norm
    with np.errstate(invalid="ignore", divide="ignore"):
        n = np.where(norm[:, None] > 0, cross / norm[:, None], 0.0)
    return n.sum(axis=1) * area


def flux_enclosure_error(m: TriMesh) -> float:
    # fsum keeps the cancellation error far below the per-face terms
    return abs(math.fsum(flux_terms(m).tolist()))


def self_intersection_ratio(m: TriMesh, eps: float = EPS_INT, brute_force: bool = False) -> float:
    if m.is_empty():
        raise EmptyMesh("self-intersection ratio of an empty mesh")
    hit = intersecting_faces(m.vertices, m.faces, eps=eps, brute_force=brute_force)
    return len(hit) / m.n_faces


@dataclass(frozen=True)
class TopoReport:
    segments: int
    seg_error: float
    dangel: float
    sir: float
    fluxee: float

    @property
    def sir_pct(self) -> float:
        return 100.0 * self.sir

    @property
    def fluxee_x100(self) -> float:
        return 100.0 * self.fluxee


def topo_report(gt: TriMesh, gen: TriMesh, brute_force: bool = False) -> TopoReport:
    """All four topology/enclosure numbers for a generated mesh.

    ``sir`` and ``fluxee`` hold raw values; use ``sir_pct`` and
    ``fluxee_x100`` for table scaling. An empty generated mesh scores
    segments 0 and zero for the other three.
    """
    if gt.is_empty():
        raise EmptyGroundTruth("ground truth mesh is empty")
    se = seg_error(gt, gen)
    if gen.is_empty():
        return TopoReport(0, se, 0.0, 0.0, 0.0)
    return TopoReport(
        segments=segment_count(gen),
        seg_error=se,
        dangel=dangling_edge_length(gen),
        sir=self_intersection_ratio(gen, brute_force=brute_force),
        fluxee=flux_enclosure_error(gen),
    )
