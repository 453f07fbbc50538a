"""Point-cloud reconstruction metrics: Chamfer distance, F-score, normal consistency."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from scipy.spatial import cKDTree

from ..errors import DegenerateBbox, EmptyCloud, EmptyMesh, MissingNormals
from ..kernel.mesh import TriMesh

F_TAU = 0.05
N_POINTS = 8192


@dataclass(frozen=True, eq=False)
class PointCloud:
    points: np.ndarray
    normals: Optional[np.ndarray] = None

    def __post_init__(self):
        p = np.array(self.points, float).reshape(-1, 3)
        p.setflags(write=False)
        object.__setattr__(self, "points", p)
        if self.normals is not None:
            n = np.array(self.normals, float).reshape(-1, 3)
            if len(n) != len(p):
                raise ValueError("points and normals differ in length")
            n.setflags(write=False)
            object.__setattr__(self, "normals", n)

    def __len__(self):
        return len(self.points)

    def __eq__(self, other):
        if not isinstance(other, PointCloud) or not np.array_equal(self.points, other.points):
            return False
        if self.normals is None or other.normals is None:
            return self.normals is None and other.normals is None
        return np.array_equal(self.normals, other.normals)

    def transformed(self, scale: float, offset) -> "PointCloud":
        return PointCloud(self.points * scale + np.asarray(offset, float), self.normals)


def sample_surface(m: TriMesh, n: int = N_POINTS, seed: int = 0) -> PointCloud:
    """Area-weighted uniform samples with the normal of the face they land on."""
    if m.is_empty():
        raise EmptyMesh("cannot sample an empty mesh")
    if n < 1:
        raise ValueError("need at least one sample")
    rng = np.random.default_rng(seed)
    areas = m.face_areas()
    total = areas.sum()
    if total <= 0:
        raise EmptyMesh("mesh has zero surface area")
    face = rng.choice(len(areas), size=n, p=areas / total)
    r1 = np.sqrt(rng.random(n))
    r2 = rng.random(n)
    tri = m.triangles()[face]
    pts = ((1 - r1)[:, None] * tri[:, 0] + (r1 * (1 - r2))[:, None] * tri[:, 1]
           + (r1 * r2)[:, None] * tri[:, 2])
    return PointCloud(pts, m.face_normals()[face])


def normalization(points: np.ndarray, half: float = 0.5) -> Tuple[float, np.ndarray]:
    """Scale and offset taking the box of ``points`` into ``[-half, half]^3``, largest side ``2*half``."""
    if len(points) == 0:
        raise EmptyCloud("ground truth cloud is empty")
    lo, hi = points.min(axis=0), points.max(axis=0)
    ext = float((hi - lo).max())
    if ext <= 1e-12:
        raise DegenerateBbox("ground truth points span no extent")
    k = 2.0 * half / ext
    return k, -k * (lo + hi) / 2.0


def normalize_pair(gt: PointCloud, gen: PointCloud, half: float = 0.5) -> Tuple[PointCloud, PointCloud]:
    """Normalize ``gt`` into ``[-half, half]^3`` and move ``gen`` by the same map."""
    k, off = normalization(gt.points, half)
    return gt.transformed(k, off), gen.transformed(k, off)


def nearest(src: np.ndarray, dst: np.ndarray, brute_force: bool = False) -> Tuple[np.ndarray, np.ndarray]:
    """Distance to, and index of, the nearest ``dst`` point for every ``src`` point."""
    if brute_force:
        idx = np.empty(len(src), np.int64)
        for s in range(0, len(src), 1024):
            block = src[s:s + 1024]
            d2 = ((block[:, None, :] - dst[None, :, :]) ** 2).sum(axis=2)
            idx[s:s + 1024] = np.argmin(d2, axis=1)
    else:
        _, idx = cKDTree(dst).query(src, k=1)
        idx = np.asarray(idx, np.int64)
    dist = np.sqrt(((src - dst[idx]) ** 2).sum(axis=1))
    return dist, idx


def _check(*clouds):
    for c in clouds:
        if len(c) == 0:
            raise EmptyCloud("point cloud is empty")


def chamfer_distance(p: PointCloud, q: PointCloud, variant: str = "l2",
                     brute_force: bool = False) -> float:
    """Half the sum of mean nearest-neighbour distances in both directions.

    ``variant="sq-l2"`` averages squared distances instead.
    """
    _check(p, q)
    dpq, _ = nearest(p.points, q.points, brute_force)
    dqp, _ = nearest(q.points, p.points, brute_force)
    if variant == "sq-l2":
        dpq, dqp = dpq ** 2, dqp ** 2
    elif variant != "l2":
        raise ValueError(f"unknown chamfer variant {variant!r}")
    return 0.5 * (float(dpq.mean()) + float(dqp.mean()))


def precision_recall(gt: PointCloud, gen: PointCloud, tau: float = F_TAU,
                     brute_force: bool = False) -> Tuple[float, float]:
    _check(gt, gen)
    d_gen, _ = nearest(gen.points, gt.points, brute_force)
    d_gt, _ = nearest(gt.points, gen.points, brute_force)
    return float((d_gen < tau).mean()), float((d_gt < tau).mean())


def f_from_pr(precision: float, recall: float) -> float:
    if precision + recall == 0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def f_score(gt: PointCloud, gen: PointCloud, tau: float = F_TAU, brute_force: bool = False) -> float:
    return f_from_pr(*precision_recall(gt, gen, tau, brute_force))


def normal_consistency(gt: PointCloud, gen: PointCloud, mode: str = "abs",
                       brute_force: bool = False) -> float:
    """Mean cosine between each point's normal and its nearest neighbour's, both ways."""
    _check(gt, gen)
    if gt.normals is None or gen.normals is None:
        raise MissingNormals("both clouds need normals")
    _, i_gen = nearest(gen.points, gt.points, brute_force)
    _, i_gt = nearest(gt.points, gen.points, brute_force)
    c1 = np.einsum("ij,ij->i", gen.normals, gt.normals[i_gen])
    c2 = np.einsum("ij,ij->i", gt.normals, gen.normals[i_gt])
    if mode == "abs":
        c1, c2 = np.abs(c1), np.abs(c2)
    elif mode != "signed":
        raise ValueError(f"unknown normal-consistency mode {mode!r}")
    return 0.5 * (float(c1.mean()) + float(c2.mean()))
