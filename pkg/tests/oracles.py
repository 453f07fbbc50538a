"""Slow, obviously-correct reference implementations used by the tests."""
from __future__ import annotations

import math
from collections import Counter, defaultdict, deque

import numpy as np

from cadseq.kernel import TriMesh


def bfs_components(m: TriMesh) -> int:
    adj = defaultdict(set)
    for a, b, c in m.faces.tolist():
        for u, v in ((a, b), (b, c), (c, a)):
            adj[u].add(v)
            adj[v].add(u)
    seen, count = set(), 0
    for start in adj:
        if start in seen:
            continue
        count += 1
        queue = deque([start])
        seen.add(start)
        while queue:
            u = queue.popleft()
            for v in adj[u]:
                if v not in seen:
                    seen.add(v)
                    queue.append(v)
    return count


def incidence_dangel(m: TriMesh) -> float:
    counts = Counter()
    for a, b, c in m.faces.tolist():
        for u, v in ((a, b), (b, c), (c, a)):
            counts[(min(u, v), max(u, v))] += 1
    total = 0.0
    for (u, v), k in counts.items():
        if k == 1:
            total += math.dist(m.vertices[u], m.vertices[v])
    return total


def brute_nearest(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    out = np.empty(len(src))
    for i, p in enumerate(src):
        out[i] = np.sqrt(((dst - p) ** 2).sum(axis=1)).min()
    return out


def brute_chamfer(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * (brute_nearest(p, q).mean() + brute_nearest(q, p).mean())


def brute_fscore(gt: np.ndarray, gen: np.ndarray, tau: float) -> float:
    prec = float((brute_nearest(gen, gt) < tau).mean())
    rec = float((brute_nearest(gt, gen) < tau).mean())
    return 0.0 if prec + rec == 0 else 2 * prec * rec / (prec + rec)


def random_soup(rng: np.random.Generator, n_faces: int, n_verts: int | None = None,
                spread: float = 1.0, size: float = 0.3) -> TriMesh:
    """Random triangles; a small vertex pool makes many of them share vertices."""
    n_verts = n_verts or 3 * n_faces
    centers = rng.uniform(-spread, spread, (n_verts, 3))
    verts = centers + rng.normal(0, size, (n_verts, 3))
    faces = []
    while len(faces) < n_faces:
        f = rng.choice(n_verts, 3, replace=False)
        faces.append(f)
    return TriMesh(verts, np.array(faces))
