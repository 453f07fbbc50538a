from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadseq.errors import DegenerateBbox, EmptyCloud, EmptyMesh, MissingNormals
from cadseq.kernel import TriMesh
from cadseq.metrics import (PointCloud, chamfer_distance, f_score, nearest, normal_consistency,
                            normalize_pair, sample_surface)
from cadseq.metrics.recon import f_from_pr, precision_recall

from conftest import cube_mesh
from oracles import brute_chamfer, brute_fscore, brute_nearest


def cloud(points, normals=None):
    return PointCloud(np.asarray(points, float), None if normals is None else np.asarray(normals, float))


def test_sampling_deterministic():
    a = sample_surface(cube_mesh(), 500, 3)
    b = sample_surface(cube_mesh(), 500, 3)
    assert a == b
    assert a != sample_surface(cube_mesh(), 500, 4)


def test_samples_lie_on_cube_and_normals_unit():
    pc = sample_surface(cube_mesh(), 2000, 0)
    p = pc.points
    dist = np.minimum(np.abs(p), np.abs(p - 1)).min(axis=1)
    assert dist.max() < 1e-12
    assert np.allclose(np.linalg.norm(pc.normals, axis=1), 1.0)


def test_face_group_counts_multinomial():
    n = 6000
    pc = sample_surface(cube_mesh(), n, 11)
    axis = np.argmax(np.abs(pc.normals), axis=1)
    sign = np.sign(pc.normals[np.arange(n), axis])
    groups = axis * 2 + (sign > 0)
    counts = np.bincount(groups, minlength=6)
    sigma = np.sqrt(n * (1 / 6) * (5 / 6))
    assert np.all(np.abs(counts - n / 6) < 4 * sigma)


def test_single_triangle_normals():
    tri = TriMesh([[0, 0, 0], [1, 0, 0], [0, 1, 1]], [[0, 1, 2]])
    pc = sample_surface(tri, 100, 0)
    assert np.allclose(pc.normals, tri.face_normals()[0])


def test_sample_empty():
    with pytest.raises(EmptyMesh):
        sample_surface(TriMesh.empty(), 10)


def test_normalize_pair():
    rng = np.random.default_rng(0)
    gt = cloud(np.vstack([rng.uniform(0, 2, (100, 3)), [[0, 0, 0], [2, 2, 2]]]))
    gen = cloud(gt.points + 0.1)
    a, b = normalize_pair(gt, gen)
    assert np.allclose(a.points.min(0), -0.5) and np.allclose(a.points.max(0), 0.5)
    assert np.allclose(b.points - a.points, 0.05)


def test_normalize_fixed_point():
    gt = cloud([[-0.5, -0.5, -0.5], [0.5, 0.5, 0.5], [0, 0.1, 0.2]])
    a, _ = normalize_pair(gt, gt)
    assert np.allclose(a.points, gt.points, atol=1e-12)


def test_normalize_degenerate():
    with pytest.raises(DegenerateBbox):
        normalize_pair(cloud([[1, 2, 3]]), cloud([[0, 0, 0]]))


def test_chamfer_examples():
    p = cloud([[0, 0, 0]])
    assert chamfer_distance(p, p) == 0.0
    assert chamfer_distance(p, cloud([[0.1, 0, 0]])) == pytest.approx(0.1)
    assert chamfer_distance(p, cloud([[0.1, 0, 0]]), "sq-l2") == pytest.approx(0.01)
    with pytest.raises(EmptyCloud):
        chamfer_distance(p, cloud(np.zeros((0, 3))))


def test_fscore_examples():
    p = cloud(np.random.default_rng(1).uniform(size=(50, 3)))
    assert f_score(p, p) == 1.0
    far = cloud(np.array([[0, 0, 0.0], [1, 0, 0]]))
    near = cloud(far.points + [0.06, 0, 0])
    assert f_score(far, near, 0.05) == 0.0
    assert f_from_pr(1.0, 0.5) == pytest.approx(2 / 3)


def test_fscore_threshold_is_strict():
    a = cloud([[0, 0, 0]])
    b = cloud([[0.25, 0, 0]])
    assert f_score(a, b, 0.25) == 0.0
    assert f_score(a, b, 0.2500001) == 1.0


def test_normal_consistency_examples():
    pts = np.random.default_rng(2).uniform(size=(40, 3))
    up = np.tile([0, 0, 1.0], (40, 1))
    side = np.tile([1.0, 0, 0], (40, 1))
    assert normal_consistency(cloud(pts, up), cloud(pts, up)) == 1.0
    assert normal_consistency(cloud(pts, up), cloud(pts, side)) == 0.0
    assert normal_consistency(cloud(pts, up), cloud(pts, -up)) == 1.0
    assert normal_consistency(cloud(pts, up), cloud(pts, -up), "signed") == -1.0
    with pytest.raises(MissingNormals):
        normal_consistency(cloud(pts), cloud(pts, up))


def test_index_matches_brute_force():
    rng = np.random.default_rng(3)
    for _ in range(10):
        p = rng.uniform(size=(int(rng.integers(1, 2000)), 3))
        q = rng.uniform(size=(int(rng.integers(1, 2000)), 3))
        d, _ = nearest(p, q)
        d2, _ = nearest(p, q, brute_force=True)
        assert np.array_equal(d, d2)
        assert np.allclose(d, brute_nearest(p, q), atol=0, rtol=0)


def test_chamfer_and_fscore_match_oracle():
    rng = np.random.default_rng(4)
    p = rng.uniform(size=(300, 3))
    q = p + rng.normal(0, 0.03, p.shape)
    assert chamfer_distance(cloud(p), cloud(q)) == pytest.approx(brute_chamfer(p, q), rel=1e-12)
    assert f_score(cloud(p), cloud(q)) == brute_fscore(p, q, 0.05)


points = st.integers(1, 60).flatmap(
    lambda n: st.lists(st.tuples(*[st.floats(-1, 1, allow_nan=False)] * 3), min_size=n, max_size=n))


@settings(max_examples=60, deadline=None)
@given(points, points)
def test_chamfer_symmetric(a, b):
    pa, pb = cloud(a), cloud(b)
    assert chamfer_distance(pa, pb) == chamfer_distance(pb, pa)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**6))
def test_rigid_motion_invariance(seed):
    rng = np.random.default_rng(seed)
    p = rng.uniform(size=(200, 3))
    q = p + rng.normal(0, 0.04, p.shape)
    n1 = rng.normal(size=p.shape)
    n1 /= np.linalg.norm(n1, axis=1, keepdims=True)
    n2 = rng.normal(size=p.shape)
    n2 /= np.linalg.norm(n2, axis=1, keepdims=True)
    R, _ = np.linalg.qr(rng.normal(size=(3, 3)))
    t = rng.normal(size=3)
    a, b = cloud(p, n1), cloud(q, n2)
    a2, b2 = cloud(p @ R.T + t, n1 @ R.T), cloud(q @ R.T + t, n2 @ R.T)
    assert chamfer_distance(a, b) == pytest.approx(chamfer_distance(a2, b2), abs=1e-9)
    assert normal_consistency(a, b) == pytest.approx(normal_consistency(a2, b2), abs=1e-9)
    # F-score can flip on points sitting within rounding of tau; use a margin-free tau
    assert f_score(a, b, 0.0512345) == pytest.approx(f_score(a2, b2, 0.0512345), abs=0.01)


def test_fscore_monotone_in_tau():
    rng = np.random.default_rng(5)
    p = cloud(rng.uniform(size=(200, 3)))
    q = cloud(rng.uniform(size=(200, 3)))
    vals = [f_score(p, q, t) for t in np.linspace(0, 0.3, 20)]
    assert all(b >= a for a, b in zip(vals, vals[1:]))


def test_precision_recall_direction():
    gt = cloud([[0, 0, 0], [10, 0, 0]])
    gen = cloud([[0, 0, 0]])
    prec, rec = precision_recall(gt, gen)
    assert (prec, rec) == (1.0, 0.5)
