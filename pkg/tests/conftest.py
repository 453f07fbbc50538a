from __future__ import annotations

from pathlib import Path

import numpy as np
import pytest

from cadseq.kernel.mesh import TriMesh

FIXTURES = Path(__file__).parent / "fixtures"
MODELS = sorted((FIXTURES / "models").glob("*.json"))


def cube_mesh(lo=(0.0, 0.0, 0.0), size=1.0) -> TriMesh:
    """Axis-aligned cube with outward CCW faces, 8 vertices and 12 triangles."""
    v = np.array([[x, y, z] for z in (0, 1) for y in (0, 1) for x in (0, 1)], float)
    v = v * size + np.asarray(lo, float)
    f = np.array([
        [0, 2, 1], [1, 2, 3],  # z = 0
        [4, 5, 6], [5, 7, 6],  # z = 1
        [0, 1, 4], [1, 5, 4],  # y = 0
        [2, 6, 3], [3, 6, 7],  # y = 1
        [0, 4, 2], [2, 4, 6],  # x = 0
        [1, 3, 5], [3, 7, 5],  # x = 1
    ])
    return TriMesh(v, f)


@pytest.fixture
def cube() -> TriMesh:
    return cube_mesh()


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(12345)
