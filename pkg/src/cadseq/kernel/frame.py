"""Sketch-plane placement from Euler angles, origin and scale."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import NonPositiveScale


def rot_z(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def rot_y(a: float) -> np.ndarray:
    c, s = np.cos(a), np.sin(a)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


@dataclass(frozen=True, eq=False)
class PlaneFrame:
    rotation: np.ndarray
    origin: np.ndarray
    s: float

    @property
    def x_axis(self) -> np.ndarray:
        return self.rotation[:, 0]

    @property
    def y_axis(self) -> np.ndarray:
        return self.rotation[:, 1]

    @property
    def normal(self) -> np.ndarray:
        """Extrusion direction."""
        return self.rotation[:, 2]

    def to_world(self, uv, z=0.0) -> np.ndarray:
        """Map sketch points ``(n, 2)`` at normal offsets ``z`` to world space.

        Sketch coordinates are scaled by ``s``; the normal offset is not.
        """
        uv = np.atleast_2d(np.asarray(uv, float))
        z = np.broadcast_to(np.asarray(z, float), (len(uv),))
        R = self.rotation
        return (self.origin[None, :] + self.s * (uv[:, :1] * R[:, 0] + uv[:, 1:2] * R[:, 1])
                + z[:, None] * R[:, 2])


def plane_frame(theta: float, phi: float, gamma: float, origin=(0.0, 0.0, 0.0),
                s: float = 1.0) -> PlaneFrame:
    """Intrinsic Z-Y-Z rotation ``Rz(theta) @ Ry(phi) @ Rz(gamma)``."""
    if not s > 0:
        raise NonPositiveScale(f"scale {s} must be positive")
    R = rot_z(theta) @ rot_y(phi) @ rot_z(gamma)
    R.setflags(write=False)
    o = np.array(origin, float)
    o.setflags(write=False)
    return PlaneFrame(R, o, float(s))
