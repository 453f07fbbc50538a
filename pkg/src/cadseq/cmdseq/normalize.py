from __future__ import annotations

import numpy as np

from ..errors import DegenerateBbox
from .model import CadSequence, Extrude, Step


def _bounds(bbox):
    if hasattr(bbox, "lo"):
        return np.asarray(bbox.lo, float), np.asarray(bbox.hi, float)
    lo, hi = bbox
    return np.asarray(lo, float), np.asarray(hi, float)


def normalize_sequence(seq: CadSequence, bbox, target: float = 1.0) -> CadSequence:
    """Rescale a sequence so its solid fits ``[-target, target]^3``.

    ``bbox`` is the world-space bounding box of the executed sequence, given as
    an object with ``lo``/``hi`` or a ``(lo, hi)`` pair. One isotropic factor
    and one translation are applied to every origin, scale and extent, so the
    largest box side becomes ``2 * target`` and the box is centered.
    """
    lo, hi = _bounds(bbox)
    ext = hi - lo
    if not np.all(np.isfinite(ext)) or np.any(ext <= 1e-12):
        raise DegenerateBbox(f"bounding box extents {ext.tolist()} have no volume")
    k = 2.0 * target / float(ext.max())
    center = (lo + hi) / 2.0
    steps = []
    for step in seq.steps:
        e = step.extrude
        o = k * (np.asarray(e.origin) - center)
        ne = Extrude(e.theta, e.phi, e.gamma, tuple(float(v) for v in o),
                     k * e.s, k * e.e_p, k * e.e_n, e.b, e.u)
        steps.append(Step(step.profile, ne))
    return CadSequence(tuple(steps))
