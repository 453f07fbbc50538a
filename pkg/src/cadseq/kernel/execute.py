from __future__ import annotations

from typing import List

from ..cmdseq.model import BoolKind, CadSequence, Step
from ..errors import CadError, EmptyResult
from ..sketch2d import N_ARC, assemble_profile
from .csg import boolean_op
from .extrude import extrude_profile
from .frame import plane_frame
from .mesh import TriMesh


def extrude_step(step: Step, n_arc: int = N_ARC) -> TriMesh:
    e = step.extrude
    polys = assemble_profile(step.profile, n_arc)
    frame = plane_frame(e.theta, e.phi, e.gamma, e.origin, e.s)
    return extrude_profile(polys, frame, e.e_p, e.e_n, e.u)


def execute_steps(seq: CadSequence, n_arc: int = N_ARC) -> List[TriMesh]:
    """Solid after every step of the left fold (may contain empty meshes)."""
    solids: List[TriMesh] = []
    current = TriMesh.empty()
    for i, step in enumerate(seq.steps):
        try:
            body = extrude_step(step, n_arc)
            op = step.extrude.b
            if i == 0 or op == BoolKind.NEW:
                current = body if i == 0 else boolean_op(current, body, BoolKind.JOIN)
            else:
                current = boolean_op(current, body, op)
        except CadError as exc:
            exc.context.setdefault("step", i)
            raise
        solids.append(current)
    return solids


def execute_sequence(seq: CadSequence, n_arc: int = N_ARC) -> TriMesh:
    """Run the sketch-extrude-boolean fold and return the final solid."""
    if not seq.steps:
        raise EmptyResult("sequence has no steps")
    out = execute_steps(seq, n_arc)[-1]
    if out.is_empty():
        raise EmptyResult("the sequence produces no solid", step=len(seq.steps) - 1)
    return out
