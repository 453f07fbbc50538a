"""Solid kernel: sketch planes, extrusion, booleans, sequence execution."""
from .csg import boolean_op
from .execute import execute_sequence, execute_steps, extrude_step
from .extrude import extrude_profile
from .frame import PlaneFrame, plane_frame
from .mesh import (AABB, TriMesh, bounding_box, concat, format_obj, parse_obj, read_obj,
                   signed_volume, surface_area, weld, write_obj)
