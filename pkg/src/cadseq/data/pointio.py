"""Point-cloud files: binary little-endian PLY and whitespace text (x y z nx ny nz)."""
from __future__ import annotations

import numpy as np

from ..metrics.recon import PointCloud

_FIELDS = ("x", "y", "z", "nx", "ny", "nz")


def ply_bytes(pc: PointCloud, dtype: str = "float") -> bytes:
    if pc.normals is None:
        raise ValueError("PLY export needs normals")
    np_type = {"float": "<f4", "double": "<f8"}[dtype]
    header = ["ply", "format binary_little_endian 1.0", f"element vertex {len(pc)}"]
    header += [f"property {dtype} {f}" for f in _FIELDS]
    header.append("end_header")
    body = np.hstack([pc.points, pc.normals]).astype(np_type).tobytes()
    return ("\n".join(header) + "\n").encode("ascii") + body


def write_ply(pc: PointCloud, path, dtype: str = "float") -> None:
    with open(path, "wb") as fh:
        fh.write(ply_bytes(pc, dtype))


def read_ply(path) -> PointCloud:
    with open(path, "rb") as fh:
        data = fh.read()
    end = data.index(b"end_header\n") + len(b"end_header\n")
    header = data[:end].decode("ascii").splitlines()
    if "format binary_little_endian 1.0" not in header:
        raise ValueError("only binary little-endian PLY is supported")
    n = 0
    props = []
    for line in header:
        parts = line.split()
        if parts[:2] == ["element", "vertex"]:
            n = int(parts[2])
        elif parts and parts[0] == "property":
            props.append((parts[1], parts[2]))
    names = [p[1] for p in props]
    if names != list(_FIELDS):
        raise ValueError(f"unexpected PLY properties {names}")
    kinds = {p[0] for p in props}
    if len(kinds) != 1:
        raise ValueError("mixed PLY property types are not supported")
    np_type = {"float": "<f4", "float32": "<f4", "double": "<f8", "float64": "<f8"}[kinds.pop()]
    arr = np.frombuffer(data[end:], dtype=np_type, count=n * 6).reshape(n, 6).astype(float)
    return PointCloud(arr[:, :3], arr[:, 3:])


def write_xyz(pc: PointCloud, path) -> None:
    cols = pc.points if pc.normals is None else np.hstack([pc.points, pc.normals])
    np.savetxt(path, cols, fmt="%.17g")


def read_xyz(path) -> PointCloud:
    arr = np.loadtxt(path, ndmin=2)
    if arr.shape[1] >= 6:
        return PointCloud(arr[:, :3], arr[:, 3:6])
    return PointCloud(arr[:, :3])


def read_cloud(path) -> PointCloud:
    return read_ply(path) if str(path).lower().endswith(".ply") else read_xyz(path)


def write_cloud(pc: PointCloud, path) -> None:
    if str(path).lower().endswith(".ply"):
        write_ply(pc, path)
    else:
        write_xyz(pc, path)
