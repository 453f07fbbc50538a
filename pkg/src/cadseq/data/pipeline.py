"""Dataset construction: prefix augmentation, splits, point clouds, robustness data, cameras."""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from ..cmdseq.jsonio import parse_sequence, serialize_sequence
from ..cmdseq.model import CadSequence
from ..errors import AugmentedInputToSplit, FractionOutOfRange, NegativeSigma
from ..kernel.execute import execute_sequence
from ..metrics.recon import N_POINTS, PointCloud, sample_surface
from ..sketch2d import N_ARC

SPLITS = ("train", "test", "unassigned")
NOISE_LEVELS = (0.01, 0.02, 0.03, 0.05)
REMOVAL_LEVELS = (0.2, 0.5, 0.8, 0.95, 0.99)
CAMERA_RADIUS = 2.5


@dataclass(frozen=True)
class DatasetRecord:
    id: str
    sequence: Optional[CadSequence]
    root_id: str
    split: str = "unassigned"
    path: Optional[str] = None

    def __post_init__(self):
        if self.split not in SPLITS:
            raise ValueError(f"unknown split {self.split!r}")

    @property
    def is_augmented(self) -> bool:
        return self.id != self.root_id


def derive_seed(master_seed: int, record_id: str) -> int:
    digest = hashlib.sha256(f"{master_seed}:{record_id}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def _exact(x: float) -> Fraction:
    # decimal reading of the float, so 0.95 means 95/100 and not its binary neighbour
    return Fraction(repr(float(x)))


# ---------------------------------------------------------------------------
# augmentation and splits

def augment_prefixes(seq: CadSequence) -> List[CadSequence]:
    """Every intermediate design: the i-th result holds steps 1..i."""
    return [seq.prefix(i) for i in range(1, len(seq.steps) + 1)]


def prefix_id(root_id: str, k: int) -> str:
    return f"{root_id}-p{k}"


def split_dataset(records: Sequence[DatasetRecord], ratio: float = 0.9,
                  seed: int = 0) -> List[DatasetRecord]:
    """Assign train/test to un-augmented records; the first ``floor(ratio*N)`` shuffled go to train."""
    for r in records:
        if r.is_augmented:
            raise AugmentedInputToSplit(f"record {r.id!r} derives from {r.root_id!r}")
    if not 0 <= ratio <= 1:
        raise ValueError("ratio must lie in [0, 1]")
    n = len(records)
    n_train = math.floor(_exact(ratio) * n)
    order = np.random.default_rng(seed).permutation(n)
    train = set(order[:n_train].tolist())
    return [replace(r, split="train" if i in train else "test") for i, r in enumerate(records)]


def augment_training(records: Sequence[DatasetRecord]) -> List[DatasetRecord]:
    """Add prefix designs for train records; test records pass through untouched."""
    out: List[DatasetRecord] = []
    for r in records:
        out.append(r)
        if r.split != "train" or r.sequence is None:
            continue
        for k, pre in enumerate(augment_prefixes(r.sequence)[:-1], start=1):
            out.append(DatasetRecord(prefix_id(r.root_id, k), pre, r.root_id, "train"))
    return out


def leaked_roots(records: Iterable[DatasetRecord]) -> set:
    train = {r.root_id for r in records if r.split == "train"}
    test = {r.root_id for r in records if r.split == "test"}
    return train & test


# ---------------------------------------------------------------------------
# manifests

def write_manifest(records: Iterable[DatasetRecord], path, seq_dir=None) -> None:
    """One JSON object per line: id, root_id, split, path.

    Records without a path get their sequence written to ``seq_dir``.
    """
    path = Path(path)
    with open(path, "w") as fh:
        for r in records:
            p = r.path
            if p is None:
                if seq_dir is None or r.sequence is None:
                    raise ValueError(f"record {r.id!r} has no sequence path")
                d = Path(seq_dir)
                d.mkdir(parents=True, exist_ok=True)
                p = str(d / f"{r.id}.json")
                Path(p).write_text(serialize_sequence(r.sequence) + "\n")
            fh.write(json.dumps({"id": r.id, "root_id": r.root_id, "split": r.split,
                                 "path": p}, sort_keys=True) + "\n")


def read_manifest(path, load_sequences: bool = True) -> List[DatasetRecord]:
    base = Path(path).parent
    out = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            p = d.get("path")
            seq = None
            if load_sequences and p:
                full = Path(p) if Path(p).is_absolute() else base / p
                if not full.exists():
                    full = Path(p)
                seq = parse_sequence(full.read_text())
            out.append(DatasetRecord(d["id"], seq, d.get("root_id", d["id"]),
                                     d.get("split", "unassigned"), p))
    return out


# ---------------------------------------------------------------------------
# point clouds

def export_point_cloud(seq: CadSequence, n: int = N_POINTS, seed: int = 0,
                       n_arc: int = N_ARC) -> PointCloud:
    return sample_surface(execute_sequence(seq, n_arc), n, seed)


def perturb_points(pc: PointCloud, sigma: float, seed: int = 0) -> PointCloud:
    """Add zero-mean Gaussian noise of std ``sigma`` to every coordinate."""
    if sigma < 0:
        raise NegativeSigma(f"sigma={sigma} is negative")
    if sigma == 0:
        return PointCloud(pc.points.copy(), pc.normals)
    noise = np.random.default_rng(seed).normal(0.0, sigma, size=pc.points.shape)
    return PointCloud(pc.points + noise, pc.normals)


def kept_count(n: int, fraction_removed: float) -> int:
    return math.ceil((1 - _exact(fraction_removed)) * n)


def decimate_points(pc: PointCloud, fraction_removed: float, seed: int = 0) -> PointCloud:
    """Keep a uniformly random ``ceil((1-f)N)`` subset, in the original order."""
    if not 0 <= fraction_removed < 1:
        raise FractionOutOfRange(f"fraction {fraction_removed} outside [0, 1)")
    n = len(pc)
    k = kept_count(n, fraction_removed)
    if k == n:
        return pc
    keep = np.sort(np.random.default_rng(seed).choice(n, size=k, replace=False))
    normals = None if pc.normals is None else pc.normals[keep]
    return PointCloud(pc.points[keep], normals)


# ---------------------------------------------------------------------------
# cameras

@dataclass(frozen=True)
class CameraPose:
    view_id: str
    position: Tuple[float, float, float]
    look_at: Tuple[float, float, float] = (0.0, 0.0, 0.0)
    up: Tuple[float, float, float] = (0.0, 0.0, 1.0)

    def as_dict(self) -> dict:
        return {"view_id": self.view_id, "position": list(self.position),
                "look_at": list(self.look_at), "up": list(self.up)}


def camera_poses(radius: float = CAMERA_RADIUS) -> List[CameraPose]:
    """Eight views from the corners of a cube around the origin, +Z up."""
    c = radius / math.sqrt(3.0)
    poses = []
    k = 0
    for sz in (1, -1):
        for sy in (1, -1):
            for sx in (1, -1):
                poses.append(CameraPose(f"view_{k}", (sx * c, sy * c, sz * c)))
                k += 1
    return poses
