"""Pairwise evaluation of a generated model against ground truth, as CSV rows."""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence

from .cmdseq.jsonio import parse_sequence
from .data.pipeline import derive_seed
from .errors import CadError, EmptyResult
from .kernel.execute import execute_sequence
from .kernel.mesh import TriMesh, read_obj, weld
from .metrics.recon import (F_TAU, N_POINTS, chamfer_distance, f_score, normal_consistency,
                            normalization, sample_surface)
from .metrics.topology import topo_report
from .sketch2d import N_ARC

COLUMNS = ("id", "chamfer_x100", "fscore_x100", "normalc_x100", "sege", "dangel",
           "sir_pct", "fluxee_x100")
METRIC_COLUMNS = COLUMNS[1:]


@dataclass(frozen=True)
class EvalOptions:
    points: int = N_POINTS
    tau: float = F_TAU
    chamfer: str = "l2"
    nc: str = "abs"
    weld: bool = True
    seed: int = 0
    n_arc: int = N_ARC
    oracle: bool = False


@dataclass(frozen=True)
class EvalJob:
    id: str
    gt_path: str
    gen_path: str
    options: EvalOptions = EvalOptions()


def load_mesh(path, n_arc: int = N_ARC) -> TriMesh:
    """A mesh from an OBJ file, or by executing a sequence-JSON file."""
    p = Path(path)
    if p.suffix.lower() == ".obj":
        return read_obj(p)
    return execute_sequence(parse_sequence(p.read_text()), n_arc)


def evaluate_meshes(gt: TriMesh, gen: TriMesh, opts: EvalOptions = EvalOptions(),
                    row_id: str = "") -> Dict[str, object]:
    """All seven metric columns with table scaling.

    Both meshes are sampled with the same seed. Clouds and the generated
    mesh are moved by the map that normalizes the ground-truth cloud into
    [-0.5, 0.5]^3 before anything is measured.
    """
    if opts.weld:
        gt, gen = weld(gt), weld(gen)
    seed = derive_seed(opts.seed, row_id)
    if gen.is_empty():
        # topology columns stay defined for an empty generation; point metrics do not
        topo = topo_report(gt, gen)
        return {"chamfer_x100": "", "fscore_x100": "", "normalc_x100": "",
                "sege": topo.seg_error, "dangel": 0.0, "sir_pct": 0.0, "fluxee_x100": 0.0,
                "error": "EmptyMesh: generated model has no faces"}
    pc_gt = sample_surface(gt, opts.points, seed)
    pc_gen = sample_surface(gen, opts.points, seed)
    k, off = normalization(pc_gt.points)
    pc_gt, pc_gen = pc_gt.transformed(k, off), pc_gen.transformed(k, off)
    topo = topo_report(gt, gen.transformed(k, off), brute_force=opts.oracle)
    return {
        "error": "",
        "chamfer_x100": 100.0 * chamfer_distance(pc_gt, pc_gen, opts.chamfer, opts.oracle),
        "fscore_x100": 100.0 * f_score(pc_gt, pc_gen, opts.tau, opts.oracle),
        "normalc_x100": 100.0 * normal_consistency(pc_gt, pc_gen, opts.nc, opts.oracle),
        "sege": topo.seg_error,
        "dangel": topo.dangel,
        "sir_pct": topo.sir_pct,
        "fluxee_x100": topo.fluxee_x100,
    }


def run_job(job: EvalJob) -> Dict[str, object]:
    row: Dict[str, object] = {"id": job.id}
    try:
        gt = load_mesh(job.gt_path, job.options.n_arc)
        try:
            gen = load_mesh(job.gen_path, job.options.n_arc)
        except EmptyResult:
            gen = TriMesh.empty()
        row.update(evaluate_meshes(gt, gen, job.options, job.id))
    except (CadError, OSError, ValueError) as exc:
        row.update({c: "" for c in METRIC_COLUMNS})
        row["error"] = str(exc) or type(exc).__name__
    return row


def run_jobs(jobs: Sequence[EvalJob], n_jobs: int = 1) -> List[Dict[str, object]]:
    if n_jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=n_jobs) as pool:
            return list(pool.map(run_job, jobs))
    return [run_job(j) for j in jobs]


def mean_row(rows: Sequence[Dict[str, object]]) -> Dict[str, object]:
    ok = [r for r in rows if not r.get("error")]
    # rows with an error are left out of every mean
    out: Dict[str, object] = {"id": "mean"}
    for c in METRIC_COLUMNS:
        vals = [float(r[c]) for r in ok]
        out[c] = math.fsum(vals) / len(vals) if vals else ""
    out["error"] = "" if ok else "no successful rows"
    return out


def _fmt(v) -> str:
    if isinstance(v, float):
        if v == 0:
            return "0"
        return format(v, ".10g")
    return str(v)


def format_csv(rows: Sequence[Dict[str, object]]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(list(COLUMNS) + ["error"])
    for r in rows:
        w.writerow([_fmt(r.get(c, "")) for c in COLUMNS] + [r.get("error", "")])
    return buf.getvalue()


def read_eval_manifest(path, options: EvalOptions) -> List[EvalJob]:
    """JSON lines with ``id``, ``gt`` and ``gen`` (paths relative to the manifest)."""
    base = Path(path).parent
    jobs = []
    with open(path) as fh:
        for line in fh:
            if not line.strip():
                continue
            d = json.loads(line)
            gt = d.get("gt", d.get("gt_path"))
            gen = d.get("gen", d.get("gen_path"))
            resolve = lambda p: str(p if Path(p).is_absolute() else base / p)  # noqa: E731
            jobs.append(EvalJob(str(d["id"]), resolve(gt), resolve(gen), options))
    return jobs
