"""``cadseq`` command line: one subcommand per pipeline stage.

Exit codes: 0 success, 1 I/O failure, 2 invalid input, 3 kernel failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import List, Optional

from .cmdseq.jsonio import dumps_canonical, parse_sequence, serialize_sequence
from .cmdseq.quantize import dequantize_sequence, quantize_sequence
from .cmdseq.tokens import detokenize, format_tokens, read_token_file, tokenize
from .data import captions, pipeline
from .data.pointio import read_cloud, write_cloud
from .errors import CadError, GeometryError, KernelError, PipelineError, SequenceError
from .evaluate import (EvalJob, EvalOptions, format_csv, mean_row, read_eval_manifest,
                       run_jobs)
from .kernel.execute import execute_sequence
from .kernel.mesh import write_obj
from .metrics.recon import F_TAU, N_POINTS
from .sketch2d import N_ARC

EXIT_OK, EXIT_IO, EXIT_INVALID, EXIT_KERNEL = 0, 1, 2, 3

log = logging.getLogger("cadseq")


def _report(exc: CadError) -> int:
    violations = getattr(exc, "violations", None)
    if violations:
        for v in violations:
            print(str(v), file=sys.stderr)
    else:
        print(str(exc), file=sys.stderr)
    if isinstance(exc, KernelError):
        return EXIT_KERNEL
    return EXIT_INVALID


def _load_seq(path):
    return parse_sequence(Path(path).read_text())


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


# ---------------------------------------------------------------------------
# subcommands

def cmd_validate(args) -> int:
    _load_seq(args.sequence)
    print("ok")
    return EXIT_OK


def cmd_build(args) -> int:
    mesh = execute_sequence(_load_seq(args.sequence), args.n_arc)
    write_obj(mesh, args.output)
    log.info("wrote %d faces to %s", mesh.n_faces, args.output)
    return EXIT_OK


def _options(args) -> EvalOptions:
    return EvalOptions(points=args.points, tau=args.tau, chamfer=args.chamfer, nc=args.nc,
                       weld=args.weld == "on", seed=args.seed, n_arc=args.n_arc,
                       oracle=args.oracle)


def cmd_eval(args) -> int:
    opts = _options(args)
    if args.manifest:
        jobs = read_eval_manifest(args.manifest, opts)
    else:
        if not (args.gt and args.gen):
            print("eval needs GT and GEN paths or --manifest", file=sys.stderr)
            return EXIT_INVALID
        for p in (args.gt, args.gen):
            if not Path(p).exists():
                print(f"no such file: {p}", file=sys.stderr)
                return EXIT_IO
        jobs = [EvalJob(args.id or Path(args.gen).stem, args.gt, args.gen, opts)]
    rows = run_jobs(jobs, args.jobs)
    if args.manifest:
        rows = rows + [mean_row(rows)]
    _emit(format_csv(rows), args.output)
    for r in rows:
        if r.get("error"):
            print(f"{r['id']}: {r['error']}", file=sys.stderr)
    n_ok = sum(1 for r in rows[:len(jobs)] if not r.get("error"))
    return EXIT_OK if n_ok else EXIT_INVALID


def cmd_tokenize(args) -> int:
    lines = [format_tokens(tokenize(quantize_sequence(_load_seq(p)))) for p in args.sequences]
    _emit("\n".join(lines) + "\n", args.output)
    return EXIT_OK


def cmd_detokenize(args) -> int:
    streams = read_token_file(args.tokens)
    seqs = [dequantize_sequence(detokenize(s)) for s in streams]
    if args.out_dir:
        d = Path(args.out_dir)
        d.mkdir(parents=True, exist_ok=True)
        for i, s in enumerate(seqs):
            (d / f"seq_{i:05d}.json").write_text(serialize_sequence(s) + "\n")
    else:
        _emit("".join(serialize_sequence(s) + "\n" for s in seqs), args.output)
    return EXIT_OK


def cmd_augment(args) -> int:
    seq = _load_seq(args.sequence)
    root = args.id or Path(args.sequence).stem
    d = Path(args.out_dir)
    d.mkdir(parents=True, exist_ok=True)
    for k, pre in enumerate(pipeline.augment_prefixes(seq), start=1):
        (d / f"{pipeline.prefix_id(root, k)}.json").write_text(serialize_sequence(pre) + "\n")
    return EXIT_OK


def cmd_split(args) -> int:
    records = pipeline.read_manifest(args.manifest, load_sequences=True)
    assigned = pipeline.split_dataset(records, args.ratio, args.seed)
    if not args.no_augment:
        assigned = pipeline.augment_training(assigned)
    pipeline.write_manifest(assigned, args.output, seq_dir=args.seq_dir or
                            str(Path(args.output).parent / "augmented"))
    n_train = sum(r.split == "train" and not r.is_augmented for r in assigned)
    n_test = sum(r.split == "test" for r in assigned)
    print(f"train roots {n_train}, test roots {n_test}, records {len(assigned)}", file=sys.stderr)
    return EXIT_OK


def cmd_sample(args) -> int:
    pc = pipeline.export_point_cloud(_load_seq(args.sequence), args.points, args.seed, args.n_arc)
    write_cloud(pc, args.output)
    return EXIT_OK


def cmd_perturb(args) -> int:
    write_cloud(pipeline.perturb_points(read_cloud(args.cloud), args.sigma, args.seed), args.output)
    return EXIT_OK


def cmd_decimate(args) -> int:
    pc = pipeline.decimate_points(read_cloud(args.cloud), args.fraction, args.seed)
    write_cloud(pc, args.output)
    return EXIT_OK


def cmd_poses(args) -> int:
    poses = [p.as_dict() for p in pipeline.camera_poses(args.radius)]
    _emit(dumps_canonical(poses) + "\n", args.output)
    return EXIT_OK


def cmd_caption_prep(args) -> int:
    views = args.views or [p.view_id for p in pipeline.camera_poses()]
    ids = args.ids or [None]
    reqs = [captions.build_caption_request(views, pipeline.derive_seed(args.seed, i or ""), i)
            for i in ids]
    out = [r.as_dict() for r in reqs]
    if args.caption:
        cfg = captions.load_caption_config(args.config)
        client = captions.client_from_config(cfg)
        texts = captions.caption_batch(reqs, client, cfg.concurrency)
        for d, t in zip(out, texts):
            d["caption"] = t
    _emit("".join(dumps_canonical(d) + "\n" for d in out), args.output)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def _eval_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--points", type=_positive_int, default=N_POINTS,
                   help="surface samples per mesh")
    p.add_argument("--tau", type=float, default=F_TAU, help="F-score threshold")
    p.add_argument("--chamfer", choices=("l2", "sq-l2"), default="l2",
                   help="Chamfer variant")
    p.add_argument("--nc", choices=("abs", "signed"), default="abs",
                   help="normal-consistency cosine mode")
    p.add_argument("--weld", choices=("on", "off"), default="on",
                   help="weld coincident vertices before measuring")
    p.add_argument("--jobs", type=_positive_int, default=1, help="worker processes")
    p.add_argument("--oracle", action="store_true",
                   help="use brute-force nearest-neighbour and intersection paths")


class _DefaultsFormatter(argparse.ArgumentDefaultsHelpFormatter):
    # skip the "(default: None)" noise on optional paths
    def _get_help_string(self, action):
        if action.default is None or "default" in (action.help or ""):
            return action.help
        return super()._get_help_string(action)


def build_parser() -> argparse.ArgumentParser:
    fmt = _DefaultsFormatter
    ap = argparse.ArgumentParser(prog="cadseq", description=__doc__.splitlines()[0],
                                 formatter_class=fmt)
    ap.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_text):
        p = sub.add_parser(name, help=help_text, description=help_text, formatter_class=fmt)
        p.set_defaults(func=fn)
        p.add_argument("--seed", type=int, default=0, help="master random seed")
        p.add_argument("--n-arc", type=_positive_int, default=N_ARC,
                       help="segments per full circle when tessellating arcs")
        return p

    p = add("validate", cmd_validate, "parse and check a sequence-JSON file")
    p.add_argument("sequence")

    p = add("build", cmd_build, "execute a sequence and write the solid as OBJ")
    p.add_argument("sequence")
    p.add_argument("output")

    p = add("eval", cmd_eval, "compare generated models to ground truth, CSV out")
    p.add_argument("gt", nargs="?", help="ground-truth sequence JSON or OBJ")
    p.add_argument("gen", nargs="?", help="generated sequence JSON or OBJ")
    p.add_argument("--manifest", help="JSON lines with id, gt, gen; adds a mean row")
    p.add_argument("--id", help="row id for a single pair (default: GEN file stem)")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    _eval_flags(p)

    p = add("tokenize", cmd_tokenize, "sequence JSON to one token line per file")
    p.add_argument("sequences", nargs="+")
    p.add_argument("-o", "--output")

    p = add("detokenize", cmd_detokenize, "token lines back to sequence JSON")
    p.add_argument("tokens")
    p.add_argument("-o", "--output", help="JSON-lines output (default: stdout)")
    p.add_argument("--out-dir", help="write one JSON file per stream instead")

    p = add("augment", cmd_augment, "write every prefix design of a sequence")
    p.add_argument("sequence")
    p.add_argument("out_dir")
    p.add_argument("--id", help="root id (default: file stem)")

    p = add("split", cmd_split, "train/test split of root records, then train-side augmentation")
    p.add_argument("manifest")
    p.add_argument("output")
    p.add_argument("--ratio", type=float, default=0.9, help="train fraction")
    p.add_argument("--seq-dir", help="where prefix sequences are written (default: OUTPUT dir/augmented)")
    p.add_argument("--no-augment", action="store_true", help="skip prefix augmentation")

    p = add("sample", cmd_sample, "sample a point cloud with normals from a sequence")
    p.add_argument("sequence")
    p.add_argument("output", help=".ply or .xyz")
    p.add_argument("--points", type=_positive_int, default=N_POINTS, help="number of samples")

    p = add("perturb", cmd_perturb, "add Gaussian noise to a point cloud")
    p.add_argument("cloud")
    p.add_argument("output")
    p.add_argument("--sigma", type=float, required=True,
                   help="noise std; protocol levels are " + ", ".join(map(str, pipeline.NOISE_LEVELS)))

    p = add("decimate", cmd_decimate, "drop a random fraction of a point cloud")
    p.add_argument("cloud")
    p.add_argument("output")
    p.add_argument("--fraction", type=float, required=True,
                   help="fraction removed; protocol levels are "
                   + ", ".join(map(str, pipeline.REMOVAL_LEVELS)))

    p = add("poses", cmd_poses, "the eight fixed camera poses as JSON")
    p.add_argument("-o", "--output")
    p.add_argument("--radius", type=float, default=pipeline.CAMERA_RADIUS, help="distance from origin")

    p = add("caption-prep", cmd_caption_prep, "build caption requests from rendered view ids")
    p.add_argument("--views", nargs="*", help="available view ids (default: view_0..view_7)")
    p.add_argument("--ids", nargs="*", help="record ids; each gets its own derived seed")
    p.add_argument("--config", help="key=value file with endpoint, api_key, retries, concurrency")
    p.add_argument("--caption", action="store_true",
                   help="also call the configured client (offline stub when no endpoint)")
    p.add_argument("-o", "--output")
    return ap


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (SequenceError, GeometryError, PipelineError, KernelError, CadError) as exc:
        return _report(exc)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, json.JSONDecodeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
