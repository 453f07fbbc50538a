from __future__ import annotations

import csv
import io
import json

import numpy as np
import pytest

from cadseq.cli import main
from cadseq.data import read_cloud
from cadseq.kernel import concat
from cadseq.kernel.mesh import read_obj, write_obj

from conftest import FIXTURES, cube_mesh

CUBE = str(FIXTURES / "models" / "cube.json")
RING = str(FIXTURES / "models" / "ring.json")
STACK = str(FIXTURES / "models" / "stack.json")
OPEN = str(FIXTURES / "invalid" / "open_loop.json")


def rows_of(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_build_exit_codes(tmp_path, capsys):
    out = tmp_path / "cube.obj"
    assert main(["build", CUBE, str(out)]) == 0
    assert read_obj(out).n_faces == 12
    assert main(["build", OPEN, str(tmp_path / "x.obj")]) == 2
    assert "OpenLoop" in capsys.readouterr().err
    assert main(["build", str(tmp_path / "missing.json"), str(tmp_path / "y.obj")]) == 1


def test_validate(capsys):
    assert main(["validate", CUBE]) == 0
    assert capsys.readouterr().out.strip() == "ok"
    assert main(["validate", OPEN]) == 2


def test_eval_identical(capsys):
    assert main(["eval", CUBE, CUBE, "--points", "2048"]) == 0
    text = capsys.readouterr().out
    assert text.splitlines()[0] == ("id,chamfer_x100,fscore_x100,normalc_x100,sege,dangel,"
                                    "sir_pct,fluxee_x100,error")
    (row,) = rows_of(text)
    assert float(row["chamfer_x100"]) == 0 and float(row["fscore_x100"]) == 100
    assert float(row["sege"]) == 0 and float(row["dangel"]) == 0 and float(row["sir_pct"]) == 0
    assert row["error"] == ""


def test_eval_split_gen(tmp_path, capsys):
    gt, gen = tmp_path / "gt.obj", tmp_path / "gen.obj"
    write_obj(cube_mesh(), gt)
    halves = concat([cube_mesh((0, 0, 0), (0.5, 1, 1)), cube_mesh((0.6, 0, 0), (0.4, 1, 1))])
    write_obj(halves, gen)
    assert main(["eval", str(gt), str(gen), "--points", "1024"]) == 0
    (row,) = rows_of(capsys.readouterr().out)
    assert float(row["sege"]) == 1.0


def test_eval_missing_file(tmp_path):
    assert main(["eval", CUBE, str(tmp_path / "nope.json")]) == 1


def test_eval_manifest_mean_row_and_determinism(tmp_path, capsys):
    man = tmp_path / "m.jsonl"
    man.write_text("".join(json.dumps({"id": n, "gt": g, "gen": g}) + "\n"
                           for n, g in (("a", CUBE), ("b", RING), ("c", STACK))))
    args = ["eval", "--manifest", str(man), "--points", "1024"]
    assert main(args + ["--jobs", "2"]) == 0
    first = capsys.readouterr().out
    rows = rows_of(first)
    assert [r["id"] for r in rows] == ["a", "b", "c", "mean"]
    assert main(args) == 0
    assert capsys.readouterr().out == first


def test_eval_bad_gen_row_reported(tmp_path, capsys):
    man = tmp_path / "m.jsonl"
    man.write_text(json.dumps({"id": "ok", "gt": CUBE, "gen": CUBE}) + "\n"
                   + json.dumps({"id": "bad", "gt": CUBE, "gen": OPEN}) + "\n")
    assert main(["eval", "--manifest", str(man), "--points", "512"]) == 0
    out = capsys.readouterr()
    rows = {r["id"]: r for r in rows_of(out.out)}
    assert "OpenLoop" in rows["bad"]["error"]
    assert rows["mean"]["chamfer_x100"] == rows["ok"]["chamfer_x100"]
    assert "bad:" in out.err


def test_help_lists_defaults(capsys):
    with pytest.raises(SystemExit):
        main(["eval", "--help"])
    text = " ".join(capsys.readouterr().out.split())
    assert "default: None" not in text
    assert "8192" in text and "0.05" in text and "default: on" in text


def test_tokenize_round_trip(tmp_path, capsys):
    tok = tmp_path / "t.txt"
    assert main(["tokenize", CUBE, RING, "-o", str(tok)]) == 0
    assert len(tok.read_text().splitlines()) == 2
    out_dir = tmp_path / "back"
    assert main(["detokenize", str(tok), "--out-dir", str(out_dir)]) == 0
    files = sorted(out_dir.glob("*.json"))
    assert len(files) == 2
    again = tmp_path / "t2.txt"
    assert main(["tokenize", *map(str, files), "-o", str(again)]) == 0
    assert again.read_text() == tok.read_text()


def test_augment(tmp_path):
    assert main(["augment", STACK, str(tmp_path), "--id", "s"]) == 0
    names = sorted(p.name for p in tmp_path.glob("*.json"))
    assert names == [f"s-p{k}.json" for k in range(1, 8)]


def test_split(tmp_path, capsys):
    man = tmp_path / "roots.jsonl"
    models = sorted((FIXTURES / "models").glob("*.json"))
    man.write_text("".join(json.dumps({"id": p.stem, "path": str(p)}) + "\n" for p in models))
    out = tmp_path / "split.jsonl"
    assert main(["split", str(man), str(out), "--ratio", "0.5"]) == 0
    recs = [json.loads(line) for line in out.read_text().splitlines()]
    roots = [r for r in recs if r["id"] == r["root_id"]]
    assert sum(r["split"] == "train" for r in roots) == len(models) // 2
    test_roots = {r["root_id"] for r in roots if r["split"] == "test"}
    assert all(r["split"] == "train" for r in recs if r["id"] != r["root_id"])
    assert not test_roots & {r["root_id"] for r in recs if r["split"] == "train"}


def test_sample_perturb_decimate(tmp_path):
    ply, xyz = tmp_path / "c.ply", tmp_path / "c.xyz"
    assert main(["sample", CUBE, str(ply), "--points", "1000", "--seed", "2"]) == 0
    assert main(["sample", CUBE, str(xyz), "--points", "1000", "--seed", "2"]) == 0
    a, b = read_cloud(ply), read_cloud(xyz)
    assert len(a) == 1000 and np.allclose(a.points, b.points, atol=1e-6)
    noisy = tmp_path / "n.xyz"
    assert main(["perturb", str(xyz), str(noisy), "--sigma", "0.02"]) == 0
    assert not np.array_equal(read_cloud(noisy).points, b.points)
    thin = tmp_path / "d.xyz"
    assert main(["decimate", str(xyz), str(thin), "--fraction", "0.8"]) == 0
    assert len(read_cloud(thin)) == 200
    assert main(["decimate", str(xyz), str(thin), "--fraction", "1.5"]) == 2
    assert main(["perturb", str(xyz), str(noisy), "--sigma", "-1"]) == 2


def test_poses(capsys):
    assert main(["poses"]) == 0
    poses = json.loads(capsys.readouterr().out)
    assert len(poses) == 8


def test_caption_prep(capsys):
    assert main(["caption-prep", "--ids", "m1", "m2", "--caption"]) == 0
    lines = [json.loads(x) for x in capsys.readouterr().out.splitlines()]
    assert len(lines) == 2
    for d in lines:
        assert len(set(d["image_refs"])) == 4
        assert d["caption"].startswith("Generate a CAD design with ")
    assert main(["caption-prep", "--views", "a", "b", "c"]) == 2
