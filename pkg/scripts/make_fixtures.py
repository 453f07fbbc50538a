"""Write the fixture models used by the test suite to tests/fixtures/.

    python3 scripts/make_fixtures.py [--out tests/fixtures]
"""
from __future__ import annotations

import argparse
import json
import math
from pathlib import Path

import numpy as np

from cadseq.cmdseq.jsonio import serialize_sequence
from cadseq.cmdseq.model import (Arc, BoolKind, CadSequence, ExtentKind, Extrude, Line, Loop,
                                 Profile, Step)
from cadseq.errors import CadError
from cadseq.kernel.execute import execute_sequence
from cadseq.synth import box_step, circle_loop, random_sequence, rect_loop, stacked_sequence

NEW, JOIN, CUT, INTER = BoolKind.NEW, BoolKind.JOIN, BoolKind.CUT, BoolKind.INTERSECT
ONE, SYM, TWO = ExtentKind.ONE_SIDED, ExtentKind.SYMMETRIC, ExtentKind.TWO_SIDED


def ext(origin=(0.0, 0.0, 0.0), s=1.0, e_p=1.0, e_n=0.0, b=NEW, u=ONE, angles=(0.0, 0.0, 0.0)):
    return Extrude(*angles, tuple(map(float, origin)), s, e_p, e_n, b, u)


def seq(*steps):
    return CadSequence(tuple(steps))


def templates():
    half_pi = round(math.pi / 2, 6)
    yield "cube", seq(Step(Profile((rect_loop(1, 1),)), ext((-0.5, -0.5, -0.5))))
    yield "plate_hole", seq(Step(Profile((rect_loop(1, 0.6), circle_loop(0.5, 0.3, 0.15))),
                                 ext((-0.5, -0.3, 0), e_p=0.1)))
    l_shape = Loop((Line(0.8, 0), Line(0.8, 0.2), Line(0.2, 0.2), Line(0.2, 0.8), Line(0, 0.8),
                    Line(0, 0)))
    yield "l_bracket", seq(Step(Profile((l_shape,)), ext((-0.4, -0.4, 0), e_p=0.5)))
    yield "cylinder", seq(Step(Profile((circle_loop(0, 0, 0.4),)), ext(e_p=0.8)))
    yield "ring", seq(Step(Profile((circle_loop(0, 0, 0.5), circle_loop(0, 0, 0.3))),
                           ext(e_p=0.2, u=SYM)))
    # two extruded solids joined into one
    yield "two_block_join", seq(box_step((-0.5, -0.5, 0), (0.5, 0.5, 0.2)),
                                Step(Profile((circle_loop(0, 0, 0.25),)), ext((0, 0, 0.2), e_p=0.5, b=JOIN)))
    yield "slot_cut", seq(box_step((-0.5, -0.25, 0), (0.5, 0.25, 0.3)),
                          box_step((-0.2, -0.3, 0.15), (0.2, 0.3, 0.4), CUT))
    yield "cross_cylinders", seq(
        Step(Profile((circle_loop(0, 0, 0.4),)), ext(e_p=1.0, u=SYM)),
        Step(Profile((circle_loop(0, 0, 0.4),)), ext(e_p=1.0, u=SYM, b=INTER, angles=(0, half_pi, 0))))
    d_shape = Loop((Line(0.6, 0), Arc(0, 0, round(math.pi, 6), True)))
    yield "d_profile", seq(Step(Profile((d_shape,)), ext((-0.3, -0.15, 0), e_p=0.4)))
    yield "symmetric_plate", seq(Step(Profile((rect_loop(1, 0.5),)), ext((-0.5, -0.25, 0), e_p=0.3, u=SYM)))
    yield "two_sided_tube", seq(Step(Profile((circle_loop(0, 0, 0.3), circle_loop(0, 0, 0.2))),
                                     ext(e_p=0.5, e_n=0.3, u=TWO)))
    yield "tilted_plate", seq(Step(Profile((rect_loop(1, 1), circle_loop(0.3, 0.3, 0.1))),
                                   ext((-0.3, -0.2, 0.1), s=0.8, e_p=0.15, angles=(0.4, 0.7, -0.3))))
    rounded = Loop((Line(0.6, 0), Arc(0.6, 0.4, 1.2, True), Line(0, 0.4), Line(0, 0)))
    yield "boss_on_rounded", seq(Step(Profile((rounded,)), ext((-0.3, -0.2, 0), e_p=0.2)),
                                 Step(Profile((circle_loop(0.3, 0.2, 0.12),)),
                                      ext((-0.3, -0.2, 0.2), e_p=0.3, b=JOIN)))
    yield "disjoint_pair", seq(box_step((-0.5, -0.5, 0), (-0.1, 0.5, 0.3)),
                               box_step((0.1, -0.5, 0), (0.5, 0.5, 0.3), NEW))
    yield "stack", stacked_sequence(np.random.default_rng(7))


def random_models(n: int, seed: int = 2024):
    rng = np.random.default_rng(seed)
    k = 0
    while n:
        s = random_sequence(rng, int(rng.integers(2, 4)))
        try:
            m = execute_sequence(s)
        except CadError:
            continue
        if m.n_faces > 1500:
            continue
        yield f"random_{k:02d}", s
        k += 1
        n -= 1


def main(argv=None) -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "tests" / "fixtures"))
    ap.add_argument("--n", type=int, default=20, help="number of valid models")
    args = ap.parse_args(argv)
    out = Path(args.out)
    (out / "models").mkdir(parents=True, exist_ok=True)
    (out / "invalid").mkdir(parents=True, exist_ok=True)
    models = list(templates())
    models += list(random_models(args.n - len(models)))
    for name, s in models:
        execute_sequence(s)
        (out / "models" / f"{name}.json").write_text(serialize_sequence(s) + "\n")
    open_loop = {"steps": [{"profile": {"loops": [{"curves": [
        {"line": {"x": 1, "y": 0}}, {"line": {"x": 1, "y": 1}}, {"line": {"x": 0, "y": 1}}]}]},
        "extrude": {"theta": 0, "phi": 0, "gamma": 0, "ox": 0, "oy": 0, "oz": 0, "s": 1,
                    "e_p": 1, "e_n": 0, "bool": "new", "extent": "one"}}]}
    (out / "invalid" / "open_loop.json").write_text(json.dumps(open_loop) + "\n")
    print(f"wrote {len(models)} models to {out / 'models'}")


if __name__ == "__main__":
    main()
