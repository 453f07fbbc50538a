from __future__ import annotations

import json
import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadseq import synth
from cadseq.cmdseq import (Arc, BoolKind, CadSequence, Circle, ExtentKind, Extrude, Line, Loop,
                           Profile, Step, canonical, normalize_sequence, parse_sequence,
                           serialize_sequence, validate_sequence)
from cadseq.cmdseq.jsonio import canonical_float
from cadseq.errors import (DegenerateBbox, InvalidSequence, MalformedJson, SketchWithoutExtrusion,
                           UnknownCurveType, ValueOutOfRange)
from cadseq.kernel import bounding_box, execute_sequence

from conftest import MODELS

SQUARE = [{"line": {"x": 1, "y": 0}}, {"line": {"x": 1, "y": 1}},
          {"line": {"x": 0, "y": 1}}, {"line": {"x": 0, "y": 0}}]


def extrude(**kw):
    e = {"theta": 0, "phi": 0, "gamma": 0, "ox": 0, "oy": 0, "oz": 0, "s": 1, "e_p": 1,
         "e_n": 0, "bool": "new", "extent": "one"}
    e.update(kw)
    return e


def doc(*steps):
    return json.dumps({"steps": list(steps)})


def square_step(**kw):
    return {"profile": {"loops": [{"curves": SQUARE}]}, "extrude": extrude(**kw)}


def test_two_step_join_model():
    text = doc(square_step(ox=-0.5, oy=-0.5, e_p=0.2),
               {"profile": {"loops": [{"circle": {"cx": 0, "cy": 0, "r": 0.2}}]},
                "extrude": extrude(oz=0.2, e_p=0.5, bool="join")})
    seq = parse_sequence(text)
    assert len(seq) == 2
    assert seq.steps[1].extrude.b == BoolKind.JOIN
    assert seq.steps[1].profile.loops[0].is_circle


def test_unit_square_serializes_four_lines():
    seq = parse_sequence(doc(square_step()))
    data = json.loads(serialize_sequence(seq))
    curves = data["steps"][0]["profile"]["loops"][0]["curves"]
    assert [list(c) for c in curves] == [["line"]] * 4
    assert set(data["steps"][0]["extrude"]) >= {"theta", "s", "e_p", "bool", "extent"}


@pytest.mark.parametrize("path", MODELS, ids=lambda p: p.stem)
def test_fixture_round_trip(path):
    text = path.read_text()
    assert serialize_sequence(parse_sequence(text)) == canonical(text)


def test_equal_sequences_serialize_identically():
    a = parse_sequence(doc(square_step(e_p=0.5)))
    b = parse_sequence(json.dumps(json.loads(doc(square_step(e_p=0.5))), indent=4))
    assert serialize_sequence(a) == serialize_sequence(b)


def test_canonical_float_format():
    assert canonical_float(0.1) == "0.1"
    assert canonical_float(-0.0) == "0"
    assert canonical_float(1.0) == "1"
    assert canonical_float(math.pi) == "3.14159265"


def test_unknown_curve_type():
    bad = doc({"profile": {"loops": [{"curves": [{"spline": {"x": 1, "y": 0}}]}]},
               "extrude": extrude()})
    with pytest.raises(UnknownCurveType):
        parse_sequence(bad)


@pytest.mark.parametrize("text", ["{", "[]", '{"steps": 3}', doc({"profile": {}})])
def test_malformed(text):
    with pytest.raises((MalformedJson, SketchWithoutExtrusion)):
        parse_sequence(text)


def test_sketch_without_extrusion():
    with pytest.raises(SketchWithoutExtrusion):
        parse_sequence(doc({"profile": {"loops": [{"curves": SQUARE}]}}))


def test_out_of_range_value():
    with pytest.raises(ValueOutOfRange):
        parse_sequence(doc(square_step(s=5.0)))


def test_first_join_is_coerced_with_warning():
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always")
        seq = parse_sequence(doc(square_step(bool="join")))
    assert seq.steps[0].extrude.b == BoolKind.NEW
    assert caught


# -- validation ---------------------------------------------------------------

def _seq(loop, **ext):
    e = dict(theta=0.0, phi=0.0, gamma=0.0, origin=(0.0, 0.0, 0.0), s=1.0, e_p=1.0, e_n=0.0,
             b=BoolKind.NEW, u=ExtentKind.ONE_SIDED)
    e.update(ext)
    return CadSequence((Step(Profile((loop,)), Extrude(**e)),))


def test_valid_cube_has_no_violations():
    assert validate_sequence(_seq(synth.rect_loop(1, 1))) == []


def test_open_loop_violation():
    loop = Loop((Line(1, 0), Line(1, 1), Line(0, 1), Line(0, 0.1)))
    kinds = [v.kind for v in validate_sequence(_seq(loop))]
    assert kinds == ["OpenLoop"]


def test_zero_alpha_arc():
    loop = Loop((Line(1, 0), Arc(0, 0, 0.0)))
    assert "DegenerateArc" in [v.kind for v in validate_sequence(_seq(loop))]


def test_empty_extent_and_scale():
    kinds = [v.kind for v in validate_sequence(_seq(synth.rect_loop(1, 1), e_p=0.0))]
    assert "EmptyExtent" in kinds
    kinds = [v.kind for v in validate_sequence(_seq(synth.rect_loop(1, 1), s=0.0))]
    assert "NonPositiveScale" in kinds


def test_invalid_sequence_carries_violations():
    text = doc({"profile": {"loops": [{"curves": SQUARE[:3]}]}, "extrude": extrude()})
    with pytest.raises(InvalidSequence) as info:
        parse_sequence(text)
    assert [v.kind for v in info.value.violations] == ["OpenLoop"]


def test_circle_loop_ok():
    seq = CadSequence((Step(Profile((Loop((Circle(0.1, 0.2, 0.3),)),)),
                            synth.random_extrude(np.random.default_rng(0))),))
    assert validate_sequence(seq) == []


# -- JSON round trip ----------------------------------------------------------

@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_parse_serialize_identity(seed):
    seq = synth.random_sequence(np.random.default_rng(seed))
    text = serialize_sequence(seq)
    back = parse_sequence(text)
    assert back == seq
    assert serialize_sequence(back) == text


coord = st.floats(-1, 1, allow_nan=False).map(lambda v: float(f"{v:.9g}"))


@settings(max_examples=100, deadline=None)
@given(coord, coord, st.floats(0.01, 1).map(lambda v: float(f"{v:.9g}")))
def test_circle_values_survive_json(x, y, r):
    loop = Loop((Circle(x, y, r),))
    seq = _seq(loop)
    assert parse_sequence(serialize_sequence(seq), validate=False) == seq


# -- normalization ------------------------------------------------------------

def test_normalize_large_model():
    seq = _seq(synth.rect_loop(1, 1), s=0.5, e_p=0.5)
    mesh = execute_sequence(seq)
    # pretend the solid was built at four times the size
    box = bounding_box(mesh)
    lo, hi = np.asarray(box.lo) * 4, np.asarray(box.hi) * 4
    scaled = normalize_sequence(seq, (lo, hi))
    box = bounding_box(execute_sequence(scaled))
    assert np.all(np.asarray(box.lo) >= -1 - 1e-9) and np.all(np.asarray(box.hi) <= 1 + 1e-9)


def test_normalize_spans_target():
    seq = _seq(synth.rect_loop(1, 1), s=0.5, e_p=0.5, origin=(0.1, 0.0, 0.0))
    out = normalize_sequence(seq, bounding_box(execute_sequence(seq)))
    box = bounding_box(execute_sequence(out))
    assert math.isclose(float(box.extent.max()), 2.0, rel_tol=1e-9)
    assert np.allclose(box.center, 0.0, atol=1e-9)


def test_normalize_fixed_point():
    seq = _seq(synth.rect_loop(1, 1), s=2.0, e_p=2.0, origin=(-1.0, -1.0, -1.0))
    out = normalize_sequence(seq, bounding_box(execute_sequence(seq)))
    e0, e1 = seq.steps[0].extrude, out.steps[0].extrude
    assert abs(e0.s - e1.s) < 1e-9 and abs(e0.e_p - e1.e_p) < 1e-9
    assert np.allclose(e0.origin, e1.origin, atol=1e-9)


def test_normalize_degenerate():
    with pytest.raises(DegenerateBbox):
        normalize_sequence(_seq(synth.rect_loop(1, 1)), ((0, 0, 0), (0, 0, 0)))
