from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cadseq import synth
from cadseq.cmdseq import (EOS, PAD, SLOT_NAMES, SLOT_RANGES, SOE, SOS, TOK_A, TOK_E, TOK_L,
                           CommandRow, RowType, VectorizedSequence, dequantize_sequence,
                           dequantize_value, detokenize, format_tokens, parse_tokens,
                           quantize_sequence, quantize_value, read_token_file, round_half_up,
                           slot_tolerance, tokenize, write_token_file)
from cadseq.cmdseq.quantize import dequantize_slot, quantize_slot
from cadseq.errors import (IllegalTokenAtPosition, MissingRequiredSlot, TruncatedStream,
                           ValueOutOfRange)

CONTINUOUS = [n for n in SLOT_NAMES if SLOT_RANGES[n] is not None]


def test_coordinate_levels():
    assert quantize_value(-1.0, -1, 1) == 0
    assert quantize_value(1.0, -1, 1) == 255
    assert quantize_value(0.0, -1, 1) == 128


def test_round_half_up():
    assert round_half_up(127.5) == 128
    assert round_half_up(0.5) == 1
    assert round_half_up(2.4999) == 2


def test_out_of_range():
    with pytest.raises(ValueOutOfRange):
        quantize_value(1.5, -1, 1)


@pytest.mark.parametrize("name", CONTINUOUS)
def test_exhaustive_levels(name):
    lo, hi = SLOT_RANGES[name]
    assert dequantize_slot(name, 0) == lo
    assert dequantize_slot(name, 255) == hi
    for q in range(256):
        assert quantize_slot(name, dequantize_slot(name, q)) == q


@pytest.mark.parametrize("name", CONTINUOUS)
def test_error_bound(name):
    lo, hi = SLOT_RANGES[name]
    for v in np.linspace(lo, hi, 2001):
        err = abs(dequantize_slot(name, quantize_slot(name, float(v))) - v)
        assert err <= (hi - lo) / 255 + 1e-12
    assert slot_tolerance(name) == pytest.approx((hi - lo) / 255)


def _row(kind, **values):
    return CommandRow.make(kind, **values)


def test_line_row_truncates_trailing_pads():
    v = VectorizedSequence((_row(RowType.L, x=10, y=20),))
    assert tokenize(v)[:3] == [TOK_L, 10, 20]


def test_arc_row_tokens():
    v = VectorizedSequence((_row(RowType.A, x=1, y=2, alpha=3, f=1),))
    assert tokenize(v)[:5] == [TOK_A, 1, 2, 3, 1]


def test_interior_pad_survives():
    # an R row skips alpha and f, which sit between y and r
    v = quantize_sequence(synth.random_sequence(np.random.default_rng(3), 1))
    for row in v.rows:
        if row.type == RowType.R:
            break
    else:
        row = _row(RowType.R, x=5, y=6, r=7)
    toks = tokenize(VectorizedSequence((row, _row(RowType.EOS))))
    assert toks[:6] == [RowType.R, row.slots[0], row.slots[1], PAD, PAD, row.slots[4]]


def test_detokenize_simple():
    e = _row(RowType.E, theta=1, phi=2, gamma=3, px=4, py=5, pz=6, s=7, e_p=8, e_n=9, b=0, u=0)
    stream = [TOK_L, 10, 20] + tokenize(VectorizedSequence((e,)))[:-1] + [EOS]
    v = detokenize(stream)
    assert [r.type for r in v.rows] == [RowType.L, RowType.E, RowType.EOS]
    assert len(v.rows[0].slots) == 16 and v.rows[0].slots[2] == PAD


def test_missing_eos():
    with pytest.raises(TruncatedStream):
        detokenize([TOK_L, 10, 20])


def test_leading_value_token():
    with pytest.raises(IllegalTokenAtPosition):
        detokenize([42, TOK_L, 1, 2, EOS])


def test_tokens_after_eos():
    with pytest.raises(IllegalTokenAtPosition):
        detokenize([EOS, TOK_L])


def test_value_in_unused_slot():
    # a Line row carrying an alpha value
    with pytest.raises(IllegalTokenAtPosition):
        detokenize([TOK_L, 1, 2, 3, EOS])


def test_missing_required_slot():
    rows = (_row(RowType.SOS), CommandRow(RowType.L, (PAD,) * 16), _row(RowType.SOE),
            _row(RowType.E, theta=0, phi=0, gamma=0, px=0, py=0, pz=0, s=1, e_p=1, e_n=0, b=0, u=0),
            _row(RowType.EOS))
    with pytest.raises(MissingRequiredSlot):
        dequantize_sequence(VectorizedSequence(rows))


def test_row_layout_of_one_step():
    seq = synth.random_sequence(np.random.default_rng(0), 1)
    types = [r.type for r in quantize_sequence(seq).rows]
    assert types[0] == RowType.SOS and types[-3:] == [RowType.SOE, RowType.E, RowType.EOS]
    stream = tokenize(quantize_sequence(seq))
    assert stream[0] == SOS and stream[-1] == EOS and SOE in stream and TOK_E in stream


def test_token_file_round_trip(tmp_path):
    streams = [tokenize(quantize_sequence(synth.random_sequence(np.random.default_rng(s))))
               for s in range(5)]
    path = tmp_path / "tok.txt"
    write_token_file(path, streams)
    assert read_token_file(path) == streams
    assert parse_tokens(format_tokens(streams[0])) == streams[0]


def _flat(seq):
    """Continuous values and discrete flags of a sequence in a fixed order."""
    out = []
    for step in seq.steps:
        for loop in step.profile.loops:
            out.append(("loop",))
            for c in loop.curves:
                out.append((type(c).__name__,) + tuple(getattr(c, a) for a in c.__dataclass_fields__))
        e = step.extrude
        out.append(("E", e.theta, e.phi, e.gamma) + tuple(e.origin) + (e.s, e.e_p, e.e_n, e.b, e.u))
    return out


def _assert_close(a, b):
    fa, fb = _flat(a), _flat(b)
    assert [t[0] for t in fa] == [t[0] for t in fb]
    tol = 2.0 / 255 + 1e-12  # widest range is 2 units or 2pi/255 for angles
    for ta, tb in zip(fa, fb):
        for va, vb in zip(ta[1:], tb[1:]):
            assert abs(float(va) - float(vb)) <= max(tol, 2 * math.pi / 255 + 1e-12)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_full_round_trip(seed):
    seq = synth.random_sequence(np.random.default_rng(seed))
    v = quantize_sequence(seq)
    v2 = detokenize(tokenize(v))
    assert v2 == v
    back = dequantize_sequence(v2)
    assert quantize_sequence(back) == v
    _assert_close(seq, back)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.tuples(st.sampled_from([RowType.L, RowType.A, RowType.R]),
                          st.lists(st.integers(0, 255), min_size=4, max_size=4)),
                max_size=12))
def test_tokenize_is_invertible(rows):
    built = []
    for kind, vals in rows:
        names = {RowType.L: ("x", "y"), RowType.A: ("x", "y", "alpha", "f"),
                 RowType.R: ("x", "y", "r")}[kind]
        kw = {n: (v % 2 if n == "f" else v) for n, v in zip(names, vals)}
        built.append(_row(kind, **kw))
    v = VectorizedSequence(tuple(built) + (_row(RowType.EOS),))
    assert detokenize(tokenize(v)) == v


def test_dequantize_value_formula():
    assert dequantize_value(51, 0.0, 1.0) == pytest.approx(0.2)
