"""Flat token streams.

Vocabulary: ids 0-255 are quantized values, 256-262 are row types and control
tokens (see :class:`RowType`), 263 is the placeholder ``PAD``. Each row is
written as its type token followed by its slots up to the last non-PAD one;
the dropped trailing placeholders double as the end-of-command marker.
"""
from __future__ import annotations

from typing import Iterable, List, Sequence

from ..errors import IllegalTokenAtPosition, TruncatedStream
from .quantize import (N_LEVELS, N_SLOTS, PAD, ROW_SLOTS, CommandRow, RowType,
                       VectorizedSequence)

TOK_L, TOK_A, TOK_R, TOK_E = RowType.L.value, RowType.A.value, RowType.R.value, RowType.E.value
SOS, SOE, EOS = RowType.SOS.value, RowType.SOE.value, RowType.EOS.value
VOCAB_SIZE = PAD + 1

_TYPE_IDS = {t.value for t in RowType}
# a row may carry at most this many slot tokens before the next type token
_ROW_WIDTH = {t.value: (max(ROW_SLOTS[t]) + 1 if ROW_SLOTS[t] else 0) for t in RowType}


def tokenize(vseq: VectorizedSequence) -> List[int]:
    out: List[int] = []
    for row in vseq.rows:
        out.append(int(row.type))
        last = max((i for i, q in enumerate(row.slots) if q != PAD), default=-1)
        out.extend(row.slots[: last + 1])
    return out


def detokenize(tokens: Sequence[int]) -> VectorizedSequence:
    rows: List[CommandRow] = []
    kind = None
    slots: List[int] = []

    def flush():
        rows.append(CommandRow(RowType(kind), tuple(slots + [PAD] * (N_SLOTS - len(slots)))))

    for pos, tok in enumerate(tokens):
        tok = int(tok)
        if tok in _TYPE_IDS:
            if kind == EOS:
                raise IllegalTokenAtPosition("tokens after EOS", position=pos)
            if kind is not None:
                flush()
            kind, slots = tok, []
            if tok == EOS:
                continue
        elif 0 <= tok < N_LEVELS or tok == PAD:
            if kind is None:
                raise IllegalTokenAtPosition(f"value token {tok} where a type token is required",
                                             position=pos)
            if kind == EOS:
                raise IllegalTokenAtPosition("tokens after EOS", position=pos)
            if len(slots) >= _ROW_WIDTH[kind]:
                raise IllegalTokenAtPosition(
                    f"{RowType(kind).name} row takes at most {_ROW_WIDTH[kind]} slot tokens",
                    position=pos)
            allowed = ROW_SLOTS[RowType(kind)]
            if tok != PAD and len(slots) not in allowed:
                raise IllegalTokenAtPosition(
                    f"value in slot {len(slots)}, unused by {RowType(kind).name}", position=pos)
            slots.append(tok)
        else:
            raise IllegalTokenAtPosition(f"token {tok} outside the vocabulary", position=pos)
    if kind != EOS:
        raise TruncatedStream("stream does not end with EOS")
    flush()
    return VectorizedSequence(tuple(rows))


def format_tokens(tokens: Iterable[int]) -> str:
    return " ".join(str(int(t)) for t in tokens)


def parse_tokens(line: str) -> List[int]:
    try:
        return [int(f) for f in line.split()]
    except ValueError as exc:
        raise IllegalTokenAtPosition(str(exc)) from None


def read_token_file(path) -> List[List[int]]:
    with open(path) as fh:
        return [parse_tokens(line) for line in fh if line.strip()]


def write_token_file(path, streams: Iterable[Sequence[int]]) -> None:
    with open(path, "w") as fh:
        for s in streams:
            fh.write(format_tokens(s) + "\n")
