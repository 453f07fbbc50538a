"""Command-sequence language: data model, JSON, validation, quantization, tokens."""
from .jsonio import canonical, parse_sequence, sequence_from_dict, sequence_to_dict, serialize_sequence
from .model import (Arc, BoolKind, CadSequence, Circle, CurveCommand, ExtentKind, Extrude,
                    Line, Loop, Profile, Step)
from .normalize import normalize_sequence
from .quantize import (N_SLOTS, PAD, SLOT_NAMES, SLOT_RANGES, CommandRow, RowType,
                       VectorizedSequence, dequantize_sequence, dequantize_value,
                       quantize_sequence, quantize_value, round_half_up, slot_tolerance)
from .tokens import (EOS, SOE, SOS, TOK_A, TOK_E, TOK_L, TOK_R, detokenize, format_tokens,
                     parse_tokens, read_token_file, tokenize, write_token_file)
from .validate import EPS_CLOSE, EPS_CLOSE_RAW, Violation, validate_sequence
