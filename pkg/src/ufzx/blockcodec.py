"""Per-block analysis and the leading-byte truncation codec.

The kept prefix of a normalized value's 32-bit word is sign (1) + exponent field (8) + as many
mantissa bits as the gap between the block's variation exponent and the bound's exponent. A
right shift pads the prefix to a whole number of bytes so commits are byte copies; identical
leading bytes between consecutive shifted words are reused via a 2-bit code.

This module is the scalar reference path: one block at a time, loops over elements. The batched
pipeline must produce identical results (property-tested).
"""
from __future__ import annotations

import math
import struct

import numpy as np

from .container import BlockSummary, EncodedBlock, FormatError

WORD_BITS = 32
EXPONENT_MIN = -127  # exponent assigned to zero
EXPONENT_SUBNORMAL = -126


class PoolUnderrunError(FormatError):
    """Mid-byte pool exhausted during decode: the stream is corrupt."""


def float_word(x) -> int:
    """32-bit pattern of x as float32."""
    return struct.unpack("<I", struct.pack("<f", np.float32(x)))[0]


def word_float(w: int) -> np.float32:
    return np.float32(struct.unpack("<f", struct.pack("<I", w & 0xFFFFFFFF))[0])


def exponent(x) -> int:
    """Unbiased binary exponent of |x| read from the float32 exponent field.

    Subnormals map to -126 (their effective scale), zero to -127. For normal x,
    2^p <= |x| < 2^(p+1).
    """
    w = float_word(x)
    field = (w >> 23) & 0xFF
    if field:
        return field - 127
    return EXPONENT_SUBNORMAL if (w & 0x7FFFFF) else EXPONENT_MIN


def exponent_array(arr: np.ndarray) -> np.ndarray:
    """Vector form of exponent() for a float32 array."""
    w = np.ascontiguousarray(arr, dtype=np.float32).view(np.uint32)
    field = ((w >> np.uint32(23)) & np.uint32(0xFF)).astype(np.int32)
    p = field - 127
    sub = field == 0
    p[sub & ((w & np.uint32(0x7FFFFF)) != 0)] = EXPONENT_SUBNORMAL
    p[sub & ((w & np.uint32(0x7FFFFF)) == 0)] = EXPONENT_MIN
    return p


def bound_exponent(e: float) -> int:
    """floor(log2 e) for a positive bound, exact for every positive double."""
    if not (e > 0 and math.isfinite(e)):
        raise ValueError(f"bound must be positive finite, got {e}")
    return math.frexp(e)[1] - 1


def required_bits(radius: float, e: float) -> int:
    """Total kept prefix length in bits: sign + exponent field + the mantissa bits needed to
    resolve e under a value of magnitude up to radius, clamped to the 32-bit word."""
    delta = exponent(radius) - bound_exponent(e)
    return max(0, min(WORD_BITS, 9 + delta))


def shift_amount(bits: int) -> int:
    """Right shift making bits + shift a whole number of bytes."""
    if not 1 <= bits <= WORD_BITS:
        raise ValueError(f"bits out of range: {bits}")
    return (8 - bits % 8) % 8


def required_byte_count(bits: int) -> int:
    return (bits + shift_amount(bits)) // 8


def summarize_block(block, e: float, index: int = 0) -> BlockSummary:
    """Classify one block and fix its encoding parameters.

    A block is constant when both endpoint deviations from the midrange mu are within e;
    equivalently max |d - mu| <= e, since deviations are maximized at the endpoints.
    """
    arr = np.ascontiguousarray(block, dtype=np.float32).ravel()
    if len(arr) == 0:
        raise ValueError("empty block")
    if not np.isfinite(arr).all():
        raise ValueError("non-finite element in block")
    if not (e > 0 and math.isfinite(e)):
        raise ValueError(f"bound must be positive finite, got {e}")
    lo64 = float(arr.min())
    hi64 = float(arr.max())
    mu = np.float32((lo64 + hi64) * 0.5)
    radius = (hi64 - lo64) * 0.5
    max_dev = max(hi64 - float(mu), float(mu) - lo64)
    if max_dev <= e:
        return BlockSummary(index, len(arr), float(mu), radius, True)
    # magnitude bound on the normalized values, in their own float32 arithmetic
    r_v = max(abs(np.float32(hi64) - mu), abs(np.float32(lo64) - mu))
    bits = required_bits(float(r_v), e)
    return BlockSummary(
        index, len(arr), float(mu), radius, False, bits, shift_amount(bits)
    )


def _leading_identical_bytes(x: int) -> int:
    """Number of leading zero bytes of a 32-bit XOR word."""
    for j in range(4):
        if (x >> (24 - 8 * j)) & 0xFF:
            return j
    return 4


def encode_nonconstant(block, summary: BlockSummary) -> EncodedBlock:
    """Encode one non-constant block against its summary."""
    if summary.is_constant:
        raise ValueError("block is constant")
    arr = np.ascontiguousarray(block, dtype=np.float32).ravel()
    mu = np.float32(summary.mu)
    s = summary.shift
    q = summary.required_byte_count
    codes = np.empty(len(arr), dtype=np.uint8)
    mid = bytearray()
    prev = 0
    for i, d in enumerate(arr):
        word = float_word(np.float32(d) - mu)
        shifted = word >> s
        code = min(3, _leading_identical_bytes(shifted ^ prev), q)
        codes[i] = code
        mid += shifted.to_bytes(4, "big")[code:q]
        prev = shifted
    return EncodedBlock(codes, bytes(mid), q)


def decode_nonconstant(enc: EncodedBlock, summary: BlockSummary, count: int) -> np.ndarray:
    """Invert encode_nonconstant; reused bytes come from the previous reconstructed word."""
    q = enc.required_byte_count
    s = summary.shift
    mu = np.float32(summary.mu)
    out = np.empty(count, dtype=np.float32)
    prev = b"\x00\x00\x00\x00"
    pos = 0
    for i in range(count):
        code = min(int(enc.leading_codes[i]), q)
        take = q - code
        if pos + take > len(enc.mid_bytes):
            raise PoolUnderrunError(
                f"mid pool exhausted at element {i}: need {take} bytes at {pos}"
            )
        word_bytes = prev[:code] + enc.mid_bytes[pos : pos + take] + b"\x00" * (4 - q)
        pos += take
        shifted = int.from_bytes(word_bytes, "big")
        out[i] = word_float(shifted << s) + mu
        prev = word_bytes
    return out


def decode_constant(mu: float, count: int) -> np.ndarray:
    if count < 1:
        raise ValueError("count must be >= 1")
    return np.full(count, np.float32(mu), dtype=np.float32)
