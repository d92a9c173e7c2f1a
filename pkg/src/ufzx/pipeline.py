"""Whole-dataset compression: bound resolution, block partitioning, stream assembly.

The hot paths are vectorized over all blocks at once but keep block-sequential semantics:
output bytes are identical to running the scalar codec block by block and concatenating.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import blockcodec as bc
from .container import CompressedStream, DataField, ErrorBound
from .metrics import ShiftAccounting


class ZeroRangeError(ValueError):
    """Relative bound on a zero-range (flat) dataset resolves to e = 0."""


@dataclass
class CompressorConfig:
    bound: ErrorBound
    block_size: int = 128
    execution: str = "sequential"  # "sequential" | "parallel-sim"

    def __post_init__(self):
        if not 8 <= self.block_size <= 65535:
            raise ValueError(f"block size {self.block_size} outside 8..65535")
        if self.execution not in ("sequential", "parallel-sim"):
            raise ValueError(f"unknown execution mode {self.execution!r}")


def resolve_bound(bound: ErrorBound, field: DataField) -> float:
    """Resolve to the absolute bound recorded in the stream header."""
    if bound.mode == "abs":
        return float(bound.magnitude)
    e = float(bound.magnitude) * field.value_range
    if e == 0:
        raise ZeroRangeError(
            "relative bound on a zero-range dataset resolves to 0; use an absolute bound"
        )
    return e


def block_partition(n: int, block_size: int) -> tuple[int, np.ndarray]:
    """Number of blocks and per-block element counts for a flat array of length n."""
    nb = -(-n // block_size)
    counts = np.full(nb, block_size, dtype=np.int64)
    counts[-1] = n - (nb - 1) * block_size
    return nb, counts


def block_stats(values: np.ndarray, block_size: int, e: float):
    """Phase-1 classification over all blocks.

    Returns (mu32, constant_mask, req_bits, shifts, byte_counts); the last three are only
    meaningful where constant_mask is False.
    """
    n = len(values)
    nb, _ = block_partition(n, block_size)
    pad = nb * block_size - n
    if pad:
        padded = np.concatenate([values, np.full(pad, values[-1], dtype=np.float32)])
    else:
        padded = values
    grid = padded.reshape(nb, block_size)
    mins = grid.min(axis=1)
    maxs = grid.max(axis=1)
    # exact float64 midrange, rounded once to float32 (overflow-safe)
    mu32 = ((mins.astype(np.float64) + maxs.astype(np.float64)) * 0.5).astype(np.float32)
    mu64 = mu32.astype(np.float64)
    max_dev = np.maximum(maxs.astype(np.float64) - mu64, mu64 - mins.astype(np.float64))
    constant = max_dev <= e
    # bound on |d - mu| in float32, attained at the endpoints
    r_v = np.maximum(np.abs(maxs - mu32), np.abs(mins - mu32))
    delta = bc.exponent_array(r_v) - bc.bound_exponent(e)
    req = np.clip(9 + delta, 0, bc.WORD_BITS).astype(np.uint8)
    shifts = ((8 - req % 8) % 8).astype(np.uint8)
    byte_counts = ((req.astype(np.int64) + shifts) // 8).astype(np.uint8)
    return mu32, constant, req, shifts, byte_counts


def _leading_zero_bytes(x: np.ndarray) -> np.ndarray:
    """Leading zero bytes of uint32 XOR words, 0..4."""
    return (
        ((x >> np.uint32(24)) == 0).astype(np.uint8)
        + ((x >> np.uint32(16)) == 0)
        + ((x >> np.uint32(8)) == 0)
        + (x == 0)
    )


def _encode_elements(values, idx, blk_of, mu32, shifts, byte_counts, req,
                     want_accounting: bool):
    """Shared element-level encoding for the non-constant subset idx (in block order).

    Returns (codes, per-element mid byte counts, (M,4) big-endian byte matrix, mid mask,
    accounting bit totals or None).
    """
    blki = blk_of[idx]
    v = values[idx] - mu32[blki]
    words = v.view(np.uint32)
    s_el = shifts[blki].astype(np.uint32)
    q_el = byte_counts[blki]
    shifted = words >> s_el

    starts = np.flatnonzero(np.diff(blki, prepend=-1))
    prev = np.empty_like(shifted)
    prev[1:] = shifted[:-1]
    prev[starts] = 0
    codes = np.minimum(np.minimum(3, _leading_zero_bytes(shifted ^ prev)), q_el)

    be = shifted.astype(">u4").view(np.uint8).reshape(-1, 4)  # MSB-first per element
    cols = np.arange(4, dtype=np.uint8)
    mid_mask = (cols >= codes[:, None]) & (cols < q_el[:, None])
    n_mid = (q_el - codes).astype(np.int64)

    accounting = None
    if want_accounting:
        prev_u = np.empty_like(words)
        prev_u[1:] = words[:-1]
        prev_u[starts] = 0
        r_el = req[blki]
        reuse_unshifted = np.minimum(
            np.minimum(3, _leading_zero_bytes(words ^ prev_u)), r_el // 8
        )
        bits_shifted = 8 * int(n_mid.sum())
        bits_unshifted = int(
            (r_el.astype(np.int64) - 8 * reuse_unshifted.astype(np.int64)).sum()
        )
        accounting = (bits_shifted, bits_unshifted)
    return codes, n_mid, be, mid_mask, accounting


def _compress_core(field: DataField, cfg: CompressorConfig, want_accounting: bool):
    e = resolve_bound(cfg.bound, field)
    values = field.values
    bs = cfg.block_size
    nb, counts = block_partition(len(values), bs)
    mu32, constant, req, shifts, byte_counts = block_stats(values, bs, e)

    blk_of = np.repeat(np.arange(nb, dtype=np.int64), counts)
    nc_el_mask = ~constant[blk_of]
    idx = np.flatnonzero(nc_el_mask)

    if len(idx):
        codes, n_mid, be, mid_mask, acct = _encode_elements(
            values, idx, blk_of, mu32, shifts, byte_counts, req, want_accounting
        )
        mid_pool = be[mid_mask]
    else:
        codes = np.empty(0, dtype=np.uint8)
        mid_pool = np.empty(0, dtype=np.uint8)
        acct = (0, 0) if want_accounting else None

    stream = CompressedStream(
        block_size=bs,
        error_bound=e,
        dims=field.dims,
        constant_map=constant,
        mu_array=mu32,
        req_len_array=req[~constant],
        leading_codes=codes,
        mid_bytes=mid_pool,
    )
    if not want_accounting:
        return stream, None
    accounting = ShiftAccounting(
        bits_shifted_scheme=acct[0],
        bits_unshifted_scheme=acct[1],
        compressed_size_bytes=stream.compressed_size_bytes(),
    )
    return stream, accounting


def compress(field: DataField, cfg: CompressorConfig) -> CompressedStream:
    if cfg.execution == "parallel-sim":
        from .parallel import parallel_compress

        return parallel_compress(field, cfg)
    stream, _ = _compress_core(field, cfg, want_accounting=False)
    return stream


def compress_with_accounting(
    field: DataField, cfg: CompressorConfig
) -> tuple[CompressedStream, ShiftAccounting]:
    stream, accounting = _compress_core(field, cfg, want_accounting=True)
    return stream, accounting


def decode_layout(stream: CompressedStream):
    """Element-level decode metadata shared by the sequential and parallel decoders.

    Returns (counts, blk_of, nc element indices, per-element q/s/code, per-element mid
    offsets, per-element block-start index within the non-constant subset).
    """
    nb, counts = block_partition(stream.n_values, stream.block_size)
    blk_of = np.repeat(np.arange(nb, dtype=np.int64), counts)
    idx = np.flatnonzero(~stream.constant_map[blk_of])
    nc_counts = counts[~stream.constant_map]
    q_blk = stream.byte_counts_per_block()
    req = stream.req_len_array.astype(np.int64)
    s_blk = (8 - req % 8) % 8
    q_el = np.repeat(q_blk, nc_counts).astype(np.uint8)
    s_el = np.repeat(s_blk, nc_counts).astype(np.uint32)
    codes = np.minimum(stream.leading_codes, q_el)
    n_mid = (q_el - codes).astype(np.int64)
    mid_off = np.concatenate([[0], np.cumsum(n_mid)[:-1]]) if len(idx) else np.empty(0, np.int64)
    m = len(idx)
    starts = np.concatenate([[0], np.cumsum(nc_counts)[:-1]]) if len(nc_counts) else np.empty(0, np.int64)
    start_of = np.repeat(starts, nc_counts).astype(np.int64) if m else np.empty(0, np.int64)
    return counts, blk_of, idx, q_el, s_el, codes, n_mid, mid_off, start_of


def _assemble(stream, blk_of, idx, rebuilt_words, s_el):
    out = np.empty(stream.n_values, dtype=np.float32)
    cmask = stream.constant_map[blk_of]
    out[cmask] = stream.mu_array[blk_of[cmask]]
    if len(idx):
        v = (rebuilt_words << s_el).view(np.float32)
        out[idx] = v + stream.mu_array[blk_of[idx]]
    return DataField(out, stream.dims)


def decompress(stream: CompressedStream) -> DataField:
    """Sequential decode: leading bytes resolved by chaining through predecessors."""
    _, blk_of, idx, q_el, s_el, codes, n_mid, mid_off, start_of = decode_layout(stream)
    m = len(idx)
    if m == 0:
        return _assemble(stream, blk_of, idx, None, None)
    mid = stream.mid_bytes
    # chained copy per byte column: each leading byte takes its predecessor's byte, which
    # is a running "last element whose column j byte is a mid byte" scan within the block.
    # start_of acts as the fence: a block's own indices always beat values carried over
    # from earlier blocks, and the carried maximum never exceeds the next block's fence.
    base = start_of
    bytes_mat = np.zeros((m, 4), dtype=np.uint8)
    own = np.arange(1, m + 1, dtype=np.int64)
    for j in range(4):
        live = q_el > j
        src = np.where(codes <= j, own, base)
        src = np.where(live, src, 0)
        resolved = np.maximum.accumulate(src)
        pos = resolved - base  # 1-based element within block, 0 = zero word
        take = live & (pos > 0)
        src_el = start_of + pos - 1
        sel = np.flatnonzero(take)
        srcg = src_el[sel]
        col = np.zeros(m, dtype=np.uint8)
        col[sel] = mid[mid_off[srcg] + (j - codes[srcg])]
        bytes_mat[:, j] = col
    words = (
        (bytes_mat[:, 0].astype(np.uint32) << np.uint32(24))
        | (bytes_mat[:, 1].astype(np.uint32) << np.uint32(16))
        | (bytes_mat[:, 2].astype(np.uint32) << np.uint32(8))
        | bytes_mat[:, 3]
    )
    return _assemble(stream, blk_of, idx, words, s_el)
