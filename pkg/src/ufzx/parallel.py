"""Deterministic simulation of the data-parallel execution strategy.

Compression runs in two phases (classify every block, then encode the non-constant ones) with
mid-byte destinations assigned by an exclusive prefix scan, and decompression resolves reused
leading bytes through logarithmic index propagation instead of serial predecessor chaining.
Outputs are bit-identical to the sequential pipeline; only the scheduling differs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import pipeline
from .container import CompressedStream, DataField

SCAN_GROUP = 32  # scan lane width, mirroring warp-sized two-level scans


def prefix_scan(lengths) -> np.ndarray:
    """Exclusive prefix scan via group-local stride doubling plus a scan of group totals.

    Equals the naive running sum exactly (integer arithmetic).
    """
    lengths = np.asarray(lengths, dtype=np.int64)
    n = len(lengths)
    if n == 0:
        return np.empty(0, dtype=np.int64)
    groups = -(-n // SCAN_GROUP)
    padded = np.zeros(groups * SCAN_GROUP, dtype=np.int64)
    padded[:n] = lengths
    grid = padded.reshape(groups, SCAN_GROUP)
    stride = 1
    while stride < SCAN_GROUP:
        grid[:, stride:] += grid[:, :-stride].copy()
        stride *= 2
    totals = grid[:, -1].copy()
    if groups > 1:
        group_offsets = prefix_scan(totals)
    else:
        group_offsets = np.zeros(1, dtype=np.int64)
    inclusive = (grid + group_offsets[:, None]).reshape(-1)[:n]
    return inclusive - lengths


@dataclass
class BlockByteLayout:
    """Byte-kind layout of one non-constant block: element i has min(code, q) leading bytes
    followed by q - min(code, q) mid bytes."""

    leading_codes: np.ndarray  # uint8 per element
    required_byte_count: int
    count: int

    def __post_init__(self):
        self.leading_codes = np.ascontiguousarray(self.leading_codes, dtype=np.uint8)
        if len(self.leading_codes) != self.count:
            raise ValueError("one code per element required")
        if not 1 <= self.required_byte_count <= 4:
            raise ValueError(f"bad byte count {self.required_byte_count}")

    def is_mid(self) -> np.ndarray:
        """(count, q) bool matrix: True where the byte is a mid byte."""
        q = self.required_byte_count
        cols = np.arange(q, dtype=np.uint8)
        clamped = np.minimum(self.leading_codes, q)
        return cols[None, :] >= clamped[:, None]


@dataclass
class ReadPosition:
    """Resolved read positions per byte: 1-based source element index, 0 = zero word."""

    positions: np.ndarray  # (count, q) int64
    rounds: int


def propagate_round(positions: np.ndarray, stride: int) -> np.ndarray:
    """One interleaved-addressing round: destination adopts the source (stride back) when the
    source value is greater. Positions never decrease."""
    nxt = positions.copy()
    nxt[stride:] = np.maximum(positions[stride:], positions[:-stride])
    return nxt


def propagate_indices(layout: BlockByteLayout) -> ReadPosition:
    """Assign every byte the element index of the mid byte it reads from.

    Mid bytes start at their own (1-based) index, leading bytes at the chain's first element,
    the zero word (index 0). ceil(log2 n) stride-doubling rounds make each position the running
    maximum, i.e. the most recent mid source at that byte column.
    """
    n = layout.count
    mid = layout.is_mid()
    own = np.arange(1, n + 1, dtype=np.int64)
    positions = np.where(mid, own[:, None], 0)
    rounds = max(0, math.ceil(math.log2(n))) if n > 1 else 0
    for k in range(rounds):
        positions = propagate_round(positions, 1 << k)
    return ReadPosition(positions, rounds)


def parallel_compress(field: DataField, cfg) -> CompressedStream:
    """Two-phase compression; bit-identical to pipeline.compress in sequential mode."""
    e = pipeline.resolve_bound(cfg.bound, field)
    values = field.values
    bs = cfg.block_size
    nb, counts = pipeline.block_partition(len(values), bs)

    # phase 1: classify every block
    mu32, constant, req, shifts, byte_counts = pipeline.block_stats(values, bs, e)

    # phase 2: encode non-constant blocks; commit mid bytes at scanned offsets
    blk_of = np.repeat(np.arange(nb, dtype=np.int64), counts)
    idx = np.flatnonzero(~constant[blk_of])
    if len(idx):
        codes, n_mid, be, mid_mask, _ = pipeline._encode_elements(
            values, idx, blk_of, mu32, shifts, byte_counts, req, want_accounting=False
        )
        offsets = prefix_scan(n_mid)
        mid_pool = np.zeros(int(offsets[-1] + n_mid[-1]), dtype=np.uint8)
        cols = np.arange(4, dtype=np.int64)
        rel = cols[None, :] - codes[:, None].astype(np.int64)
        dest = (offsets[:, None] + rel)[mid_mask]
        mid_pool[dest] = be[mid_mask]
    else:
        codes = np.empty(0, dtype=np.uint8)
        mid_pool = np.empty(0, dtype=np.uint8)

    return CompressedStream(
        block_size=bs,
        error_bound=e,
        dims=field.dims,
        constant_map=constant,
        mu_array=mu32,
        req_len_array=req[~constant],
        leading_codes=codes,
        mid_bytes=mid_pool,
    )


def parallel_decompress(stream: CompressedStream) -> DataField:
    """Decode with index propagation for leading bytes; bit-identical to the sequential path.

    Mid-byte offsets come from a prefix scan and every byte column is resolved with
    stride-doubling rounds over the whole element sequence (block fences keep propagation
    from crossing block boundaries), so no byte read depends on a byte written in the same
    round.
    """
    _, blk_of, idx, q_el, s_el, codes, n_mid, _, start_of = pipeline.decode_layout(stream)
    m = len(idx)
    if m == 0:
        return pipeline._assemble(stream, blk_of, idx, None, None)
    mid_off = prefix_scan(n_mid)
    mid = stream.mid_bytes

    own = np.arange(1, m + 1, dtype=np.int64)
    rounds = max(0, math.ceil(math.log2(m))) if m > 1 else 0
    bytes_mat = np.zeros((m, 4), dtype=np.uint8)
    for j in range(4):
        live = q_el > j
        positions = np.where(codes <= j, own, start_of)
        positions = np.where(live, positions, 0)
        for k in range(rounds):
            positions = propagate_round(positions, 1 << k)
        pos = positions - start_of
        take = live & (pos > 0)
        sel = np.flatnonzero(take)
        srcg = (start_of + pos - 1)[sel]
        col = np.zeros(m, dtype=np.uint8)
        col[sel] = mid[mid_off[srcg] + (j - codes[srcg])]
        bytes_mat[:, j] = col
    words = (
        (bytes_mat[:, 0].astype(np.uint32) << np.uint32(24))
        | (bytes_mat[:, 1].astype(np.uint32) << np.uint32(16))
        | (bytes_mat[:, 2].astype(np.uint32) << np.uint32(8))
        | bytes_mat[:, 3]
    )
    return pipeline._assemble(stream, blk_of, idx, words, s_el)
