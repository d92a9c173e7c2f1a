import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ufzx
from ufzx.parallel import (
    BlockByteLayout,
    prefix_scan,
    propagate_indices,
    propagate_round,
)
from conftest import random_field_values


def naive_exclusive_scan(lengths):
    out, total = [], 0
    for x in lengths:
        out.append(total)
        total += x
    return out


def chained_positions(codes, q, count):
    """Serial predecessor-chaining oracle.

    A mid byte reads itself; a leading byte reads whatever its predecessor's byte resolved
    to, which unrolls to the last mid source before it (0 = the zero word).
    """
    positions = np.zeros((count, q), dtype=np.int64)
    for j in range(q):
        last = 0
        for i in range(count):
            if min(codes[i], q) <= j:  # mid byte at (i, j)
                last = i + 1
                positions[i, j] = last
            else:  # leading byte: copied from the predecessor's resolved source
                positions[i, j] = last
    return positions


class TestPrefixScan:
    def test_empty(self):
        assert list(prefix_scan([])) == []

    def test_hand_sum(self):
        assert list(prefix_scan([3, 0, 2, 5])) == [0, 3, 3, 5]

    def test_single(self):
        assert list(prefix_scan([7])) == [0]

    @given(st.lists(st.integers(min_value=0, max_value=1000), max_size=400))
    def test_matches_naive_loop(self, lengths):
        assert list(prefix_scan(lengths)) == naive_exclusive_scan(lengths)

    def test_length_1000_random(self, rng):
        lengths = rng.integers(0, 50, 1000)
        assert list(prefix_scan(lengths)) == naive_exclusive_scan(lengths)

    def test_crosses_group_boundaries(self):
        lengths = [1] * 97  # spans four 32-wide groups
        assert list(prefix_scan(lengths)) == list(range(97))


class TestPropagateIndices:
    def test_all_mid_is_fixpoint(self):
        layout = BlockByteLayout(np.zeros(8, dtype=np.uint8), 3, 8)
        res = propagate_indices(layout)
        expect = np.tile(np.arange(1, 9)[:, None], (1, 3))
        assert np.array_equal(res.positions, expect)

    def test_eight_element_pattern_strides_1_2_suffice(self):
        # q=3, codes per element: third/fourth reuse all bytes and must read the second
        # element's bytes; seventh/eighth chain back to the fifth/sixth
        codes = np.array([0, 0, 3, 3, 0, 2, 3, 3], dtype=np.uint8)
        layout = BlockByteLayout(codes, 3, 8)
        res = propagate_indices(layout)
        assert res.rounds == 3  # ceil(log2 8)
        # column of the third byte: elements 3,4 read element 2; 7,8 read element 6
        assert list(res.positions[:, 2]) == [1, 2, 2, 2, 5, 6, 6, 6]
        assert list(res.positions[:, 1]) == [1, 2, 2, 2, 5, 5, 5, 5]
        assert list(res.positions[:, 0]) == [1, 2, 2, 2, 5, 5, 5, 5]
        # the final stride (4) changes nothing for this pattern
        mid = layout.is_mid()
        pos = np.where(mid, np.arange(1, 9)[:, None], 0)
        pos = propagate_round(pos, 1)
        pos = propagate_round(pos, 2)
        assert np.array_equal(pos, res.positions)
        assert np.array_equal(propagate_round(pos, 4), res.positions)

    def test_exhaustive_small_blocks_match_chaining_oracle(self):
        for n in range(1, 7):
            for q in range(1, 5):
                for codes in itertools.product(range(4), repeat=n):
                    codes = np.array(codes, dtype=np.uint8)
                    res = propagate_indices(BlockByteLayout(codes, q, n))
                    assert np.array_equal(
                        res.positions, chained_positions(codes, q, n)
                    ), (n, q, codes)

    def test_round_count_is_log2_ceiling(self):
        for n in (1, 2, 3, 4, 5, 8, 9, 16, 33, 128):
            layout = BlockByteLayout(np.zeros(n, dtype=np.uint8), 2, n)
            expected = 0 if n == 1 else math.ceil(math.log2(n))
            assert propagate_indices(layout).rounds == expected

    def test_positions_monotone_across_rounds(self, rng):
        codes = rng.integers(0, 4, 64).astype(np.uint8)
        layout = BlockByteLayout(codes, 3, 64)
        mid = layout.is_mid()
        pos = np.where(mid, np.arange(1, 65)[:, None], 0)
        for k in range(6):
            nxt = propagate_round(pos, 1 << k)
            assert (nxt >= pos).all()
            pos = nxt

    def test_read_positions_point_at_mid_bytes_or_zero_word(self, rng):
        for _ in range(50):
            n = int(rng.integers(1, 40))
            q = int(rng.integers(1, 5))
            codes = rng.integers(0, 4, n).astype(np.uint8)
            layout = BlockByteLayout(codes, q, n)
            res = propagate_indices(layout)
            mid = layout.is_mid()
            for i in range(n):
                for j in range(q):
                    p = res.positions[i, j]
                    if p == 0:
                        # nothing to read before this byte: whole prefix is leading
                        assert not mid[: i + 1, j].any()
                    else:
                        assert mid[p - 1, j]


def compress_pair(vals, rel=None, abs_e=None, bs=128):
    field = ufzx.DataField(np.asarray(vals, dtype=np.float32), (len(vals),))
    bound = ufzx.ErrorBound("rel", rel) if rel else ufzx.ErrorBound("abs", abs_e)
    seq = ufzx.compress(field, ufzx.CompressorConfig(bound, bs))
    par = ufzx.parallel_compress(field, ufzx.CompressorConfig(bound, bs, "parallel-sim"))
    return field, seq, par


class TestParallelCompress:
    def test_bit_identical_on_random_fields(self, rng):
        for trial in range(60):
            n = int(rng.integers(2, 4000))
            vals = random_field_values(rng, n, trial)
            if vals.max() == vals.min():
                continue
            _, seq, par = compress_pair(
                vals, rel=float(10.0 ** rng.uniform(-6, -1)), bs=int(rng.choice([8, 64, 128]))
            )
            assert ufzx.serialize(seq) == ufzx.serialize(par)

    def test_all_constant_field_skips_phase_two(self):
        _, _, par = compress_pair(np.full(640, 5.0), abs_e=0.5)
        assert par.constant_map.all()
        assert len(par.req_len_array) == 0
        assert len(par.leading_codes) == 0
        assert len(par.mid_bytes) == 0

    def test_single_nonconstant_block(self, rng):
        vals = np.concatenate([np.full(128, 2.0), rng.normal(0, 1, 70)]).astype(np.float32)
        _, seq, par = compress_pair(vals, abs_e=1e-4)
        assert int((~par.constant_map).sum()) == 1
        assert ufzx.serialize(seq) == ufzx.serialize(par)


class TestParallelDecompress:
    def test_bit_identical_on_random_streams(self, rng):
        for trial in range(60):
            n = int(rng.integers(2, 4000))
            vals = random_field_values(rng, n, trial)
            if vals.max() == vals.min():
                continue
            field, seq, _ = compress_pair(
                vals, rel=float(10.0 ** rng.uniform(-6, -1)), bs=int(rng.choice([8, 64, 128]))
            )
            a = ufzx.decompress(seq)
            b = ufzx.parallel_decompress(seq)
            assert np.array_equal(a.values.view(np.uint32), b.values.view(np.uint32))

    def test_max_reuse_chains(self):
        # each block: one distinct element then identical values, so later codes saturate
        # at 3 and propagation chains span nearly the whole block
        vals = np.tile(np.concatenate([[0.0], np.full(127, 1.0)]), 4).astype(np.float32)
        field, seq, _ = compress_pair(vals, abs_e=1e-6, bs=128)
        assert (seq.leading_codes == 3).sum() > 400
        a = ufzx.decompress(seq)
        b = ufzx.parallel_decompress(seq)
        assert np.array_equal(a.values.view(np.uint32), b.values.view(np.uint32))
        assert np.max(np.abs(vals.astype(np.float64) - a.values.astype(np.float64))) <= 1e-6

    def test_constant_only_stream(self):
        field, seq, _ = compress_pair(np.full(300, 9.0), abs_e=1.0)
        out = ufzx.parallel_decompress(seq)
        assert (out.values == np.float32(9.0)).all()
