import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import ufzx
from ufzx import pipeline
from conftest import err64, random_field_values


def field_of(values, dims=None):
    values = np.asarray(values, dtype=np.float32)
    return ufzx.DataField(values, dims or (values.size,))


class TestResolveBound:
    def test_absolute_passthrough(self):
        field = field_of([0.0, 1.0])
        assert ufzx.resolve_bound(ufzx.ErrorBound("abs", 1e-3), field) == 1e-3

    def test_relative_scales_by_range(self):
        field = field_of([0.0, 50.0, 100.0])
        assert ufzx.resolve_bound(ufzx.ErrorBound("rel", 1e-2), field) == 1.0

    def test_relative_on_flat_dataset(self):
        field = field_of([2.5] * 10)
        with pytest.raises(ufzx.ZeroRangeError):
            ufzx.resolve_bound(ufzx.ErrorBound("rel", 1e-2), field)

    def test_invalid_magnitudes_rejected_at_construction(self):
        for bad in (0.0, -1.0, float("inf"), float("nan")):
            with pytest.raises(ValueError):
                ufzx.ErrorBound("abs", bad)


class TestCompress:
    def test_all_constant_field_layout(self):
        field = field_of(np.full(512 * 512, 3.14, dtype=np.float32), (512, 512))
        cfg = ufzx.CompressorConfig(ufzx.ErrorBound("abs", 1e-2), 128)
        stream = ufzx.compress(field, cfg)
        assert stream.constant_map.all()
        # header (17 + 16) + map (2048 blocks -> 256 bytes) + mu (4 * 2048), no pools
        assert stream.compressed_size_bytes() == 33 + 256 + 8192 == 8481
        cr = field.nbytes / stream.compressed_size_bytes()
        assert cr == pytest.approx(123.64, abs=0.01)
        assert cr >= 100

    def test_single_element_dataset(self):
        field = field_of([7.0])
        stream = ufzx.compress(field, ufzx.CompressorConfig(ufzx.ErrorBound("abs", 1.0)))
        assert stream.n_blocks == 1
        assert list(stream.block_counts()) == [1]
        out = ufzx.decompress(stream)
        assert out.values[0] == np.float32(7.0)

    def test_lossless_path_on_positive_walk(self, rng):
        # values inside [1, 2]: every block satisfies mu/2 <= d <= 2mu, so the normalized
        # subtraction is exact and the full-word path must reconstruct bit-identically
        steps = rng.normal(0, 1e-4, 20_000)
        vals = (1.5 + np.clip(np.cumsum(steps), -0.45, 0.45)).astype(np.float32)
        field = field_of(vals)
        stream = ufzx.compress(field, ufzx.CompressorConfig(ufzx.ErrorBound("abs", 1e-12)))
        assert not stream.constant_map.any()
        assert (stream.req_len_array == 32).all()
        out = ufzx.decompress(stream)
        assert np.array_equal(out.values.view(np.uint32), vals.view(np.uint32))

    def test_partition_completeness(self, rng):
        for n in (1, 7, 128, 129, 1000):
            field = field_of(random_field_values(rng, n, 1))
            stream = ufzx.compress(field, ufzx.CompressorConfig(ufzx.ErrorBound("abs", 1.0), 8))
            counts = stream.block_counts()
            assert counts.sum() == n
            assert (counts[:-1] == 8).all()
            assert 1 <= counts[-1] <= 8

    def test_deterministic_bytes(self, rng):
        vals = random_field_values(rng, 4096, 1)
        field = field_of(vals)
        cfg = ufzx.CompressorConfig(ufzx.ErrorBound("rel", 1e-4))
        a = ufzx.serialize(ufzx.compress(field, cfg))
        b = ufzx.serialize(ufzx.compress(ufzx.DataField(vals.copy(), (4096,)), cfg))
        assert a == b

    def test_tail_block_shorter_than_block_size(self, rng):
        vals = random_field_values(rng, 300, 0)
        field = field_of(vals)
        stream = ufzx.compress(field, ufzx.CompressorConfig(ufzx.ErrorBound("rel", 1e-4), 128))
        assert stream.n_blocks == 3
        assert list(stream.block_counts()) == [128, 128, 44]
        out = ufzx.decompress(stream)
        assert err64(field, out) <= stream.error_bound


class TestDecompress:
    def test_all_constant_stream_gives_mu(self):
        field = field_of(np.full(256, -2.5, dtype=np.float32))
        stream = ufzx.compress(field, ufzx.CompressorConfig(ufzx.ErrorBound("abs", 0.1)))
        out = ufzx.decompress(stream)
        assert (out.values == np.float32(-2.5)).all()

    def test_dims_and_length_preserved(self, rng):
        field = field_of(random_field_values(rng, 60, 1), (3, 4, 5))
        stream = ufzx.compress(field, ufzx.CompressorConfig(ufzx.ErrorBound("abs", 1e-3), 16))
        out = ufzx.decompress(stream)
        assert out.dims == (3, 4, 5)
        assert out.n == 60

    @given(
        st.integers(min_value=1, max_value=3000),
        st.integers(min_value=0, max_value=2),
        st.sampled_from([1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6]),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    @settings(max_examples=120)
    def test_round_trip_error_bound(self, n, kind, rel, seed):
        rng = np.random.default_rng(seed)
        vals = random_field_values(rng, n, kind)
        field = field_of(vals)
        if field.value_range == 0:
            return
        cfg = ufzx.CompressorConfig(
            ufzx.ErrorBound("rel", rel), int(rng.choice([8, 32, 128]))
        )
        stream = ufzx.compress(field, cfg)
        out = ufzx.decompress(stream)
        assert err64(field, out) <= stream.error_bound

    def test_lossy_idempotence(self, rng):
        vals = random_field_values(rng, 10_000, 1)
        field = field_of(vals)
        cfg = ufzx.CompressorConfig(ufzx.ErrorBound("rel", 1e-3))
        once = ufzx.decompress(ufzx.compress(field, cfg))
        e = ufzx.resolve_bound(cfg.bound, field)
        again = ufzx.decompress(
            ufzx.compress(once, ufzx.CompressorConfig(ufzx.ErrorBound("abs", e)))
        )
        assert err64(once, again) <= e

    def test_cr_accounting_is_exact_division(self, rng):
        field = field_of(random_field_values(rng, 5000, 2))
        stream = ufzx.compress(field, ufzx.CompressorConfig(ufzx.ErrorBound("abs", 1e-3)))
        blob = ufzx.serialize(stream)
        from ufzx.metrics import compression_ratio

        assert compression_ratio(field.nbytes, len(blob)) == field.nbytes / len(blob)


class TestConfig:
    def test_block_size_bounds(self):
        bound = ufzx.ErrorBound("abs", 1.0)
        ufzx.CompressorConfig(bound, 8)
        ufzx.CompressorConfig(bound, 65535)
        with pytest.raises(ValueError):
            ufzx.CompressorConfig(bound, 7)
        with pytest.raises(ValueError):
            ufzx.CompressorConfig(bound, 65536)

    def test_unknown_execution_mode(self):
        with pytest.raises(ValueError):
            ufzx.CompressorConfig(ufzx.ErrorBound("abs", 1.0), execution="gpu")

    def test_default_block_size_is_128(self):
        assert ufzx.CompressorConfig(ufzx.ErrorBound("abs", 1.0)).block_size == 128

    def test_execution_mode_dispatch(self, rng):
        vals = random_field_values(rng, 2000, 1)
        field = field_of(vals)
        seq = ufzx.compress(field, ufzx.CompressorConfig(ufzx.ErrorBound("rel", 1e-3)))
        par = ufzx.compress(
            field,
            ufzx.CompressorConfig(ufzx.ErrorBound("rel", 1e-3), execution="parallel-sim"),
        )
        assert ufzx.serialize(seq) == ufzx.serialize(par)


class TestScalarReferenceAgreement:
    def test_batched_matches_per_block_codec(self, rng):
        # the pipeline must equal running the scalar codec block by block
        from ufzx import blockcodec as bc

        for trial in range(30):
            n = int(rng.integers(2, 700))
            vals = random_field_values(rng, n, trial)
            field = field_of(vals)
            if field.value_range == 0:
                continue
            bs = int(rng.choice([8, 33, 128]))
            bound = ufzx.ErrorBound("rel", float(10.0 ** rng.uniform(-6, -1)))
            stream = ufzx.compress(field, ufzx.CompressorConfig(bound, bs))
            e = stream.error_bound

            codes_parts, mid_parts, reqs = [], [], []
            for k, start in enumerate(range(0, n, bs)):
                block = vals[start : start + bs]
                s = bc.summarize_block(block, e, index=k)
                assert s.is_constant == bool(stream.constant_map[k])
                assert np.float32(s.mu) == stream.mu_array[k]
                if not s.is_constant:
                    enc = bc.encode_nonconstant(block, s)
                    reqs.append(s.required_bits)
                    codes_parts.append(enc.leading_codes)
                    mid_parts.append(np.frombuffer(enc.mid_bytes, dtype=np.uint8))
            assert list(stream.req_len_array) == reqs
            if codes_parts:
                assert np.array_equal(stream.leading_codes, np.concatenate(codes_parts))
                assert np.array_equal(stream.mid_bytes, np.concatenate(mid_parts))
            else:
                assert len(stream.leading_codes) == 0

            out = ufzx.decompress(stream)
            for k, start in enumerate(range(0, n, bs)):
                block = vals[start : start + bs]
                count = len(block)
                if stream.constant_map[k]:
                    expect = bc.decode_constant(float(stream.mu_array[k]), count)
                else:
                    s = bc.summarize_block(block, e, index=k)
                    expect = bc.decode_nonconstant(bc.encode_nonconstant(block, s), s, count)
                got = out.values[start : start + count]
                assert np.array_equal(got.view(np.uint32), expect.view(np.uint32))
