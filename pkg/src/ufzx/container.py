"""Domain types and the bit-exact .ufzx container format.

Layout (all multi-byte integers little-endian):

    magic               4 bytes   ASCII "UFZX"
    version             1 byte    0x01
    dtype               1 byte    0x00 = float32 (0x01 reserved for float64, rejected in v1)
    block_size          2 bytes   unsigned
    error_bound         8 bytes   IEEE-754 double, resolved absolute bound e > 0
    ndims               1 byte
    dims                ndims x 8 bytes unsigned
    constant_map        ceil(nblocks/8) bytes, bit j of byte j//8 (LSB-first) = 1 iff block j
                        is constant; padding bits zero
    mu_array            4 bytes per block (float32), constant and non-constant alike
    req_len_array       1 byte per non-constant block, kept prefix length in bits (1..32)
    leading_code_pool   2 bits per non-constant-block element, packed LSB-first, padded to a
                        byte boundary with zero bits
    mid_byte_pool       concatenated mid-bytes, length derivable from the codes

Every pool length is derivable from what precedes it, so decoding never reads past a pool's
end and trailing bytes are an error.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

MAGIC = b"UFZX"
VERSION = 1
DTYPE_F32 = 0x00
DTYPE_F64 = 0x01  # reserved, rejected in v1

_HEAD = struct.Struct("<4sBBHdB")


class FormatError(ValueError):
    """Base class for container format violations."""


class MalformedMagicError(FormatError):
    pass


class VersionMismatchError(FormatError):
    pass


class UnsupportedDtypeError(FormatError):
    pass


class TruncatedStreamError(FormatError):
    pass


class InconsistentLengthError(FormatError):
    pass


@dataclass
class DataField:
    """A flat float32 dataset plus its logical dimensions and global value stats."""

    values: np.ndarray
    dims: tuple[int, ...]
    element_size_bytes: int = field(init=False, default=4)
    global_min: float = field(init=False)
    global_max: float = field(init=False)

    def __post_init__(self):
        self.values = np.ascontiguousarray(self.values, dtype=np.float32).ravel()
        self.dims = tuple(int(d) for d in self.dims)
        if len(self.values) == 0:
            raise ValueError("empty dataset")
        if any(d <= 0 for d in self.dims) or not self.dims:
            raise ValueError(f"dims must be positive, got {self.dims}")
        n = 1
        for d in self.dims:
            n *= d
        if n != len(self.values):
            raise ValueError(f"product(dims) = {n} != {len(self.values)} values")
        if not np.isfinite(self.values).all():
            raise ValueError("non-finite value in dataset")
        self.global_min = float(self.values.min())
        self.global_max = float(self.values.max())

    @property
    def n(self) -> int:
        return len(self.values)

    @property
    def value_range(self) -> float:
        return self.global_max - self.global_min

    @property
    def nbytes(self) -> int:
        return self.n * self.element_size_bytes


@dataclass(frozen=True)
class ErrorBound:
    """User-facing bound: absolute, or relative to the dataset's global value range."""

    mode: str  # "abs" | "rel"
    magnitude: float

    def __post_init__(self):
        if self.mode not in ("abs", "rel"):
            raise ValueError(f"unknown bound mode {self.mode!r}")
        m = float(self.magnitude)
        if not (m > 0 and np.isfinite(m)):
            raise ValueError(f"bound magnitude must be positive and finite, got {m}")


@dataclass
class BlockSummary:
    """Per-block analysis: midrange mu, radius, constant flag, kept-prefix width and shift."""

    index: int
    count: int
    mu: float
    radius: float
    is_constant: bool
    required_bits: int | None = None
    shift: int | None = None

    @property
    def required_byte_count(self) -> int | None:
        if self.required_bits is None or self.shift is None:
            return None
        return (self.required_bits + self.shift) // 8


@dataclass
class EncodedBlock:
    """One non-constant block: 2-bit reuse code per element plus packed mid-bytes."""

    leading_codes: np.ndarray  # uint8, one per element, values 0..3
    mid_bytes: bytes
    required_byte_count: int

    def __post_init__(self):
        self.leading_codes = np.ascontiguousarray(self.leading_codes, dtype=np.uint8)
        q = self.required_byte_count
        if not 1 <= q <= 4:
            raise ValueError(f"required_byte_count out of range: {q}")
        expect = int((q - np.minimum(self.leading_codes, q)).sum())
        if len(self.mid_bytes) != expect:
            raise ValueError(
                f"mid_bytes length {len(self.mid_bytes)} != expected {expect}"
            )


def _shift_for(req: np.ndarray) -> np.ndarray:
    return (8 - req % 8) % 8


@dataclass
class CompressedStream:
    """Parsed container contents; pools held unpacked for direct indexing."""

    block_size: int
    error_bound: float
    dims: tuple[int, ...]
    constant_map: np.ndarray  # bool, one per block
    mu_array: np.ndarray  # float32, one per block
    req_len_array: np.ndarray  # uint8, one per non-constant block
    leading_codes: np.ndarray  # uint8, one per non-constant-block element
    mid_bytes: np.ndarray  # uint8 pool

    def __post_init__(self):
        self.dims = tuple(int(d) for d in self.dims)
        self.constant_map = np.ascontiguousarray(self.constant_map, dtype=bool)
        self.mu_array = np.ascontiguousarray(self.mu_array, dtype=np.float32)
        self.req_len_array = np.ascontiguousarray(self.req_len_array, dtype=np.uint8)
        self.leading_codes = np.ascontiguousarray(self.leading_codes, dtype=np.uint8)
        self.mid_bytes = np.ascontiguousarray(self.mid_bytes, dtype=np.uint8)
        self._validate()

    def _validate(self):
        if not 8 <= self.block_size <= 65535:
            raise InconsistentLengthError(f"block size {self.block_size} out of range")
        if not (self.error_bound > 0 and np.isfinite(self.error_bound)):
            raise InconsistentLengthError(f"error bound {self.error_bound} not positive finite")
        if not self.dims or any(d <= 0 for d in self.dims):
            raise InconsistentLengthError(f"bad dims {self.dims}")
        nb = self.n_blocks
        if len(self.constant_map) != nb:
            raise InconsistentLengthError(
                f"constant map has {len(self.constant_map)} bits for {nb} blocks"
            )
        if len(self.mu_array) != nb:
            raise InconsistentLengthError(
                f"mu array has {len(self.mu_array)} entries for {nb} blocks"
            )
        if not np.isfinite(self.mu_array).all():
            raise InconsistentLengthError("non-finite mu")
        n_nc = int((~self.constant_map).sum())
        if len(self.req_len_array) != n_nc:
            raise InconsistentLengthError(
                f"req_len array has {len(self.req_len_array)} entries for {n_nc} "
                "non-constant blocks"
            )
        if n_nc and not ((self.req_len_array >= 1) & (self.req_len_array <= 32)).all():
            raise InconsistentLengthError("required bit length outside 1..32")
        if len(self.leading_codes) != self.n_nonconstant_elements:
            raise InconsistentLengthError(
                f"{len(self.leading_codes)} leading codes for "
                f"{self.n_nonconstant_elements} non-constant elements"
            )
        if len(self.leading_codes) and self.leading_codes.max() > 3:
            raise InconsistentLengthError("leading code > 3")
        if len(self.mid_bytes) != self.expected_mid_bytes():
            raise InconsistentLengthError(
                f"mid pool has {len(self.mid_bytes)} bytes, expected "
                f"{self.expected_mid_bytes()}"
            )

    @property
    def n_values(self) -> int:
        n = 1
        for d in self.dims:
            n *= d
        return n

    @property
    def n_blocks(self) -> int:
        return -(-self.n_values // self.block_size)

    def block_counts(self) -> np.ndarray:
        counts = np.full(self.n_blocks, self.block_size, dtype=np.int64)
        counts[-1] = self.n_values - (self.n_blocks - 1) * self.block_size
        return counts

    @property
    def n_nonconstant_elements(self) -> int:
        return int(self.block_counts()[~self.constant_map].sum())

    def byte_counts_per_block(self) -> np.ndarray:
        """required_byte_count q for each non-constant block, in block order."""
        req = self.req_len_array.astype(np.int64)
        return (req + _shift_for(req)) // 8

    def expected_mid_bytes(self) -> int:
        if len(self.leading_codes) == 0:
            return 0
        q_el = np.repeat(
            self.byte_counts_per_block(), self.block_counts()[~self.constant_map]
        )
        reused = np.minimum(self.leading_codes.astype(np.int64), q_el)
        return int((q_el - reused).sum())

    def compressed_size_bytes(self) -> int:
        nb = self.n_blocks
        m = len(self.leading_codes)
        return (
            _HEAD.size
            + 8 * len(self.dims)
            + -(-nb // 8)
            + 4 * nb
            + len(self.req_len_array)
            + -(-2 * m // 8)
            + len(self.mid_bytes)
        )

    def __eq__(self, other):
        if not isinstance(other, CompressedStream):
            return NotImplemented
        return (
            self.block_size == other.block_size
            and self.error_bound == other.error_bound
            and self.dims == other.dims
            and np.array_equal(self.constant_map, other.constant_map)
            # bit-level equality for mu (distinguishes -0.0 from +0.0)
            and np.array_equal(
                self.mu_array.view(np.uint32), other.mu_array.view(np.uint32)
            )
            and np.array_equal(self.req_len_array, other.req_len_array)
            and np.array_equal(self.leading_codes, other.leading_codes)
            and np.array_equal(self.mid_bytes, other.mid_bytes)
        )


def _pack_codes(codes: np.ndarray) -> bytes:
    m = len(codes)
    if m == 0:
        return b""
    padded = np.zeros(-(-m // 4) * 4, dtype=np.uint8)
    padded[:m] = codes
    quads = padded.reshape(-1, 4)
    packed = quads[:, 0] | quads[:, 1] << 2 | quads[:, 2] << 4 | quads[:, 3] << 6
    return packed.astype(np.uint8).tobytes()


def _unpack_codes(raw: np.ndarray, m: int) -> np.ndarray:
    if m == 0:
        return np.empty(0, dtype=np.uint8)
    spread = np.empty((len(raw), 4), dtype=np.uint8)
    for j in range(4):
        spread[:, j] = (raw >> (2 * j)) & 3
    flat = spread.reshape(-1)
    if flat[m:].any():
        raise InconsistentLengthError("nonzero padding bits in leading code pool")
    return flat[:m].copy()


def serialize(stream: CompressedStream) -> bytes:
    """Emit the container bytes; deterministic for a given stream."""
    out = bytearray()
    out += _HEAD.pack(
        MAGIC,
        VERSION,
        DTYPE_F32,
        stream.block_size,
        stream.error_bound,
        len(stream.dims),
    )
    out += struct.pack(f"<{len(stream.dims)}Q", *stream.dims)
    out += np.packbits(stream.constant_map, bitorder="little").tobytes()
    out += stream.mu_array.astype("<f4").tobytes()
    out += stream.req_len_array.tobytes()
    out += _pack_codes(stream.leading_codes)
    out += stream.mid_bytes.tobytes()
    return bytes(out)


class _Reader:
    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int, what: str) -> bytes:
        if self.pos + n > len(self.data):
            raise TruncatedStreamError(
                f"stream ends inside {what}: need {n} bytes at offset {self.pos}, "
                f"have {len(self.data) - self.pos}"
            )
        chunk = self.data[self.pos : self.pos + n]
        self.pos += n
        return chunk

    @property
    def remaining(self) -> int:
        return len(self.data) - self.pos


def deserialize(data: bytes) -> CompressedStream:
    """Parse container bytes; exact inverse of serialize on valid input."""
    r = _Reader(data)
    head = r.take(_HEAD.size, "header")
    magic, version, dtype, block_size, bound, ndims = _HEAD.unpack(head)
    if magic != MAGIC:
        raise MalformedMagicError(f"bad magic {magic!r}")
    if version != VERSION:
        raise VersionMismatchError(f"unsupported version {version}")
    if dtype == DTYPE_F64:
        raise UnsupportedDtypeError("float64 payloads are reserved and not supported")
    if dtype != DTYPE_F32:
        raise UnsupportedDtypeError(f"unknown dtype code {dtype:#x}")
    if ndims < 1:
        raise InconsistentLengthError("ndims must be >= 1")
    dims = struct.unpack(f"<{ndims}Q", r.take(8 * ndims, "dims"))
    if any(d == 0 for d in dims):
        raise InconsistentLengthError(f"zero dimension in {dims}")
    if not 8 <= block_size <= 65535:
        raise InconsistentLengthError(f"block size {block_size} out of range")
    if not (bound > 0 and np.isfinite(bound)):
        raise InconsistentLengthError(f"error bound {bound} not positive finite")

    n = 1
    for d in dims:
        n *= d
    nb = -(-n // block_size)

    map_bytes = np.frombuffer(r.take(-(-nb // 8), "constant map"), dtype=np.uint8)
    bits = np.unpackbits(map_bytes, bitorder="little")
    if bits[nb:].any():
        raise InconsistentLengthError("nonzero padding bits in constant map")
    constant_map = bits[:nb].astype(bool)

    mu_array = np.frombuffer(r.take(4 * nb, "mu array"), dtype="<f4").astype(np.float32)

    counts = np.full(nb, block_size, dtype=np.int64)
    counts[-1] = n - (nb - 1) * block_size
    n_nc_blocks = int((~constant_map).sum())
    req = np.frombuffer(r.take(n_nc_blocks, "req_len array"), dtype=np.uint8)
    if n_nc_blocks and not ((req >= 1) & (req <= 32)).all():
        raise InconsistentLengthError("required bit length outside 1..32")

    m = int(counts[~constant_map].sum())
    code_raw = np.frombuffer(r.take(-(-2 * m // 8), "leading code pool"), dtype=np.uint8)
    codes = _unpack_codes(code_raw, m)

    req64 = req.astype(np.int64)
    q_blk = (req64 + _shift_for(req64)) // 8
    if m:
        q_el = np.repeat(q_blk, counts[~constant_map])
        mid_len = int((q_el - np.minimum(codes.astype(np.int64), q_el)).sum())
    else:
        mid_len = 0
    mid = np.frombuffer(r.take(mid_len, "mid byte pool"), dtype=np.uint8)
    if r.remaining:
        raise InconsistentLengthError(f"{r.remaining} trailing bytes after mid pool")

    return CompressedStream(
        block_size=block_size,
        error_bound=bound,
        dims=dims,
        constant_map=constant_map,
        mu_array=mu_array,
        req_len_array=req.copy(),
        leading_codes=codes,
        mid_bytes=mid.copy(),
    )
