"""Error-bounded lossy compression for float32 scientific data.

Blocks whose values all sit within the bound of the block midrange are stored as that single
value; the rest keep a byte-aligned prefix of each normalized value's bit pattern, with
leading bytes reused between neighbors. A deterministic simulation of the data-parallel
execution strategy (two-phase classification, prefix-scan offsets, index propagation) produces
bit-identical streams.
"""
from .blockcodec import (
    PoolUnderrunError,
    decode_constant,
    decode_nonconstant,
    encode_nonconstant,
    required_bits,
    shift_amount,
    summarize_block,
)
from .container import (
    BlockSummary,
    CompressedStream,
    DataField,
    EncodedBlock,
    ErrorBound,
    FormatError,
    InconsistentLengthError,
    MalformedMagicError,
    TruncatedStreamError,
    UnsupportedDtypeError,
    VersionMismatchError,
    deserialize,
    serialize,
)
from .metrics import (
    QualityReport,
    ShiftAccounting,
    block_range_cdf,
    harmonic_mean,
    max_abs_error,
    mse,
    psnr,
    shift_overhead,
    throughput,
)
from .parallel import parallel_compress, parallel_decompress, prefix_scan, propagate_indices
from .pipeline import (
    CompressorConfig,
    ZeroRangeError,
    compress,
    compress_with_accounting,
    decompress,
    resolve_bound,
)

__version__ = "0.1.0"

__all__ = [
    "BlockSummary",
    "CompressedStream",
    "CompressorConfig",
    "DataField",
    "EncodedBlock",
    "ErrorBound",
    "FormatError",
    "InconsistentLengthError",
    "MalformedMagicError",
    "PoolUnderrunError",
    "QualityReport",
    "ShiftAccounting",
    "TruncatedStreamError",
    "UnsupportedDtypeError",
    "VersionMismatchError",
    "ZeroRangeError",
    "block_range_cdf",
    "compress",
    "compress_with_accounting",
    "decode_constant",
    "decode_nonconstant",
    "decompress",
    "deserialize",
    "encode_nonconstant",
    "harmonic_mean",
    "max_abs_error",
    "mse",
    "parallel_compress",
    "parallel_decompress",
    "prefix_scan",
    "propagate_indices",
    "psnr",
    "required_bits",
    "resolve_bound",
    "serialize",
    "shift_amount",
    "shift_overhead",
    "summarize_block",
    "throughput",
]
