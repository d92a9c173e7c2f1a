"""Quality and performance measurement: PSNR, throughput, shift overhead, block-range CDF."""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

DEFAULT_CDF_THRESHOLDS = (1e-4, 1e-3, 1e-2, 1e-1, 1.0)


class DegenerateRangeError(ValueError):
    """Value range is zero where a range-relative quantity is required."""


class AccountingDisabledError(ValueError):
    """Shift overhead requested without a compression accounting pass."""


@dataclass
class ShiftAccounting:
    """Per-run bit totals for the byte-aligned scheme vs the unshifted shadow scheme."""

    bits_shifted_scheme: int
    bits_unshifted_scheme: int
    compressed_size_bytes: int


@dataclass
class QualityReport:
    """One measurement record per (field, bound) combination; unmeasured entries are None."""

    cr: float | None = None
    mse: float | None = None
    psnr_db: float | None = None
    max_abs_error: float | None = None
    ct_bytes_per_sec: float | None = None
    dt_bytes_per_sec: float | None = None
    shift_overhead_fraction: float | None = None
    block_range_cdf: list[tuple[float, float]] | None = None
    extra: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "cr": self.cr,
            "mse": self.mse,
            "psnr_db": self.psnr_db,
            "max_abs_error": self.max_abs_error,
            "ct_bytes_per_sec": self.ct_bytes_per_sec,
            "dt_bytes_per_sec": self.dt_bytes_per_sec,
            "shift_overhead_fraction": self.shift_overhead_fraction,
            "block_range_cdf": self.block_range_cdf,
        }
        d.update(self.extra)
        return d

    def to_text(self) -> str:
        lines = []
        for key, val in self.to_dict().items():
            if val is None:
                continue
            if isinstance(val, float):
                lines.append(f"{key}={val:.6g}")
            else:
                lines.append(f"{key}={val}")
        return "\n".join(lines)

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def _values_of(x) -> np.ndarray:
    arr = getattr(x, "values", x)
    return np.asarray(arr, dtype=np.float64).ravel()


def mse(original, reconstructed) -> float:
    a = _values_of(original)
    b = _values_of(reconstructed)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return float(np.mean((a - b) ** 2))


def max_abs_error(original, reconstructed) -> float:
    a = _values_of(original)
    b = _values_of(reconstructed)
    if len(a) != len(b):
        raise ValueError(f"length mismatch: {len(a)} vs {len(b)}")
    return float(np.max(np.abs(a - b)))


def psnr(original, reconstructed) -> float:
    """20 log10(range / rms error), range taken from the original; +inf when errorless."""
    err = mse(original, reconstructed)
    a = _values_of(original)
    rng = float(a.max() - a.min())
    if err == 0:
        return math.inf
    if rng == 0:
        raise DegenerateRangeError("zero value range with nonzero error")
    return 20.0 * math.log10(rng / math.sqrt(err))


def throughput(n: int, bytes_per_element: int, seconds: float) -> float:
    """Codec throughput in bytes/second."""
    if not seconds > 0:
        raise ValueError(f"seconds must be positive, got {seconds}")
    return n * bytes_per_element / seconds


def compression_ratio(original_bytes: int, compressed_bytes: int) -> float:
    return original_bytes / compressed_bytes


def shift_overhead(accounting: ShiftAccounting | None) -> float:
    """Extra storage of the byte-aligned scheme over the unshifted scheme, as a fraction of
    the compressed size (both sides in bits)."""
    if accounting is None:
        raise AccountingDisabledError(
            "run compress_with_accounting to measure shift overhead"
        )
    denom = accounting.compressed_size_bytes * 8
    return (accounting.bits_shifted_scheme - accounting.bits_unshifted_scheme) / denom


def block_range_cdf(
    field, block_size: int, thresholds=DEFAULT_CDF_THRESHOLDS
) -> list[tuple[float, float]]:
    """Empirical CDF of per-block value range relative to the global range."""
    values = np.ascontiguousarray(getattr(field, "values", field), dtype=np.float32)
    n = len(values)
    if n == 0:
        raise ValueError("empty dataset")
    lo = values.min()
    hi = values.max()
    global_range = float(hi) - float(lo)
    if global_range == 0:
        raise DegenerateRangeError("zero global value range")
    nb = -(-n // block_size)
    pad = nb * block_size - n
    padded = np.concatenate([values, np.full(pad, values[-1], np.float32)]) if pad else values
    grid = padded.reshape(nb, block_size)
    rel = (grid.max(axis=1).astype(np.float64) - grid.min(axis=1)) / global_range
    return [(float(t), float((rel <= t).mean())) for t in thresholds]


def harmonic_mean(xs) -> float:
    xs = list(xs)
    if not xs:
        raise ValueError("empty sequence")
    if any(x <= 0 for x in xs):
        raise ValueError("harmonic mean needs positive values")
    return len(xs) / sum(1.0 / x for x in xs)
