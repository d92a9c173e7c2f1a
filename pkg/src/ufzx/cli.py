"""Command-line front end: compress/decompress raw binary float32 arrays, analyze, bench.

Inputs are headerless little-endian float32 files with dimensions given on the command line
(the convention of the common scientific data reduction benchmarks). Exit codes: 0 success,
1 usage, 2 I/O, 3 format, 4 bound violation.
"""
from __future__ import annotations

import argparse
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import metrics, parallel, pipeline
from .container import DataField, ErrorBound, FormatError, deserialize, serialize
from .metrics import DegenerateRangeError, QualityReport

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_IO = 2
EXIT_FORMAT = 3
EXIT_BOUND = 4

SWEEP_BLOCK_SIZES = (8, 16, 32, 64, 128, 256)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass(frozen=True)
class DatasetDescriptor:
    path: Path
    dims: tuple[int, ...]
    dtype: str = "f32"


def read_raw(desc: DatasetDescriptor) -> DataField:
    n = 1
    for d in desc.dims:
        n *= d
    size = desc.path.stat().st_size
    if size != 4 * n:
        raise OSError(
            f"{desc.path}: file is {size} bytes but dims {desc.dims} require {4 * n}"
        )
    values = np.fromfile(desc.path, dtype="<f4")
    return DataField(values, desc.dims)


def write_raw(path: Path, values: np.ndarray) -> None:
    np.asarray(values, dtype="<f4").tofile(path)


def _parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise UsageError(f"bad dims {text!r}")
    if not dims or any(d <= 0 for d in dims):
        raise UsageError(f"dims must be positive integers, got {text!r}")
    return dims


def _parse_bounds(args) -> list[ErrorBound]:
    if (args.abs is None) == (args.rel is None):
        raise UsageError("exactly one of --abs or --rel is required")
    mode, text = ("abs", args.abs) if args.abs is not None else ("rel", args.rel)
    bounds = []
    for part in text.split(","):
        try:
            mag = float(part)
        except ValueError:
            raise UsageError(f"bad bound {part!r}")
        try:
            bounds.append(ErrorBound(mode, mag))
        except ValueError as exc:
            raise UsageError(str(exc))
    return bounds


def _single_bound(args) -> ErrorBound:
    bounds = _parse_bounds(args)
    if len(bounds) != 1:
        raise UsageError("this command takes a single bound")
    return bounds[0]


def _compress_fn(mode: str):
    return parallel.parallel_compress if mode == "parallel-sim" else pipeline.compress


def _decompress_fn(mode: str):
    return parallel.parallel_decompress if mode == "parallel-sim" else pipeline.decompress


def _write_report(path: str | None, reports) -> None:
    if not path:
        return
    payload = [r.to_dict() for r in reports] if isinstance(reports, list) else reports.to_dict()
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def cmd_compress(args) -> int:
    desc = DatasetDescriptor(Path(args.input), _parse_dims(args.dims))
    bound = _single_bound(args)
    field = read_raw(desc)
    cfg = pipeline.CompressorConfig(bound, args.block_size, args.mode)
    e = pipeline.resolve_bound(bound, field)

    t0 = time.perf_counter()
    stream = pipeline.compress(field, cfg)
    ct_seconds = time.perf_counter() - t0

    blob = serialize(stream)
    out = Path(args.output)
    out.write_bytes(blob)

    cr = metrics.compression_ratio(field.nbytes, len(blob))
    ct = metrics.throughput(field.n, field.element_size_bytes, ct_seconds)
    report = QualityReport(cr=cr, ct_bytes_per_sec=ct, extra={"e": e, "output": str(out)})
    print(f"cr={cr:.4g} ct_mb_per_sec={ct / 1e6:.4g} e={e:.6g} bytes={len(blob)}")
    _write_report(args.report, report)
    return EXIT_OK


def cmd_decompress(args) -> int:
    data = Path(args.input).read_bytes()
    stream = deserialize(data)

    t0 = time.perf_counter()
    field = _decompress_fn(args.mode)(stream)
    dt_seconds = time.perf_counter() - t0

    write_raw(Path(args.output), field.values)
    dt = metrics.throughput(field.n, field.element_size_bytes, dt_seconds)
    print(f"n={field.n} dims={','.join(map(str, field.dims))} dt_mb_per_sec={dt / 1e6:.4g}")

    if args.original:
        orig = read_raw(DatasetDescriptor(Path(args.original), field.dims))
        err = metrics.max_abs_error(orig, field)
        p = metrics.psnr(orig, field)
        print(f"max_abs_error={err:.6g} psnr_db={p:.4f} e={stream.error_bound:.6g}")
        _write_report(
            args.report,
            QualityReport(
                psnr_db=p,
                max_abs_error=err,
                mse=metrics.mse(orig, field),
                dt_bytes_per_sec=dt,
            ),
        )
        if err > stream.error_bound:
            print("error bound violated", file=sys.stderr)
            return EXIT_BOUND
    return EXIT_OK


def cmd_analyze(args) -> int:
    desc = DatasetDescriptor(Path(args.input), _parse_dims(args.dims))
    field = read_raw(desc)
    bounds = _parse_bounds(args)

    cdf = metrics.block_range_cdf(field, args.block_size)
    print(f"block_range_cdf (block_size={args.block_size}):")
    for threshold, fraction in cdf:
        print(f"  rel_range<={threshold:g}: {fraction:.4f}")

    reports = []
    print(f"{'bound':>12} {'block':>6} {'cr':>9} {'psnr_db':>9}")
    for bound in bounds:
        for bs in SWEEP_BLOCK_SIZES:
            cfg = pipeline.CompressorConfig(bound, bs, args.mode)
            stream = _compress_fn(args.mode)(field, cfg)
            recon = _decompress_fn(args.mode)(stream)
            cr = metrics.compression_ratio(field.nbytes, stream.compressed_size_bytes())
            p = metrics.psnr(field, recon)
            print(f"{bound.mode}:{bound.magnitude:<10g} {bs:>6} {cr:>9.4g} {p:>9.4f}")
            reports.append(
                QualityReport(
                    cr=cr,
                    psnr_db=p,
                    max_abs_error=metrics.max_abs_error(field, recon),
                    block_range_cdf=cdf if bs == args.block_size else None,
                    extra={"bound_mode": bound.mode, "bound": bound.magnitude, "block_size": bs},
                )
            )
    _write_report(args.report, reports)
    return EXIT_OK


def _bench_field(path: Path, dims, bounds, mode, include_io: bool):
    rows = []
    for bound in bounds:
        t_io0 = time.perf_counter()
        field = read_raw(DatasetDescriptor(path, dims))
        cfg = pipeline.CompressorConfig(bound, 128, mode)
        t0 = time.perf_counter()
        stream = _compress_fn(mode)(field, cfg)
        t1 = time.perf_counter()
        recon = _decompress_fn(mode)(stream)
        t2 = time.perf_counter()
        ct_seconds = (t1 - t0) + ((t0 - t_io0) if include_io else 0.0)
        report = QualityReport(
            cr=metrics.compression_ratio(field.nbytes, stream.compressed_size_bytes()),
            psnr_db=metrics.psnr(field, recon),
            max_abs_error=metrics.max_abs_error(field, recon),
            ct_bytes_per_sec=metrics.throughput(field.n, 4, ct_seconds),
            dt_bytes_per_sec=metrics.throughput(field.n, 4, t2 - t1),
            extra={
                "field": path.name,
                "bound_mode": bound.mode,
                "bound": bound.magnitude,
                "nbytes": field.nbytes,
            },
        )
        rows.append(report)
    return rows


def cmd_bench(args) -> int:
    root = Path(args.dataset_dir)
    pattern = args.glob
    files = sorted(root.glob(pattern))
    if not files:
        raise OSError(f"no files matching {pattern!r} in {root}")
    dims = _parse_dims(args.dims)
    bounds = _parse_bounds(args)

    reports = []
    print(f"{'field':<24} {'bound':>12} {'cr':>8} {'psnr_db':>9} {'ct_mb_s':>9} {'dt_mb_s':>9}")
    for path in files:
        for report in _bench_field(path, dims, bounds, args.mode, args.include_io):
            reports.append(report)
            print(
                f"{report.extra['field']:<24} "
                f"{report.extra['bound_mode']}:{report.extra['bound']:<10g} "
                f"{report.cr:>8.4g} {report.psnr_db:>9.4f} "
                f"{report.ct_bytes_per_sec / 1e6:>9.4g} {report.dt_bytes_per_sec / 1e6:>9.4g}"
            )

    for bound in bounds:
        sub = [
            r for r in reports
            if r.extra["bound_mode"] == bound.mode and r.extra["bound"] == bound.magnitude
        ]
        crs = [r.cr for r in sub]
        weighted = sum(r.extra["nbytes"] for r in sub) / sum(
            r.extra["nbytes"] / r.cr for r in sub
        )
        print(
            f"aggregate {bound.mode}:{bound.magnitude:g} "
            f"min={min(crs):.4g} hmean={metrics.harmonic_mean(crs):.4g} "
            f"max={max(crs):.4g} size_weighted={weighted:.4g} (overall = hmean)"
        )
    _write_report(args.report, reports)
    return EXIT_OK


def build_parser() -> _Parser:
    parser = _Parser(prog="ufzx", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, dims_required=True):
        if dims_required:
            p.add_argument("--dims", required=True, help="comma-separated, e.g. 256,384,384")
        p.add_argument("--type", default="f32", choices=["f32"])
        p.add_argument("--abs", default=None, help="absolute bound (comma list where allowed)")
        p.add_argument("--rel", default=None, help="range-relative bound")
        p.add_argument("--block-size", type=int, default=128, dest="block_size")
        p.add_argument("--mode", default="sequential", choices=["sequential", "parallel-sim"])
        p.add_argument("--report", default=None, help="write JSON report(s) to this path")

    p = sub.add_parser("compress", help="compress a raw float32 file to .ufzx")
    p.add_argument("input")
    p.add_argument("output")
    common(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decompress a .ufzx container to raw float32")
    p.add_argument("input")
    p.add_argument("output")
    p.add_argument("--original", default=None, help="raw file to verify quality against")
    p.add_argument("--mode", default="sequential", choices=["sequential", "parallel-sim"])
    p.add_argument("--report", default=None)
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("analyze", help="block range CDF and block-size sweep")
    p.add_argument("input")
    common(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("bench", help="per-field CR/CT/DT/PSNR over a dataset directory")
    p.add_argument("dataset_dir")
    p.add_argument("--glob", default="*.f32", help="file pattern within the directory")
    p.add_argument("--include-io", action="store_true", dest="include_io")
    common(p)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FormatError as exc:
        print(f"format error: {exc}", file=sys.stderr)
        return EXIT_FORMAT
    except (pipeline.ZeroRangeError, DegenerateRangeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
