#!/usr/bin/env python3
"""Compression ratio and PSNR across block sizes for a raw field or synthetic data."""
import argparse

import numpy as np

import ufzx
from ufzx import metrics, synth


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("input", nargs="?", help="raw little-endian float32 file; synthetic if omitted")
    ap.add_argument("--dims", help="comma-separated dims for the raw file")
    ap.add_argument("--n", type=int, default=200_000, help="synthetic field length")
    ap.add_argument("--seed", type=int, default=99)
    ap.add_argument("--rels", default="1e-3,1e-4")
    ap.add_argument("--block-sizes", default="8,16,32,64,128,256")
    args = ap.parse_args()

    if args.input:
        dims = tuple(int(d) for d in args.dims.split(","))
        field = ufzx.DataField(np.fromfile(args.input, dtype="<f4"), dims)
    else:
        rng = np.random.default_rng(args.seed)
        vals = synth.smooth_ridges(rng, args.n)
        field = ufzx.DataField(vals, (len(vals),))

    print(f"{'rel':>8} {'block':>6} {'cr':>9} {'psnr_db':>9}")
    for rel in (float(x) for x in args.rels.split(",")):
        for bs in (int(x) for x in args.block_sizes.split(",")):
            cfg = ufzx.CompressorConfig(ufzx.ErrorBound("rel", rel), bs)
            stream = ufzx.compress(field, cfg)
            out = ufzx.decompress(stream)
            cr = field.nbytes / stream.compressed_size_bytes()
            print(f"{rel:>8g} {bs:>6} {cr:>9.4g} {metrics.psnr(field, out):>9.4f}")


if __name__ == "__main__":
    main()
