#!/usr/bin/env python3
"""Cumulative distribution of per-block relative value range for one or more raw fields.

Small relative block ranges are what make the constant-block path effective; this prints
the fraction of blocks at or below each threshold.
"""
import argparse

import numpy as np

import ufzx
from ufzx import metrics


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("inputs", nargs="+", help="raw little-endian float32 files")
    ap.add_argument("--dims", required=True)
    ap.add_argument("--block-size", type=int, default=8)
    args = ap.parse_args()

    dims = tuple(int(d) for d in args.dims.split(","))
    for path in args.inputs:
        field = ufzx.DataField(np.fromfile(path, dtype="<f4"), dims)
        cdf = metrics.block_range_cdf(field, args.block_size)
        row = "  ".join(f"<= {t:g}: {frac:.3f}" for t, frac in cdf)
        print(f"{path}: {row}")


if __name__ == "__main__":
    main()
