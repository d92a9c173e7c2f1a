#!/usr/bin/env python3
"""Sweep the byte-alignment space overhead over synthetic smooth fields.

Prints min / mean / max overhead per (bound, block size) cell, mirroring the
shift-overhead characterization the bench suite asserts against.
"""
import argparse

import numpy as np

import ufzx
from ufzx import metrics, synth


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--fields", type=int, default=100)
    ap.add_argument("--n", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=1234)
    ap.add_argument("--rels", default="1e-3,1e-4,1e-5")
    ap.add_argument("--block-sizes", default="64,128,256")
    args = ap.parse_args()

    rels = [float(x) for x in args.rels.split(",")]
    block_sizes = [int(x) for x in args.block_sizes.split(",")]
    rng = np.random.default_rng(args.seed)
    fields = [synth.smooth_ridges(rng, args.n) for _ in range(args.fields)]

    print(f"{'rel':>8} {'block':>6} {'min%':>8} {'mean%':>8} {'max%':>8}")
    for rel in rels:
        for bs in block_sizes:
            fracs = []
            for vals in fields:
                field = ufzx.DataField(vals, (len(vals),))
                _, acct = ufzx.compress_with_accounting(
                    field, ufzx.CompressorConfig(ufzx.ErrorBound("rel", rel), bs)
                )
                fracs.append(metrics.shift_overhead(acct))
            fracs = np.array(fracs) * 100
            print(
                f"{rel:>8g} {bs:>6} {fracs.min():>8.3f} {fracs.mean():>8.3f} "
                f"{fracs.max():>8.3f}"
            )


if __name__ == "__main__":
    main()
