#!/usr/bin/env python3
"""Write synthetic raw float32 fields for exercising the CLI and bench command."""
import argparse
from pathlib import Path

import numpy as np

from ufzx import synth

GENERATORS = {
    "noise": lambda rng, n: synth.white_noise(rng, n, width=1.0),
    "walk": lambda rng, n: synth.random_walk(rng, n, step=0.01),
    "plateaus": lambda rng, n: synth.plateaus(rng, n, n_levels=8),
    "ridges": synth.smooth_ridges,
}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("outdir")
    ap.add_argument("--n", type=int, default=1_000_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--kinds", default=",".join(GENERATORS))
    args = ap.parse_args()

    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    rng = np.random.default_rng(args.seed)
    for kind in args.kinds.split(","):
        vals = GENERATORS[kind](rng, args.n)
        path = out / f"{kind}.f32"
        vals.astype("<f4").tofile(path)
        print(f"{path}: n={args.n} ({4 * args.n} bytes)")
    print(f"example: ufzx bench {out} --dims {args.n} --rel 1e-3")


if __name__ == "__main__":
    main()
