"""Lopatinsky sweep over random admissible media; prints the worst cases.

    python scripts/symbol_sweep.py --samples 200 --seed 1
    python scripts/symbol_sweep.py --anisotropic-divergence
"""
import argparse
import time

import numpy as np

from maxwell_elliptic.symbol_check import KERNEL_THRESHOLD, media_sweep


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--samples", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--n-sigma", type=int, default=64)
    ap.add_argument("--sigma-scale", type=float, default=1.0)
    ap.add_argument("--anisotropic-divergence", action="store_true",
                    help="use div(eps E) instead of div E in the principal part")
    ap.add_argument("--worst", type=int, default=5)
    ap.add_argument("--csv")
    args = ap.parse_args(argv)

    t0 = time.perf_counter()
    rep = media_sweep(args.samples, args.seed, n_sigma=args.n_sigma, sigma_scale=args.sigma_scale,
                      anisotropic_divergence=args.anisotropic_divergence)
    dt = time.perf_counter() - t0
    print(f"{len(rep.rows)} tests in {dt:.1f} s, verdict: {rep.verdict()}")
    print(f"min singular value {rep.min_singular_value:.4e} (threshold {KERNEL_THRESHOLD:g})")
    for surface in ("interface", "boundary"):
        for block in ("E", "H"):
            vals = np.array([r.min_singular_value for r in rep.rows
                             if r.surface == surface and r.block == block])
            print(f"  {surface:9s} {block}: min {vals.min():.4e}  median {np.median(vals):.4e}")
    print("worst cases:")
    for r in sorted(rep.rows, key=lambda r: r.min_singular_value)[:args.worst]:
        print(f"  sample {r.sample:4d} angle {r.angle:6.3f} {r.surface:9s} {r.block} "
              f"{r.min_singular_value:.4e}")
    if args.csv:
        rep.write_csv(args.csv)


if __name__ == "__main__":
    main()
