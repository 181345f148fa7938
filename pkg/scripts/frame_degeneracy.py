"""Where the two normal-frame conventions lose rank.

For each d, reports min |det| / (|x|^2 + |v^d|^2)^2 over random S^3 points and
|det| at constructed points of {x^2 + v^(2d) = 0}, for both conventions.

    python3 scripts/frame_degeneracy.py --d 1 2 3
"""
import argparse

import numpy as np

from regulink.link import degeneracy_report


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--samples", type=int, default=100_000)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    print("d  convention  min_ratio   max|det| on locus  locus residual")
    for d in args.d:
        for conv in ("paper", "conjugate"):
            r = degeneracy_report(d, conv, args.samples, args.seed)
            print(f"{d:<2d} {conv:<11s} {r.min_ratio:<11.3e} "
                  f"{np.max(np.abs(r.locus_det)):<18.3e} {r.locus_residual:.1e}")


if __name__ == "__main__":
    main()
