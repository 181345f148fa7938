"""Hopf invariants of eval_N o mu_m over several regular-value pairs.

    python3 scripts/hopf_table.py --m 1 2 3 --pairs 3
"""
import argparse
import time

from regulink import maps
from regulink.curves import TraceConfig
from regulink.invariants import hopf_invariant, random_regular_pairs


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--m", type=int, nargs="+", default=[1, 2, 3])
    ap.add_argument("--pairs", type=int, default=3)
    ap.add_argument("--step", type=float, default=5e-3)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = TraceConfig(step=args.step, seed=args.seed)
    print("m  pair  raw         components  link_residual  seconds")
    for m in args.m:
        f = maps.hopf_composite(m)
        for k, (v1, v2) in enumerate(random_regular_pairs(f, args.pairs, args.seed, cfg)):
            t0 = time.perf_counter()
            est = hopf_invariant(f, v1, v2, cfg)
            print(f"{m:<2d} {k:<5d} {est.raw:<11.8f} {str(est.meta['components']):<11s} "
                  f"{est.meta['link_residual']:<14.2e} {time.perf_counter() - t0:.1f}")


if __name__ == "__main__":
    main()
