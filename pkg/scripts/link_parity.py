"""Framing component a - b and parity of the links L_d, with the isoclinic cross-check.

    python3 scripts/link_parity.py --d 1 2 3 4 5 6 --cross-check
"""
import argparse

from regulink.link import link_class


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, nargs="+", default=[1, 2, 3, 4, 5, 6])
    ap.add_argument("--samples", type=int, default=200_000)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--cross-check", action="store_true")
    args = ap.parse_args()

    print("d  a-b raw     stderr   rounded  mod2  (a, b)")
    for d in args.d:
        lc = link_class(d, args.samples, args.seed, cross_check=args.cross_check, strict=False)
        c = lc.component
        pair = lc.pair.as_tuple() if lc.pair else "-"
        print(f"{d:<2d} {c.raw:<11.5f} {c.stderr:<8.4f} {c.rounded:<8d} {lc.mod2:<5d} {pair}")


if __name__ == "__main__":
    main()
