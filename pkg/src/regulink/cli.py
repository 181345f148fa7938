"""``regulink`` command line.

Exit codes: 0 pass, 1 a check failed, 2 usage, 3 I/O, 4 numerically inconclusive.
"""
from __future__ import annotations

import argparse
import os
import sys
import time

import numpy as np

from . import link, maps
from .curves import TraceConfig, trace_preimage, write_loops
from .errors import DomainError, InconclusiveError, NotRegularError
from .invariants import MIN_DEGREE_SAMPLES, degree
from .report import Check, RunReport, dump_reports
from .so4 import pair_degrees
from .verify import SUITES, VerifyConfig, chart_checks, hopf_checks, run_suites

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4
MAX_LINK_D = 6


class UsageError(Exception):
    pass


def _check_writable(path):
    if path is None or path == "-":
        return
    parent = os.path.dirname(os.path.abspath(path)) or "."
    if os.path.isdir(path) or not os.path.isdir(parent) or not os.access(parent, os.W_OK):
        raise OSError(f"cannot write to {path}")


def _emit(reports, args):
    for r in reports:
        for line in r.summary_lines():
            print(line)
    if args.json == "-":
        for r in reports:
            print(r.to_json())
    elif args.json:
        dump_reports(args.json, reports)
    if any(r.inconclusive for r in reports if not r.passed):
        return EXIT_INCONCLUSIVE
    return EXIT_OK if all(r.passed for r in reports) else EXIT_FAIL


def _trace_cfg(args):
    if not 1e-4 <= args.step <= 5e-2:
        raise UsageError("--step must lie in [1e-4, 5e-2]")
    if args.samples < 10:
        raise UsageError("--samples (seed budget) must be at least 10")
    return TraceConfig(step=args.step, seed_budget=args.samples, seed=args.seed)


# ---------------------------------------------------------------- commands

def cmd_hopf(args):
    if args.m < 1:
        raise UsageError("--m must be a positive integer")
    cfg = VerifyConfig(seed=args.seed, trace=_trace_cfg(args), pairs=args.pairs)
    t0 = time.perf_counter()
    rep = RunReport("hopf", {"m": args.m, "pairs": args.pairs, "step": args.step},
                    args.seed, args.samples)
    hopf_checks(rep, args.m, cfg)
    rep.elapsed_ms = 1e3 * (time.perf_counter() - t0)
    return [rep]


def degree_registry(key, m=None, d=None):
    """Map a registry key (``identity``, ``pow:m``, ``eval-frame:d``, ``left-mult``)
    to ``(S^3-valued map, SO(4)-valued map or None, expected degree or None)``."""
    name, _, param = key.partition(":")
    try:
        if name == "identity":
            return maps.identity(), None, 1
        if name == "pow":
            m = int(param) if param else m
            if m is None or m < 1:
                raise UsageError("pow needs a positive parameter, e.g. pow:3")
            return maps.power(m), None, m
        if name == "eval-frame":
            d = int(param) if param else d
            if d is None or not 1 <= d <= MAX_LINK_D:
                raise UsageError(f"eval-frame needs 1 <= d <= {MAX_LINK_D}, e.g. eval-frame:2")
            F = link.frame_map(d)
            return maps.column(F), F, None
        if name == "left-mult":
            F = maps.left_multiplication()
            return maps.column(F), F, 1
    except ValueError:
        raise UsageError(f"bad parameter in {key!r}") from None
    raise UsageError(f"unknown map {key!r}; choose identity, pow:m, eval-frame:d or left-mult")


def cmd_degree(args):
    if args.samples < MIN_DEGREE_SAMPLES:
        raise UsageError(f"--samples must be at least {MIN_DEGREE_SAMPLES}")
    f, F, expected = degree_registry(args.map, args.m, args.d)
    t0 = time.perf_counter()
    rep = RunReport("degree", {"map": f.name, "pair_degrees": args.pair_degrees},
                    args.seed, args.samples)
    est = degree(f, args.samples, args.seed, args.workers, strict=False)
    rep.add(Check.from_estimate(f"degree({f.name})", "degree-estimator", est, expected))
    rep.inconclusive = not est.accepted
    if args.pair_degrees and F is not None:
        pd = pair_degrees(F, args.samples, args.seed, args.workers, strict=False)
        rep.add(Check.from_estimate(f"left degree({F.name})", "isoclinic-pair-degrees", pd.a))
        rep.add(Check.from_estimate(f"right degree({F.name})", "isoclinic-pair-degrees", pd.b))
        rep.add(Check(f"a - b of {F.name}", "isoclinic-pair-degrees", pd.s3_component,
                      pd.s3_component, None, None, pd.s3_component == est.rounded))
        rep.inconclusive |= not (pd.a.accepted and pd.b.accepted)
    rep.elapsed_ms = 1e3 * (time.perf_counter() - t0)
    return [rep]


def cmd_link_class(args):
    if not 1 <= args.d <= MAX_LINK_D:
        raise UsageError(f"--d must lie in [1, {MAX_LINK_D}]")
    if args.samples < MIN_DEGREE_SAMPLES:
        raise UsageError(f"--samples must be at least {MIN_DEGREE_SAMPLES}")
    d = args.d
    t0 = time.perf_counter()
    params = {"d": d, "convention": args.convention, "invariant_convention": "conjugate",
              "cross_check": args.cross_check}
    rep = RunReport("link-class", params, args.seed, args.samples)
    chart_checks(rep, VerifyConfig(seed=args.seed, chart_d=(d,)))
    if args.convention == "paper":
        dg = link.degeneracy_report(d, "paper", 100_000, args.seed)
        rep.add(Check.bound(f"literal frame |det| on x^2+v^(2d)=0, d={d}",
                            "literal-frame-degenerates", float(np.max(np.abs(dg.locus_det))), 1e-8))
    lc = link.link_class(d, args.samples, args.seed, args.cross_check, args.workers, strict=False)
    c = lc.component
    rep.add(Check(f"pi3(S^3) component d={d}", "framing-component-is-d", c.raw, c.rounded,
                  c.residual, c.stderr, c.accepted and lc.consistent))
    rep.add(Check(f"mod-2 class d={d}", "image-class-is-d-mod-2", lc.mod2, lc.mod2, None, None,
                  lc.mod2 == d % 2))
    rep.add(Check.flag("orientation swap applied", "frame-orientation-normalised", True,
                       raw=int(lc.swapped)))
    rep.inconclusive = not c.accepted
    if lc.pair is not None:
        pd = lc.pair
        rep.add(Check.from_estimate("left degree of frame map", "isoclinic-pair-degrees", pd.a))
        rep.add(Check.from_estimate("right degree of frame map (unanchored)",
                                    "isoclinic-pair-degrees", pd.b))
        rep.add(Check(f"a - b cross-check d={d}", "framing-component-is-d", pd.s3_component,
                      pd.s3_component, None, None, pd.s3_component == c.rounded))
        rep.inconclusive |= not (pd.a.accepted and pd.b.accepted)
    if args.out:
        link.write_frame_table(args.out, d, "conjugate", seed=args.seed)
    rep.elapsed_ms = 1e3 * (time.perf_counter() - t0)
    return [rep]


def _parse_value(text):
    try:
        v = np.array([float(s) for s in text.replace(",", " ").split()])
    except ValueError:
        raise UsageError(f"--value must be three numbers, got {text!r}") from None
    if v.shape != (3,) or np.linalg.norm(v) == 0:
        raise UsageError("--value must be a nonzero 3-vector")
    return v / np.linalg.norm(v)


class TraceFailure(Exception):
    pass


def cmd_trace(args):
    if args.m < 1:
        raise UsageError("--m must be a positive integer")
    cfg = _trace_cfg(args)
    v = _parse_value(args.value)
    f = maps.hopf_composite(args.m)
    t0 = time.perf_counter()
    loops = trace_preimage(f, v, cfg)
    rep = RunReport("trace", {"m": args.m, "value": v.tolist(), "step": cfg.step,
                              "out": args.out}, args.seed, args.samples)
    if not loops:
        raise TraceFailure(f"no preimage of {v.tolist()} located with {args.samples} seeds")
    rep.add(Check("components", "preimage-of-regular-value", len(loops), len(loops),
                  None, None, True))
    for k, L in enumerate(loops):
        rep.add(Check.bound(f"closure gap of loop {k}", "preimage-of-regular-value",
                            L.closure, cfg.step))
    if args.out:
        write_loops(args.out, loops, {"map": f.name, "value": " ".join(map(repr, v.tolist())),
                                      "step": cfg.step, "seed": args.seed})
    rep.elapsed_ms = 1e3 * (time.perf_counter() - t0)
    return [rep]


def cmd_verify(args):
    if args.samples < MIN_DEGREE_SAMPLES:
        raise UsageError(f"--samples must be at least {MIN_DEGREE_SAMPLES}")
    cfg = VerifyConfig(samples=args.samples, seed=args.seed, workers=args.workers,
                       trace=TraceConfig(step=args.step, seed=args.seed))
    return run_suites(args.suite, cfg)


# ---------------------------------------------------------------- parser

def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", metavar="PATH", help="write the JSON report here ('-' for stdout)")
    common.add_argument("--workers", type=int, default=None,
                        help="worker threads (default: $REGULINK_WORKERS or all cores)")

    p = argparse.ArgumentParser(prog="regulink", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    h = sub.add_parser("hopf", parents=[common], help="Hopf invariant of eval_N o mu_m")
    h.add_argument("--m", type=int, default=1)
    h.add_argument("--samples", type=int, default=2000, help="seed budget for fibre search")
    h.add_argument("--step", type=float, default=5e-3)
    h.add_argument("--pairs", type=int, default=3, choices=range(1, 11), metavar="K")
    h.set_defaults(func=cmd_hopf)

    d = sub.add_parser("degree", parents=[common], help="degree of a registered map S^3 -> S^3")
    d.add_argument("map", help="identity | pow:m | eval-frame:d | left-mult")
    d.add_argument("--m", type=int)
    d.add_argument("--d", type=int)
    d.add_argument("--samples", type=int, default=200_000)
    d.add_argument("--pair-degrees", action="store_true",
                   help="also split SO(4)-valued maps into left/right degrees")
    d.set_defaults(func=cmd_degree)

    lc = sub.add_parser("link-class", parents=[common], help="framing class of the link L_d")
    lc.add_argument("--d", type=int, required=True)
    lc.add_argument("--convention", choices=("paper", "conjugate"), default="conjugate")
    lc.add_argument("--samples", type=int, default=200_000)
    lc.add_argument("--cross-check", action="store_true", help="also compute pair degrees")
    lc.add_argument("--out", metavar="PATH", help="write a frame table here")
    lc.set_defaults(func=cmd_link_class)

    t = sub.add_parser("trace", parents=[common], help="trace the fibre of eval_N o mu_m")
    t.add_argument("--m", type=int, default=1)
    t.add_argument("--value", default="1,0,0",
                   help="target point of S^2, e.g. '0,0,1' (use --value=-1,0,0 for a leading minus)")
    t.add_argument("--samples", type=int, default=2000, help="seed budget")
    t.add_argument("--step", type=float, default=5e-3)
    t.add_argument("--out", metavar="PATH", help="write the loops as a vertex table")
    t.set_defaults(func=cmd_trace)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("suite", choices=("all",) + SUITES)
    v.add_argument("--samples", type=int, default=200_000)
    v.add_argument("--step", type=float, default=5e-3)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    if args.workers is not None and args.workers < 1:
        print("regulink: --workers must be positive", file=sys.stderr)
        return EXIT_USAGE
    try:
        _check_writable(args.json)
        _check_writable(getattr(args, "out", None))
        reports = args.func(args)
        return _emit(reports, args)
    except UsageError as exc:
        print(f"regulink: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NotRegularError, TraceFailure) as exc:
        print(f"regulink: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except InconclusiveError as exc:
        print(f"regulink: inconclusive: {exc}", file=sys.stderr)
        return EXIT_INCONCLUSIVE
    except DomainError as exc:
        print(f"regulink: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"regulink: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
