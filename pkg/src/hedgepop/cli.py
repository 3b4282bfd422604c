"""Command-line interface.

Exit codes: 0 success, 1 failed verification, 2 bad arguments or input,
3 solver failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .appendix import SAFE_PROBE, median_agent_reversal, weighted_average_counterexample
from .errors import HedgeError, RejectionBudgetExceeded, SolverError
from .lottery import ChoiceProblem, arithmetic_mean, harmonic_mean, parse_lottery
from .preferences import describe, parse_spec_list
from .report import RunManifest, write_report
from .sampling import parse_sampler
from .simulation import DEFAULT_GENERATIONS, FULL_SCALE_GENERATIONS, SimulationConfig, run_simulation
from .solver import agent_ce, optimal_cdf, optimal_share

EXIT_VERIFY = 1
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_IO = 4

class UsageError(Exception):
    pass

def cmd_alpha_star(args) -> int:
    y = parse_lottery(args.risky)
    res = optimal_share(ChoiceProblem(y, args.safe))
    print(f"alpha_star: {res.alpha_star:.12f}")
    print(f"boundary: {res.boundary.value}")
    print(f"growth_at_optimum: {res.growth_at_optimum:.12f}")
    return 0

def cmd_ce(args) -> int:
    y = parse_lottery(args.risky)
    if not 0.0 <= args.agent <= 1.0:
        raise UsageError("--agent must lie in [0, 1]")
    print(f"{agent_ce(args.agent, y):.12f}")
    return 0

def cmd_cdf(args) -> int:
    y = parse_lottery(args.risky)
    if y.is_degenerate:
        raise UsageError("cdf needs a nondegenerate lottery")
    if args.points < 2:
        raise UsageError("--points must be at least 2")
    hm, mean = harmonic_mean(y), arithmetic_mean(y)
    pad = args.pad * (mean - hm)
    grid = np.linspace(max(hm - pad, 1e-12), mean + pad, args.points)
    # the support endpoints are always emitted exactly
    xs = sorted(set(grid.tolist()) | {hm, mean} - {0.0})
    lines = ["x,cdf"] + [f"{x!r},{optimal_cdf(y, x)!r}" for x in xs]
    text = "\n".join(lines) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0

def cmd_simulate(args) -> int:
    generations = FULL_SCALE_GENERATIONS if args.full_scale else args.generations
    if generations < 1:
        raise UsageError("--generations must be positive")
    if not 0 <= args.seed < 2**64:
        raise UsageError("--seed must be a 64-bit unsigned integer")
    specs = [s for item in args.specs for s in parse_spec_list(item)]
    sampler = parse_sampler(args.sampler, seed=args.seed, base=args.cond_base)
    cfg = SimulationConfig(generations, sampler, tuple(specs))

    t0 = time.perf_counter()
    report = run_simulation(cfg, workers=args.workers)
    duration = time.perf_counter() - t0
    manifest = RunManifest.for_run(cfg, duration_s=duration, workers=args.workers)

    written = write_report(args.out, report, manifest, args.format)
    if not args.quiet:
        print(f"{'distribution':<50} {'mean alpha':>10} {'growth':>8} {'loss':>8}")
        for spec, row in zip(specs, report.rows):
            print(f"{describe(spec):<50} {row.mean_alpha:>10.3f} {row.gm_growth:>8.4f} {100 * row.relative_loss:>7.2f}%")
        print(f"optimal growth {report.gm_growth_optimal:.4f}; {generations} generations in {duration:.1f}s")
        for p in written:
            print(f"wrote {p}")
    return 0

def cmd_verify_appendix(args) -> int:
    ok = True
    rev = median_agent_reversal()
    print("median agent of the optimal population:")
    for name, value in (("L", rev.ce_l), ("M", rev.ce_m), ("X", rev.ce_x), ("Y", rev.ce_y)):
        print(f"  CE({name}) = {value:.6f}")
    for label, cond in (
        ("CE(L) > CE(M)", rev.prefers_l_to_m),
        (f"CE(X) < {SAFE_PROBE} < CE(Y)", rev.prefers_y_to_x),
    ):
        print(f"  {'PASS' if cond else 'FAIL'}  {label}")
        ok &= cond

    beta = 0.5
    print(f"weighted-average agent, beta={beta}:")
    checks = weighted_average_counterexample(beta)
    for c in checks:
        print(f"  {'PASS' if c.passed else 'FAIL'}  {c.name} = {c.value:.12f} (closed form {c.expected:.12f})")
        ok &= c.passed
    reversal = checks[2].value != checks[3].value
    print(f"  {'PASS' if reversal else 'FAIL'}  CE(L)=CE(M) but CE(L/2+N/2) != CE(M/2+N/2)")
    ok &= reversal

    print("PASS" if ok else "FAIL")
    return 0 if ok else EXIT_VERIFY

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="hedgepop", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("alpha-star", help="growth-optimal risky share")
    p.add_argument("--risky", required=True, help="lottery as v1:p1,v2:p2,...")
    p.add_argument("--safe", required=True, type=float)
    p.set_defaults(func=cmd_alpha_star)

    p = sub.add_parser("ce", help="certainty equivalent of agent a in the optimal population")
    p.add_argument("--agent", required=True, type=float, help="agent index in [0, 1]; 0.5 is the median agent")
    p.add_argument("--risky", required=True)
    p.set_defaults(func=cmd_ce)

    p = sub.add_parser("cdf", help="optimal CE distribution of a lottery as x,cdf rows")
    p.add_argument("--risky", required=True)
    p.add_argument("--points", type=int, default=111)
    p.add_argument("--pad", type=float, default=0.05, help="grid padding as a fraction of E - HM")
    p.add_argument("--out", help="output path (default stdout)")
    p.set_defaults(func=cmd_cdf)

    p = sub.add_parser("simulate", help="Monte Carlo comparison of preference distributions")
    p.add_argument("--generations", type=int, default=DEFAULT_GENERATIONS)
    p.add_argument("--full-scale", action="store_true", help=f"run {FULL_SCALE_GENERATIONS} generations")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--sampler", default="main", help="main | gm-ratio | cond:<k>,<i> | cond:gm-mu-e")
    p.add_argument("--cond-base", default="main", choices=("main", "gm-ratio"))
    p.add_argument("--specs", nargs="+", default=["default15"], help="default15 or encodings such as crra:1 het-crra:1,1")
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--out", required=True)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("-q", "--quiet", action="store_true")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify-appendix", help="recompute the independence-axiom counterexamples")
    p.set_defaults(func=cmd_verify_appendix)
    return parser

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING)
    try:
        return args.func(args)
    except (SolverError, RejectionBudgetExceeded) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except (UsageError, HedgeError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO

if __name__ == "__main__":
    sys.exit(main())
