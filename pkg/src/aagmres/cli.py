"""Command-line interface: ``solve``, ``diagnose``, ``verify`` and ``generate``.

Exit codes
----------
0   success (``solve``: residual tolerance met; ``verify``: every relation passed)
1   ``verify``: at least one relation failed
2   ``solve``: stagnation detected
3   ``solve``: iteration limit or breakdown
64  usage error (bad flags, malformed --problem string, invalid parameters)
74  file could not be read or written
"""

from __future__ import annotations

import argparse
import math
import sys
from pathlib import Path

import numpy as np

from .diagnostics import DEFAULT_VERIFY_TOL, SUITES, classify, run_verification
from .fileio import MatrixMarketError, export_trace, parse_problem_spec, write_matrix_market, write_vector
from .generators import GENERATORS, generate_problem
from .solvers import (
    MixingSchedule,
    SolveConfig,
    Termination,
    anderson_run,
    fixed_point_run,
    gmres_run,
    optimized_anderson_run,
    simple_mixing_run,
)

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_STAGNATION = 2
EXIT_NOT_CONVERGED = 3
EXIT_USAGE = 64
EXIT_IO = 74

SOLVE_EXIT = {
    Termination.RESIDUAL_TOL_MET: EXIT_OK,
    Termination.STAGNATION_DETECTED: EXIT_STAGNATION,
    Termination.MAX_ITER: EXIT_NOT_CONVERGED,
    Termination.BREAKDOWN: EXIT_NOT_CONVERGED,
}
METHODS = ("fixed", "simple", "gmres", "anderson", "opt-anderson")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}\n{self.format_usage().rstrip()}")


def _seed(text: str) -> int:
    v = int(text)
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be a 64-bit unsigned integer")
    return v


def _window(text: str) -> float:
    if text == "inf":
        return math.inf
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("window must be a positive integer or inf")
    return v


def _betas(text: str) -> list[float]:
    return [float(s) for s in text.split(",") if s.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="aagmres", description="Anderson mixing and GMRES for A x + b = 0.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def problem_args(p):
        p.add_argument("--problem", required=True,
                       help="generator spec such as cycle:N=6,k=1 or a Matrix Market file for A")
        p.add_argument("--rhs", help="b as a Matrix Market file or comma-separated literal")
        p.add_argument("--x0", help="'zero', 'random(SEED)', a file or a comma-separated literal")
        p.add_argument("--seed", type=_seed, default=0, help="seed for random generators (default 0)")

    s = sub.add_parser("solve", help="run one solver")
    problem_args(s)
    s.add_argument("--method", required=True, choices=METHODS)
    group = s.add_mutually_exclusive_group()
    group.add_argument("--beta", type=float, help="constant mixing parameter (default 1)")
    group.add_argument("--betas", type=_betas, help="comma-separated mixing parameters per step")
    s.add_argument("--window", type=_window, default=math.inf, help="Anderson window m or inf")
    s.add_argument("--max-iter", type=int, default=SolveConfig.max_iter)
    s.add_argument("--tol", type=float, default=SolveConfig.residual_tol, help="absolute residual tolerance")
    s.add_argument("--out", help="export the trace to this path")
    s.add_argument("--format", choices=("csv", "json"), default="csv")

    d = sub.add_parser("diagnose", help="report grade, Anderson index, stagnation index and case")
    problem_args(d)
    d.add_argument("--tol", type=float, default=DEFAULT_VERIFY_TOL)

    v = sub.add_parser("verify", help="check the Anderson/GMRES relations")
    problem_args(v)
    v.add_argument("--suite", choices=SUITES, default="all")
    v.add_argument("--tol", type=float, default=DEFAULT_VERIFY_TOL)

    g = sub.add_parser("generate", help="write a generated problem as Matrix Market files")
    g.add_argument("--name", required=True, choices=GENERATORS)
    g.add_argument("--params", default="", help="comma-separated key=value pairs")
    g.add_argument("--seed", type=_seed, default=0)
    g.add_argument("--out", required=True, help="output directory")
    return parser


def _problem(args):
    spec = parse_problem_spec(args.problem, rhs=args.rhs, x0=args.x0, seed=args.seed)
    return spec.build()


def _solve(args, out) -> int:
    p = _problem(args)
    if args.max_iter < 1 or not args.tol > 0:
        raise UsageError("--max-iter must be >= 1 and --tol positive")
    cfg = SolveConfig(max_iter=args.max_iter, residual_tol=args.tol)
    if args.betas is not None:
        schedule = MixingSchedule.explicit(args.betas)
    else:
        schedule = MixingSchedule.constant(1.0 if args.beta is None else args.beta)
    if args.method == "fixed":
        trace = fixed_point_run(p, cfg)
    elif args.method == "simple":
        if args.betas is not None:
            raise UsageError("simple mixing takes a constant --beta")
        trace = simple_mixing_run(p, schedule.beta(0), cfg)
    elif args.method == "gmres":
        trace = gmres_run(p, cfg)
    elif args.method == "anderson":
        trace = anderson_run(p, schedule, args.window, cfg)
    else:
        trace = optimized_anderson_run(p, cfg)
    print(f"method={trace.method} N={p.n} iterations={trace.steps} "
          f"final_residual={trace.residual_norms[-1]:.6e} termination={trace.termination.value}", file=out)
    if args.out:
        export_trace(trace, args.format, args.out)
    return SOLVE_EXIT[trace.termination]


def _diagnose(args, out) -> int:
    report = classify(_problem(args), tol=args.tol)
    print(report.summary_line(), file=out)
    return EXIT_OK


def _verify(args, out) -> int:
    report = run_verification(_problem(args), args.suite, tol=args.tol)
    print(report.to_text(), file=out)
    return EXIT_OK if report.passed else EXIT_VERIFY_FAILED


def _generate(args, out) -> int:
    params = {}
    for item in filter(None, (s.strip() for s in args.params.split(","))):
        key, eq, val = item.partition("=")
        if not eq:
            raise UsageError(f"parameter {item!r} is not key=value")
        params[key] = val
    spec = parse_problem_spec(f"{args.name}:" + ",".join(f"{k}={v}" for k, v in params.items()),
                              seed=args.seed)
    p = spec.build()
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    write_matrix_market(outdir / "A.mtx", p.A)
    write_vector(outdir / "b.mtx", p.b)
    write_vector(outdir / "x0.mtx", p.x0)
    print(f"wrote {outdir / 'A.mtx'}, {outdir / 'b.mtx'}, {outdir / 'x0.mtx'}", file=out)
    return EXIT_OK


COMMANDS = {"solve": _solve, "diagnose": _diagnose, "verify": _verify, "generate": _generate}


def main(argv=None, out=None, err=None) -> int:
    """Run the CLI and return its exit code."""
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    try:
        args = build_parser().parse_args(argv)
        return COMMANDS[args.command](args, out)
    except UsageError as exc:
        print(exc, file=err)
        return EXIT_USAGE
    except MatrixMarketError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    except OSError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=err)
        return EXIT_USAGE


def _entry() -> None:
    sys.exit(main())
