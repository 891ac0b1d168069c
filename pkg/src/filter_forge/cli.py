"""Command-line front end.

Subcommands: ``optimize`` (fit a filter under a step weight, optionally
box-constrained), ``eval`` (sample a filter curve), ``rates`` (worst-case
rate table), ``design-weight`` (derivative-free weight search) and
``simulate`` (subspace-iteration benchmark on synthetic problems).
Reports are CSV; each report also renders a PNG figure alongside unless
--no-plot is given.  Exit codes: 0 success, 1 numeric failure
(non-convergence), 2 usage or input errors.
"""

from __future__ import annotations

import argparse
import csv
import os
import sys

import numpy as np

from .design import GAMMA_SLISE_PARAMETERS, design_weight, realize
from .filters import (
    FilterDomainError,
    builtin_filter,
    builtin_filter_names,
    load_filter,
    sample_curve,
    save_filter,
)
from .optimize import OptimizationError, OptimizerConfig, Termination
from .pipeline import DEFAULT_GAPS, DEFAULT_POLE_PAIRS, optimize_filter, rate_table
from .simulate import benchmark_rows, clustered_spectrum, generate_problem
from .weights import builtin_weight, builtin_weight_names, load_weight, save_weight

_RANKING_FILTERS = ("enhanced-gamma-slise16", "gamma-slise16", "gauss-legendre16")


class InputError(Exception):
    """User-facing configuration problem (exit code 2)."""


def _resolve_filter(spec: str):
    if spec.endswith(".json") or os.path.sep in spec:
        if not os.path.exists(spec):
            raise InputError(f"filter file not found: {spec}")
        return load_filter(spec)
    try:
        return builtin_filter(spec)
    except LookupError as exc:
        raise InputError(str(exc)) from None


def _resolve_weight(spec: str):
    if spec.endswith(".json") or os.path.sep in spec:
        if not os.path.exists(spec):
            raise InputError(f"weight file not found: {spec}")
        return load_weight(spec)
    try:
        return builtin_weight(spec)
    except LookupError as exc:
        raise InputError(str(exc)) from None


def _write_csv(path, header, rows) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for row in rows:
            writer.writerow([c if isinstance(c, (str, int, bool)) else repr(float(c))
                             for c in row])


def _plot_path(out: str) -> str:
    return os.path.splitext(out)[0] + ".png"


def cmd_optimize(args) -> int:
    weight = _resolve_weight(args.weight)
    start = _resolve_filter(args.start)
    config = OptimizerConfig(
        max_iterations=args.max_iterations,
        max_evaluations=args.budget,
        gradient_tolerance=args.tol,
    )
    try:
        filt, report = optimize_filter(weight, start, lb=args.lb, config=config)
    except (FilterDomainError, OptimizationError) as exc:
        raise InputError(str(exc)) from None
    save_filter(filt, args.out)
    if args.trace:
        report.write_trace(args.trace)
        if not args.no_plot:
            from .plotting import save_trace_plot

            save_trace_plot(report.trace, _plot_path(args.trace))
    print(f"final loss {report.final_loss:.6e} after {report.loss_evaluations} "
          f"loss evaluations ({report.termination.value}); filter written to {args.out}")
    if report.termination in (Termination.MAX_ITER, Termination.MAX_EVAL):
        print("warning: optimization stopped on budget before converging", file=sys.stderr)
        return 1
    return 0


def cmd_eval(args) -> int:
    filt = _resolve_filter(args.filter)
    if args.samples < 2:
        raise InputError(f"--samples must be at least 2, got {args.samples}")
    if not args.min < args.max:
        raise InputError(f"empty range [{args.min}, {args.max}]")
    x, values = sample_curve(filt, args.min, args.max, args.samples)
    _write_csv(args.out, ["x", "value"], zip(x, values))
    if not args.no_plot:
        from .plotting import save_curve_plot

        save_curve_plot(x, values, _plot_path(args.out), label=args.filter)
    print(f"{args.samples} samples written to {args.out}")
    return 0


def cmd_rates(args) -> int:
    gaps = _parse_floats(args.gaps, "--gaps")
    poles = _parse_ints(args.poles, "--poles")
    bad = [p for p in poles if p % 4 != 0 or p <= 0]
    if bad:
        raise InputError(f"pole counts must be positive multiples of 4, got {bad}")
    config = OptimizerConfig(max_iterations=300, max_evaluations=args.budget)
    rows = rate_table(gaps, [p // 4 for p in poles], config=config)
    _write_csv(args.out, ["G", "poles", "filter", "worst_case_rate"],
               [(r["G"], r["poles"], r["filter"], r["worst_case_rate"]) for r in rows])
    if not args.no_plot:
        from .plotting import save_rates_plot

        save_rates_plot(rows, _plot_path(args.out))
    print(f"{len(rows)} rates written to {args.out}")
    return 0


def cmd_design_weight(args) -> int:
    if args.poles % 4 != 0 or args.poles <= 0:
        raise InputError(f"--poles must be a positive multiple of 4, got {args.poles}")
    if args.budget < 1:
        raise InputError(f"--budget must be positive, got {args.budget}")
    best, report = design_weight(
        GAMMA_SLISE_PARAMETERS, args.gap, args.poles // 4, args.budget, log_path=args.log
    )
    save_weight(realize(best), args.out)
    if args.log and not args.no_plot:
        with open(args.log, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        from .plotting import save_design_plot

        save_design_plot([int(r["evaluation"]) for r in rows],
                         [float(r["objective"]) for r in rows], _plot_path(args.log))
    print(f"designed weight written to {args.out}; objective {report.final_loss:.6e} "
          f"after {report.loss_evaluations} evaluations")
    return 0


def cmd_simulate(args) -> int:
    if args.multiplier < 1.0:
        raise InputError(f"--multiplier must be >= 1, got {args.multiplier}")
    if args.problems < 1:
        raise InputError(f"--problems must be positive, got {args.problems}")
    filters = {}
    for name in args.filter.split(","):
        name = name.strip()
        filters[name] = _resolve_filter(name)
    problems = {}
    for i in range(args.problems):
        seed = args.seed + i
        spectrum = clustered_spectrum(args.size, args.interior, seed=seed)
        problems[f"hiep-{args.size}-{seed}"] = generate_problem(spectrum, seed)
    rows = benchmark_rows(problems, filters, args.multiplier, tol=args.tol, seed=args.seed + 1)
    _write_csv(
        args.out,
        ["problem_id", "filter", "N_multiplier", "iterations", "converged",
         "predicted_rate", "measured_rate"],
        [(r["problem_id"], r["filter"], r["N_multiplier"], r["iterations"],
          r["converged"], r["predicted_rate"], r["measured_rate"]) for r in rows],
    )
    if not args.no_plot:
        from .plotting import save_benchmark_plot

        save_benchmark_plot(rows, _plot_path(args.out))
    print(f"{len(rows)} benchmark rows written to {args.out}")
    if not all(r["converged"] for r in rows):
        print("warning: some runs did not converge within the sweep cap", file=sys.stderr)
        return 1
    return 0


def _parse_floats(text: str, flag: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{flag} expects comma-separated numbers, got {text!r}") from None


def _parse_ints(text: str, flag: str) -> list[int]:
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise InputError(f"{flag} expects comma-separated integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="filter-forge",
        description="Rational filter construction, optimization and evaluation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("optimize", help="fit a filter under a step weight")
    p.add_argument("--weight", required=True,
                   help=f"builtin weight ({', '.join(builtin_weight_names())}) or JSON file")
    p.add_argument("--start", required=True,
                   help=f"builtin filter ({', '.join(builtin_filter_names())}) or JSON file")
    p.add_argument("--lb", type=float, default=None,
                   help="lower bound on |Im w| (box-constrained when given)")
    p.add_argument("--tol", type=float, default=1e-8, help="projected-gradient tolerance")
    p.add_argument("--budget", type=int, default=20000, help="loss evaluation budget")
    p.add_argument("--max-iterations", type=int, default=500)
    p.add_argument("--out", default="filter.json", help="output filter file")
    p.add_argument("--trace", default=None, help="optional iteration trace CSV")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(fn=cmd_optimize)

    p = sub.add_parser("eval", help="sample a filter curve to CSV")
    p.add_argument("--filter", required=True, help="builtin filter name or JSON file")
    p.add_argument("--min", type=float, default=-2.0)
    p.add_argument("--max", type=float, default=2.0)
    p.add_argument("--samples", type=int, default=501)
    p.add_argument("--out", default="curve.csv")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(fn=cmd_eval)

    p = sub.add_parser("rates", help="worst-case rate table over a (gap x poles) grid")
    p.add_argument("--gaps", default=",".join(str(g) for g in DEFAULT_GAPS))
    p.add_argument("--poles", default=",".join(str(4 * m) for m in DEFAULT_POLE_PAIRS))
    p.add_argument("--budget", type=int, default=2000, help="inner optimizer budget")
    p.add_argument("--out", default="rates.csv")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(fn=cmd_rates)

    p = sub.add_parser("design-weight", help="search step-weight parameters")
    p.add_argument("--gap", type=float, default=0.95)
    p.add_argument("--poles", type=int, default=16)
    p.add_argument("--budget", type=int, default=60, help="objective evaluation budget")
    p.add_argument("--out", default="weight.json", help="output weight file")
    p.add_argument("--log", default="design.csv", help="per-evaluation design log CSV")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(fn=cmd_design_weight)

    p = sub.add_parser("simulate", help="subspace-iteration benchmark on synthetic problems")
    p.add_argument("--size", type=int, default=200)
    p.add_argument("--interior", type=int, default=20)
    p.add_argument("--multiplier", type=float, default=1.1,
                   help="subspace width as a multiple of the interior count (>= 1)")
    p.add_argument("--filter", default=",".join(_RANKING_FILTERS),
                   help="comma-separated filter names/files")
    p.add_argument("--seed", type=int, default=1)
    p.add_argument("--problems", type=int, default=1)
    p.add_argument("--tol", type=float, default=1e-13)
    p.add_argument("--out", default="benchmark.csv")
    p.add_argument("--no-plot", action="store_true")
    p.set_defaults(fn=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (FileNotFoundError, ValueError, LookupError, FilterDomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (OptimizationError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
