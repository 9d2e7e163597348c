"""
Command-Line Application for the Fractional Variational Solver
Solves built-in or user-defined problems, reproduces the benchmark table and lists weights and derivatives
"""

import argparse
import sys
from typing import List, Optional

from benchmark_runner import DEFAULT_ROWS, failing_rows, parse_rows, refine_derivative, run_benchmark
from discretizer import CONVENTIONS
from euler_solver import PATHS, SolveOptions, SolverError, solve
from expression_parser import ExprEvalError
from fractional_derivative import SIDES, monomial_derivative
from problem_config import EXPRESSION_TOL_RESIDUAL, ConfigError, ProblemConfigLoader
from result_exporter import (derivative_frame, export_benchmark, export_solution, print_benchmark,
                             print_refinement, print_weights, write_csv)
from special_functions import weight_table
from variational_problem import get_example

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_SOLVER = 3
EXIT_CONFIG = 4


def _order(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid order: {text}")
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"alpha must lie in (0, 1), got {text}")
    return value


def _at_least(minimum: int):
    def parse(text: str) -> int:
        try:
            value = int(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"invalid integer: {text}")
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be at least {minimum}, got {value}")
        return value
    return parse


def _positive(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number: {text}")
    if not value > 0:
        raise argparse.ArgumentTypeError(f"must be positive, got {text}")
    return value


def _non_negative(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid number: {text}")
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative, got {text}")
    return value


def _error(message: str):
    print(f"[ERROR] {message}", file=sys.stderr)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='fracvar',
        description="Euler-like direct method for fractional variational problems")
    commands = parser.add_subparsers(dest='command', required=True)

    p = commands.add_parser('solve', help="Solve a built-in or user-defined problem")
    source = p.add_mutually_exclusive_group(required=True)
    source.add_argument('--example', choices=['1', '2', '3'], help="Built-in problem")
    source.add_argument('--problem', help="Path to a JSON problem file")
    p.add_argument('--n', type=_at_least(3), required=True, help="Number of mesh intervals (>= 3)")
    p.add_argument('--out', help="Output file for the per-node results")
    p.add_argument('--format', choices=['csv', 'json'], default='csv')
    p.add_argument('--force-path', choices=PATHS, default='auto')
    p.add_argument('--tol', type=_positive, help="Residual tolerance")
    p.add_argument('--convention', choices=CONVENTIONS, default='generic')
    p.add_argument('--verbose', action='store_true')

    p = commands.add_parser('benchmark', help="Reproduce the error/run-time table")
    p.add_argument('--rows', help="Rows as example:n pairs, e.g. 1:5,3:90")
    p.add_argument('--out', help="Output file for the table")
    p.add_argument('--format', choices=['csv', 'md'], default='csv')
    p.add_argument('--parallel', action='store_true', help="Run rows in a thread pool")
    p.add_argument('--verbose', action='store_true')

    p = commands.add_parser('weights', help="List Grünwald-Letnikov weights")
    p.add_argument('--alpha', type=_order, required=True)
    p.add_argument('--count', type=_at_least(0), required=True)
    p.add_argument('--verbose', action='store_true')

    p = commands.add_parser('deriv', help="Approximate the fractional derivative of t^p")
    p.add_argument('--alpha', type=_order, required=True)
    p.add_argument('--n', type=_at_least(1), required=True)
    p.add_argument('--monomial', type=_non_negative, required=True, help="Power p of t^p on [0, 1]")
    p.add_argument('--side', choices=SIDES, default='left')
    p.add_argument('--out', help="Output CSV; standard output when omitted")
    p.add_argument('--refine', type=_at_least(1), help="Also report the error over this many halvings")
    p.add_argument('--verbose', action='store_true')

    return parser


def cmd_solve(args) -> int:
    if args.problem:
        try:
            loader = ProblemConfigLoader(args.problem)
            loader.load_file()
            problem = loader.to_problem()
        except ConfigError as e:
            _error(f"Config error in {args.problem}: {e}")
            return EXIT_CONFIG
        if args.verbose:
            loader.print_report()
    else:
        problem = get_example(args.example)

    params = {'force_path': args.force_path}
    if args.tol is not None:
        params['tol_residual'] = args.tol
    elif args.problem and loader.builtin is None:
        params['tol_residual'] = EXPRESSION_TOL_RESIDUAL
    opts = SolveOptions(params, verbose=args.verbose)

    try:
        report = solve(problem, args.n, opts, convention=args.convention)
    except (SolverError, ExprEvalError) as e:
        _error(str(e))
        return EXIT_SOLVER

    if args.out:
        export_solution(report, problem, args.out, args.format)
        if args.verbose:
            print(f"[EXPORT] Results written to: {args.out}")
    print(report.summary_line())
    return EXIT_OK


def cmd_benchmark(args) -> int:
    try:
        rows = parse_rows(args.rows) if args.rows else DEFAULT_ROWS
    except ValueError as e:
        _error(str(e))
        return EXIT_USAGE

    results = run_benchmark(rows, parallel=args.parallel, verbose=args.verbose)
    print_benchmark(results)
    if args.out:
        export_benchmark(results, args.out, args.format)
        if args.verbose:
            print(f"[EXPORT] Table written to: {args.out}")

    failing = failing_rows(results)
    if failing:
        _error("Rows outside tolerance: " + ", ".join(f"{r.name}:{r.n} ({r.status})" for r in failing))
        return EXIT_SOLVER
    return EXIT_OK


def cmd_weights(args) -> int:
    print_weights(weight_table(args.alpha, args.count))
    return EXIT_OK


def cmd_deriv(args) -> int:
    t, approx, exact = monomial_derivative(args.alpha, args.n, args.monomial, args.side)
    df = derivative_frame(t, approx, exact)
    if args.out:
        write_csv(df, args.out)
        if args.verbose:
            print(f"[EXPORT] Derivative samples written to: {args.out}")
    else:
        write_csv(df, sys.stdout)

    if args.refine:
        try:
            levels = refine_derivative(args.alpha, args.n, args.monomial, args.side, args.refine)
        except ValueError as e:
            _error(str(e))
            return EXIT_USAGE
        print_refinement(levels)
    return EXIT_OK


COMMANDS = {
    'solve': cmd_solve,
    'benchmark': cmd_benchmark,
    'weights': cmd_weights,
    'deriv': cmd_deriv,
}


def main(argv: Optional[List[str]] = None) -> int:
    """Run one subcommand and return its exit code"""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE
    return COMMANDS[args.command](args)


if __name__ == '__main__':
    sys.exit(main())
