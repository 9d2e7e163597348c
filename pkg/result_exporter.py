"""
Result Exporter Module
Writes solutions, benchmark tables and derivative samples as CSV, JSON or markdown
"""

import json
import numpy as np
import pandas as pd
from typing import Dict, List, Optional

from euler_solver import SolveReport
from variational_problem import VariationalProblem

FLOAT_FORMAT = '%.17g'
BENCHMARK_COLUMNS = ['example', 'n', 'T', 'E', 'E_ref', 'rel_dev', 'E_literal', 'rate', 'status']


def write_csv(df: pd.DataFrame, filepath: str):
    """CSV with a header, 17 significant digits and bare newline line endings"""
    df.to_csv(filepath, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')


def solution_frame(report: SolveReport, problem: VariationalProblem) -> pd.DataFrame:
    """
    Per-node table of a solve

    Returns:
        DataFrame with columns i, t, x and, when the exact solution is known, exact, abs_err
    """
    trajectory = report.trajectory
    t = trajectory.mesh.nodes
    df = pd.DataFrame({
        'i': np.arange(len(t), dtype=int),
        't': t,
        'x': trajectory.values
    })
    if problem.has_exact:
        exact = np.asarray(problem.exact(t), dtype=float)
        df['exact'] = exact
        df['abs_err'] = np.abs(exact - trajectory.values)
    return df


def export_solution(report: SolveReport, problem: VariationalProblem, filepath: str,
                    fmt: str = 'csv'):
    """
    Export a solve to disk

    Args:
        report: Outcome of euler_solver.solve
        problem: The problem that was solved
        filepath: Output path
        fmt: 'csv' or 'json'
    """
    if fmt == 'csv':
        write_csv(solution_frame(report, problem), filepath)
    elif fmt == 'json':
        payload = {'problem': problem.to_dict(), **report.to_dict()}
        with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
            json.dump(payload, f, indent=2)
            f.write('\n')
    else:
        raise ValueError(f"Unsupported solution format: {fmt}")


def benchmark_frame(rows: List) -> pd.DataFrame:
    return pd.DataFrame([row.to_dict() for row in rows], columns=BENCHMARK_COLUMNS)


def _cell(value) -> str:
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return ''
    if isinstance(value, float):
        return f"{value:.6g}"
    return str(value)


def benchmark_markdown(rows: List) -> str:
    """Benchmark rows as a pipe table"""
    lines = ['| ' + ' | '.join(BENCHMARK_COLUMNS) + ' |',
             '|' + '|'.join('---' for _ in BENCHMARK_COLUMNS) + '|']
    for row in rows:
        data = row.to_dict()
        lines.append('| ' + ' | '.join(_cell(data[c]) for c in BENCHMARK_COLUMNS) + ' |')
    return '\n'.join(lines) + '\n'


def export_benchmark(rows: List, filepath: str, fmt: str = 'csv'):
    """
    Export benchmark rows

    Args:
        rows: BenchmarkRow objects
        filepath: Output path
        fmt: 'csv' or 'md'
    """
    if fmt == 'csv':
        write_csv(benchmark_frame(rows), filepath)
    elif fmt == 'md':
        with open(filepath, 'w', encoding='utf-8', newline='\n') as f:
            f.write(benchmark_markdown(rows))
    else:
        raise ValueError(f"Unsupported benchmark format: {fmt}")


def derivative_frame(t: np.ndarray, approx: np.ndarray, exact: Optional[np.ndarray]) -> pd.DataFrame:
    """Table i, t, approx, exact, abs_err; exact and abs_err are empty without an oracle"""
    df = pd.DataFrame({
        'i': np.arange(len(t), dtype=int),
        't': t,
        'approx': approx
    })
    if exact is None:
        df['exact'] = np.nan
        df['abs_err'] = np.nan
    else:
        df['exact'] = exact
        df['abs_err'] = np.abs(np.asarray(approx) - np.asarray(exact))
    return df


def print_weights(table: List[Dict]):
    """One line per weight: k, w[k], partial sum"""
    for entry in table:
        print(f"{entry['k']} {entry['w']!r} {entry['partial_sum']!r}")


def print_benchmark(rows: List):
    """Print benchmark rows as a fixed-width table"""
    fstr = '{:>9} {:>4} {:>12} {:>12} {:>8} {:>8} {:>12} {:>6} {:>9}'

    print("\n" + "=" * 90)
    print("[BENCHMARK] MAX-NORM ERROR AND RUN TIME PER MESH")
    print("=" * 90)
    print(fstr.format('example', 'n', 'T', 'E', 'E_ref', 'rel_dev', 'E_literal', 'rate', 'status'))
    for row in rows:
        rate = '' if row.rate is None else f"{row.rate:.2f}"
        print(fstr.format(row.name, row.n, f"{row.T:.4e}", f"{row.E:.6g}",
                          _cell(row.E_ref), _cell(row.rel_dev), _cell(row.E_literal),
                          rate, row.status))
    print("=" * 90 + "\n")


def print_refinement(levels: List[Dict]):
    """Print the error at the checked node for each halving, with the observed order"""
    print(f"{'n':>6} {'h':>12} {'abs_err':>14} {'order':>7}")
    for level in levels:
        order = '' if level['order'] is None else f"{level['order']:.3f}"
        print(f"{level['n']:>6} {level['h']:>12.6g} {level['abs_err']:>14.6e} {order:>7}")
