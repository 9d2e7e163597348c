"""
Full Pipeline Test
End-to-end run: problem file, solve, export and the benchmark table
"""

import json
import time
import pandas as pd

from benchmark_runner import failing_rows, run_benchmark
from euler_solver import SolveOptions, solve
from problem_config import EXPRESSION_TOL_RESIDUAL, ProblemConfigLoader
from result_exporter import export_benchmark, export_solution, print_benchmark
from test_problem_config import EXAMPLE2_CONFIG
from variational_problem import example2


def test_full_pipeline(tmp_path):
    """Config file to exported solution and benchmark rows"""

    print("\n" + "="*80)
    print(" "*20 + "FRACTIONAL VARIATIONAL SOLVER - FULL PIPELINE TEST")
    print("="*80)

    start_time = time.time()

    # ========================================================================
    # STEP 1: Load and validate the problem file
    # ========================================================================
    print("\n" + "-"*80)
    print("STEP 1: PROBLEM FILE")
    print("-"*80)

    config_file = tmp_path / "example2.json"
    config_file.write_text(json.dumps(EXAMPLE2_CONFIG, indent=2))

    loader = ProblemConfigLoader(str(config_file))
    loader.load_file()
    assert loader.validate() == []
    loader.print_report()
    problem = loader.to_problem()

    # ========================================================================
    # STEP 2: Solve and compare with the built-in problem
    # ========================================================================
    print("\n" + "-"*80)
    print("STEP 2: SOLVE")
    print("-"*80)

    # 29 intervals give the 30 mesh points of the reference row
    report = solve(problem, 29, SolveOptions({'tol_residual': EXPRESSION_TOL_RESIDUAL}))
    print(report.summary_line())
    reference = solve(example2(), 29)
    assert report.path == 'linear'
    assert abs(report.error_vs_exact - reference.error_vs_exact) <= 1e-6
    assert abs(report.error_vs_exact - 0.0012) / 0.0012 <= 0.10

    # ========================================================================
    # STEP 3: Export
    # ========================================================================
    print("\n" + "-"*80)
    print("STEP 3: EXPORT")
    print("-"*80)

    solution_file = tmp_path / "solution.csv"
    export_solution(report, problem, str(solution_file))
    df = pd.read_csv(solution_file)
    assert len(df) == 30
    assert df["x"].iloc[0] == 0.0 and df["x"].iloc[-1] == 1.0
    assert abs(df["abs_err"].max() - report.error_vs_exact) <= 1e-12
    print(f"[OK] Solution exported: {solution_file}")

    # ========================================================================
    # STEP 4: Benchmark rows
    # ========================================================================
    print("\n" + "-"*80)
    print("STEP 4: BENCHMARK")
    print("-"*80)

    rows = run_benchmark([(2, 5), (2, 10), (2, 30)])
    print_benchmark(rows)
    assert failing_rows(rows) == []
    table_file = tmp_path / "table.md"
    export_benchmark(rows, str(table_file), fmt='md')
    assert table_file.read_text().count("example2") == 3

    total_time = time.time() - start_time
    print(f"\n[TIME] Total pipeline time: {total_time:.2f} seconds")
    print("\n" + "="*80)
    print("[SUCCESS] Pipeline completed")
    print("="*80 + "\n")


def main():
    import pathlib
    import tempfile
    with tempfile.TemporaryDirectory() as tmp:
        test_full_pipeline(pathlib.Path(tmp))


if __name__ == "__main__":
    main()
