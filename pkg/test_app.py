"""
Test script for the command-line application
Runs each subcommand in-process and checks exit codes and written files
"""

import json
import re
import pandas as pd

import app
from test_problem_config import EXAMPLE1_CONFIG


def summary_error(out: str) -> float:
    match = re.search(r"E=(\S+)", out)
    return float(match.group(1))


def test_solve_example_writes_csv(tmp_path, capsys):
    out_file = tmp_path / "ex1.csv"
    code = app.main(["solve", "--example", "1", "--n", "30", "--out", str(out_file)])
    assert code == 0
    stdout = capsys.readouterr().out
    assert stdout.startswith("path=linear residual=")
    assert abs(summary_error(stdout) - 0.0065) / 0.0065 <= 0.10

    df = pd.read_csv(out_file)
    assert list(df.columns) == ["i", "t", "x", "exact", "abs_err"]
    assert len(df) == 31
    assert df["t"].iloc[-1] == 1.0
    assert b"\r" not in out_file.read_bytes()


def test_solve_output_is_deterministic(tmp_path):
    first = tmp_path / "a.csv"
    second = tmp_path / "b.csv"
    assert app.main(["solve", "--example", "3", "--n", "10", "--out", str(first)]) == 0
    assert app.main(["solve", "--example", "3", "--n", "10", "--out", str(second)]) == 0
    assert first.read_bytes() == second.read_bytes()


def test_solve_json(tmp_path):
    out_file = tmp_path / "ex2.json"
    assert app.main(["solve", "--example", "2", "--n", "10", "--out", str(out_file),
                     "--format", "json"]) == 0
    data = json.loads(out_file.read_text())
    assert data["path"] == "linear"
    assert data["problem"]["name"] == "example2"
    assert len(data["trajectory"]["x"]) == 11


def test_solve_flag_errors():
    assert app.main(["solve", "--example", "1", "--n", "2"]) == 2
    assert app.main(["solve", "--n", "10"]) == 2
    assert app.main(["solve", "--example", "1", "--problem", "p.json", "--n", "10"]) == 2
    assert app.main(["solve", "--example", "4", "--n", "10"]) == 2
    assert app.main(["solve", "--example", "1", "--n", "10", "--tol", "-1"]) == 2


def test_solve_from_config_matches_builtin(tmp_path, capsys):
    config = tmp_path / "p.json"
    config.write_text(json.dumps(EXAMPLE1_CONFIG))
    assert app.main(["solve", "--example", "1", "--n", "10"]) == 0
    builtin = summary_error(capsys.readouterr().out)
    assert app.main(["solve", "--problem", str(config), "--n", "10"]) == 0
    from_config = summary_error(capsys.readouterr().out)
    assert abs(from_config - builtin) <= 1e-6


def test_solve_config_error_exit_code(tmp_path, capsys):
    config = tmp_path / "bad.json"
    config.write_text('{"alpha": 0.5, "lagrangian": "dax +"')
    assert app.main(["solve", "--problem", str(config), "--n", "10"]) == 4
    assert "[ERROR]" in capsys.readouterr().err

    config.write_text(json.dumps(dict(EXAMPLE1_CONFIG, lagrangian="dax + foo")))
    assert app.main(["solve", "--problem", str(config), "--n", "10"]) == 4


def test_unreadable_config_exit_code(tmp_path, capsys):
    config = tmp_path / "latin1.json"
    config.write_bytes(b'{"alpha": 0.5, "lagrangian": "\xe9"}')
    assert app.main(["solve", "--problem", str(config), "--n", "10"]) == 4
    assert "UTF-8" in capsys.readouterr().err
    assert app.main(["solve", "--problem", str(tmp_path), "--n", "10"]) == 4


def test_overflowing_lagrangian_exit_code(tmp_path, capsys):
    config = tmp_path / "overflow.json"
    config.write_text(json.dumps({"alpha": 0.5, "a": 0.0, "b": 1.0, "xa": 0.0, "xb": 10.0,
                                  "lagrangian": "(dax - t)^2 + exp(exp(x))"}))
    for path in ("auto", "newton"):
        assert app.main(["solve", "--problem", str(config), "--n", "6", "--force-path", path]) == 3
    assert "not finite" in capsys.readouterr().err


def test_solver_failures_exit_code(capsys):
    assert app.main(["solve", "--example", "3", "--n", "10", "--force-path", "linear"]) == 3
    assert app.main(["solve", "--example", "3", "--n", "10", "--tol", "1e-30"]) == 3
    assert "residual" in capsys.readouterr().err


def test_weights(capsys):
    assert app.main(["weights", "--alpha", "0.5", "--count", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines == ["0 1.0 1.0", "1 -0.5 0.5", "2 -0.125 0.375"]

    assert app.main(["weights", "--alpha", "0.5", "--count", "0"]) == 0
    assert capsys.readouterr().out.splitlines() == ["0 1.0 1.0"]

    assert app.main(["weights", "--alpha", "1.5", "--count", "3"]) == 2


def test_deriv_left_monomial(tmp_path):
    out_file = tmp_path / "d.csv"
    assert app.main(["deriv", "--alpha", "0.5", "--monomial", "2", "--n", "256",
                     "--side", "left", "--out", str(out_file)]) == 0
    df = pd.read_csv(out_file)
    assert list(df.columns) == ["i", "t", "approx", "exact", "abs_err"]
    assert len(df) == 257
    assert df["abs_err"].iloc[-1] < 0.01


def test_deriv_refine(capsys):
    assert app.main(["deriv", "--alpha", "0.5", "--monomial", "2", "--n", "16",
                     "--refine", "2"]) == 0
    out = capsys.readouterr().out
    assert "order" in out
    assert app.main(["deriv", "--alpha", "0.5", "--monomial", "2", "--n", "16",
                     "--side", "right", "--refine", "2"]) == 2
    assert app.main(["deriv", "--alpha", "0.5", "--monomial", "-1", "--n", "16"]) == 2


def test_benchmark_rows(tmp_path, capsys):
    out_file = tmp_path / "table.csv"
    assert app.main(["benchmark", "--rows", "1:5,1:10,1:30", "--out", str(out_file)]) == 0
    df = pd.read_csv(out_file)
    assert list(df.columns) == ["example", "n", "T", "E", "E_ref", "rel_dev", "E_literal",
                                "rate", "status"]
    assert list(df["E"]) == sorted(df["E"], reverse=True)
    assert "[BENCHMARK]" in capsys.readouterr().out


def test_benchmark_markdown(tmp_path):
    out_file = tmp_path / "table.md"
    assert app.main(["benchmark", "--rows", "3:5", "--format", "md", "--out", str(out_file)]) == 0
    lines = out_file.read_text().splitlines()
    assert lines[0].startswith("| example | n | T | E |")
    assert len(lines) == 3
    assert "example3" in lines[2]


def test_benchmark_bad_rows():
    assert app.main(["benchmark", "--rows", "9:5"]) == 2
