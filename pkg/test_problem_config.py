"""
Test script for Problem Config loading
JSON problem files, validation findings and the expression path against the built-ins
"""

import json
import pytest

from euler_solver import SolveOptions, solve
from problem_config import (EXPRESSION_TOL_RESIDUAL, ConfigError, ProblemConfig,
                            ProblemConfigLoader, load_problem)
from variational_problem import example1, example2

EXAMPLE1_CONFIG = {
    "alpha": 0.5, "a": 0, "b": 1, "xa": 0, "xb": 1,
    "lagrangian": "(dax - 2/gamma(2.5)*t^1.5)^2",
    "exact": "t^2"
}
EXAMPLE2_CONFIG = {
    "alpha": 0.5, "a": 0, "b": 1, "xa": 0, "xb": 1,
    "lagrangian": "dax - dx^2",
    "exact": "-1/(2*gamma(2.5))*(1 - t)^1.5 + (1 - 1/(2*gamma(2.5)))*t + 1/(2*gamma(2.5))"
}


def write_config(tmp_path, data, name="problem.json"):
    path = tmp_path / name
    path.write_text(data if isinstance(data, str) else json.dumps(data, indent=2))
    return str(path)


@pytest.mark.parametrize("data, built_in", [(EXAMPLE1_CONFIG, example1), (EXAMPLE2_CONFIG, example2)])
def test_expression_path_matches_builtin(tmp_path, data, built_in):
    problem = load_problem(write_config(tmp_path, data))
    assert problem.name == 'problem'
    opts = SolveOptions({'tol_residual': EXPRESSION_TOL_RESIDUAL})
    from_config = solve(problem, 10, opts)
    reference = solve(built_in(), 10)
    assert from_config.path == 'linear'
    assert abs(from_config.error_vs_exact - reference.error_vs_exact) <= 1e-6


def test_builtin_reference(tmp_path):
    loader = ProblemConfigLoader(write_config(tmp_path, {"example": "example3"}))
    loader.load_file()
    problem = loader.to_problem()
    assert problem.name == 'example3'
    assert loader.findings == []


def test_invalid_json_reports_position(tmp_path):
    path = write_config(tmp_path, '{"alpha": 0.5,\n  "a": }')
    with pytest.raises(ConfigError) as info:
        load_problem(path)
    assert info.value.line == 2
    assert info.value.column is not None
    assert "line 2" in str(info.value)


def test_missing_and_mistyped_fields(tmp_path):
    data = dict(EXAMPLE1_CONFIG)
    del data["xb"]
    with pytest.raises(ConfigError, match="Missing"):
        load_problem(write_config(tmp_path, data))

    data = dict(EXAMPLE1_CONFIG, alpha="half")
    with pytest.raises(ConfigError, match="alpha"):
        load_problem(write_config(tmp_path, data))

    data = dict(EXAMPLE1_CONFIG, lagrangian=3)
    with pytest.raises(ConfigError, match="lagrangian"):
        load_problem(write_config(tmp_path, data))

    data = dict(EXAMPLE1_CONFIG, extra=1)
    with pytest.raises(ConfigError, match="Unknown"):
        load_problem(write_config(tmp_path, data))

    with pytest.raises(ConfigError):
        load_problem(write_config(tmp_path, [1, 2, 3]))


def test_expression_error_offset(tmp_path):
    data = dict(EXAMPLE1_CONFIG, lagrangian="dax +")
    with pytest.raises(ConfigError) as info:
        load_problem(write_config(tmp_path, data))
    assert info.value.offset == 5
    assert "lagrangian" in str(info.value)


def test_exact_must_meet_boundaries(tmp_path):
    near = dict(EXAMPLE1_CONFIG, exact="t^2 + 1e-12")
    assert load_problem(write_config(tmp_path, near, "near.json")).has_exact

    off = dict(EXAMPLE1_CONFIG, exact="t^2 + 1e-6")
    with pytest.raises(ConfigError, match="boundary mismatch"):
        load_problem(write_config(tmp_path, off, "off.json"))


def test_invalid_order_is_a_finding(tmp_path):
    loader = ProblemConfigLoader(write_config(tmp_path, dict(EXAMPLE1_CONFIG, alpha=1.5)))
    findings = loader.validate()
    assert any(f.startswith('alpha out of range') for f in findings)
    with pytest.raises(ConfigError):
        loader.to_problem()


def test_missing_file(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_problem(str(tmp_path / "absent.json"))


def test_unreadable_file(tmp_path):
    path = tmp_path / "latin1.json"
    path.write_bytes(b'{"lagrangian": "\xff\xfe"}')
    with pytest.raises(ConfigError, match="UTF-8") as info:
        load_problem(str(path))
    assert info.value.offset == 16

    folder = tmp_path / "folder.json"
    folder.mkdir()
    with pytest.raises(ConfigError, match="Cannot read"):
        load_problem(str(folder))


def test_round_trip_dict():
    config = ProblemConfig.from_dict(EXAMPLE2_CONFIG)
    assert config.to_dict() == {k: float(v) if k in ('alpha', 'a', 'b', 'xa', 'xb') else v
                                for k, v in EXAMPLE2_CONFIG.items()}


def test_print_report(tmp_path, capsys):
    loader = ProblemConfigLoader(write_config(tmp_path, EXAMPLE2_CONFIG))
    loader.load_file()
    loader.validate()
    loader.print_report()
    out = capsys.readouterr().out
    assert "[CONFIG]" in out
    assert "dax - dx^2" in out
    assert "No problems detected" in out
