"""
Test script for the Expression Parser
Grammar, error positions, evaluation and the bridge to Lagrangians
"""

import numpy as np
import pytest

from expression_parser import (ExprEvalError, ExprParseError, EvalContext, evaluate, parse,
                               to_function, to_lagrangian, to_source, variables)
from variational_problem import example1, example2

ROUND_TRIP_SOURCES = [
    "x^2 + 3*t - dax/(1 + dx^2)",
    "-t^2*exp(x)",
    "sin(t)*cos(dax) - 2/gamma(2.5)",
    "pow(abs(x), 1.5) + sqrt(t) - -dx",
    "(dax - 2/gamma(2.5)*t^1.5)^2",
    "1.5e-3*x/t/2 - pi*log(t + 1)",
]


def test_precedence():
    assert evaluate(parse("2+3*4")) == 14.0
    assert evaluate(parse("-2^2")) == -4.0
    assert evaluate(parse("2^3^2")) == 512.0
    assert evaluate(parse("8/4/2")) == 1.0
    assert evaluate(parse("2^-1")) == 0.5
    assert evaluate(parse(" 1 +\t2 ")) == 3.0


def test_example_lagrangian_parses():
    tree = parse("(dax - 2/gamma(2.5)*t^1.5)^2")
    assert variables(tree) == {'dax', 't'}
    value = evaluate(tree, {'t': 1.0, 'dax': 2.0 / 1.329340388179137})
    assert abs(value) < 1e-24


def test_evaluation_values():
    assert evaluate(parse("gamma(2.5)")) == pytest.approx(1.3293403882, rel=1e-10)
    assert evaluate(parse("t"), EvalContext(t=0.3)) == 0.3
    assert evaluate(parse("pi")) == pytest.approx(np.pi)
    assert evaluate(parse("pow(2, 10)")) == 1024.0


@pytest.mark.parametrize("source", ["1/0", "log(0)", "gamma(0)", "sqrt(-1)", "(-8)^(1/3)", "0^-1"])
def test_evaluation_domain_errors(source):
    with pytest.raises(ExprEvalError):
        evaluate(parse(source))


@pytest.mark.parametrize("source, offset", [
    ("2 + foo", 4),
    ("(1+2", 4),
    ("1 )", 2),
    ("sin(1, 2)", 0),
    ("2t", 1),
    ("3 $ 4", 2),
    ("", 0),
    ("sqrt", 0),
])
def test_parse_errors_carry_offset(source, offset):
    with pytest.raises(ExprParseError) as info:
        parse(source)
    assert info.value.offset == offset


def test_unknown_function():
    with pytest.raises(ExprParseError) as info:
        parse("tan(t)")
    assert "tan" in str(info.value)


def test_restricted_variables():
    assert evaluate(parse("t^2", variables=('t',)), {'t': 3.0}) == 9.0
    with pytest.raises(ExprParseError):
        parse("x + t", variables=('t',))


@pytest.mark.parametrize("source", ROUND_TRIP_SOURCES)
def test_round_trip(source):
    tree = parse(source)
    again = parse(to_source(tree))
    rng = np.random.default_rng(5)
    for _ in range(100):
        ctx = EvalContext(t=rng.uniform(0.01, 1.0), x=rng.uniform(-2.0, 2.0),
                          dax=rng.uniform(-2.0, 2.0), dx=rng.uniform(-2.0, 2.0))
        a = evaluate(tree, ctx)
        b = evaluate(again, ctx)
        assert a == pytest.approx(b, rel=1e-15, abs=0.0)


def test_vectorized_evaluation():
    t = np.linspace(0.0, 1.0, 5)
    values = evaluate(parse("t^2 + 1"), EvalContext(t=t))
    np.testing.assert_allclose(values, t ** 2 + 1.0)


def test_deep_nesting_is_rejected():
    for source in ["(" * 5000 + "1" + ")" * 5000, "-" * 10000 + "1", "2^" * 3000 + "2",
                   "(" * 150 + "1" + ")" * 150]:
        with pytest.raises(ExprParseError):
            parse(source)


def test_long_flat_chains_parse():
    assert evaluate(parse("1" + "+1" * 300)) == 301.0
    assert evaluate(parse("1" + "+1" * 4999)) == 5000.0
    assert evaluate(parse("2" + "*1" * 4999)) == 2.0
    assert parse("1" + "-1" * 300).depth == 2
    assert evaluate(parse("8/4/2 - 1 - 1")) == -1.0


def test_fuzz_parser_totality():
    alphabet = list("0123456789.+-*/^(), e") + ['t', 'x', 'dax', 'dx', 'sin', 'pow', 'gamma']
    rng = np.random.default_rng(0)
    for _ in range(500):
        length = int(rng.integers(0, 60))
        source = ''.join(rng.choice(alphabet, size=length))
        try:
            parse(source)
        except ExprParseError as e:
            assert 0 <= e.offset <= len(source)


def test_lagrangian_matches_example1():
    built_in = example1().lagrangian
    parsed = to_lagrangian("(dax - 2/gamma(2.5)*t^1.5)^2")
    assert not parsed.uses_xdot
    rng = np.random.default_rng(1)
    for _ in range(20):
        t, x, dax = rng.uniform(0.0, 1.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)
        assert parsed.eval(t, x, dax) == pytest.approx(built_in.eval(t, x, dax), rel=1e-12, abs=1e-14)
        assert parsed.d_dax(t, x, dax) == pytest.approx(built_in.d_dax(t, x, dax), rel=1e-5, abs=1e-5)
        assert parsed.d_x(t, x, dax) == 0.0


def test_lagrangian_matches_example2():
    built_in = example2().lagrangian
    parsed = to_lagrangian("dax - dx^2")
    assert parsed.uses_xdot
    rng = np.random.default_rng(2)
    for _ in range(20):
        point = (rng.uniform(0.0, 1.0), rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0),
                 rng.uniform(-2.0, 2.0))
        assert parsed.eval(*point) == pytest.approx(built_in.eval(*point), rel=1e-12, abs=1e-14)
        assert parsed.d_dax(*point) == pytest.approx(1.0, rel=1e-5)
        assert parsed.d_xdot(*point) == pytest.approx(built_in.d_xdot(*point), rel=1e-5, abs=1e-5)


def test_constant_lagrangian():
    parsed = to_lagrangian("1")
    assert parsed.eval(0.5, 1.0, 2.0) == 1.0
    assert parsed.d_x(0.5, 1.0, 2.0) == 0.0
    assert parsed.d_dax(0.5, 1.0, 2.0) == 0.0
    assert parsed.d_xdot(0.5, 1.0, 2.0, 3.0) == 0.0


def test_to_function_broadcasts():
    f = to_function("1")
    assert f(np.zeros(3)).shape == (3,)
    g = to_function("t^2")
    assert g(0.5) == 0.25
    with pytest.raises(ExprParseError):
        to_function("x")


def main():
    test_precedence()
    test_example_lagrangian_parses()
    test_evaluation_values()
    test_unknown_function()
    test_restricted_variables()
    for source in ROUND_TRIP_SOURCES:
        test_round_trip(source)
    test_vectorized_evaluation()
    test_deep_nesting_is_rejected()
    test_long_flat_chains_parse()
    test_fuzz_parser_totality()
    test_lagrangian_matches_example1()
    test_lagrangian_matches_example2()
    test_constant_lagrangian()
    test_to_function_broadcasts()
    print("[OK] Expression parser tests passed")


if __name__ == "__main__":
    main()
