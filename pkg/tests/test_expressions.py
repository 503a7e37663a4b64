import math

import numpy as np
import pytest

from src.core.errors import ExprDomainError, ExprSyntaxError
from src.core.expressions import (
    Binary,
    Constant,
    Unary,
    Variable,
    evaluate,
    parameters_used,
    parse,
    parse_value,
    substitute_parameters,
    unparse,
)


@pytest.mark.parametrize(
    "source, t, expected",
    [
        ("sin(t)", 0.0, 0.0),
        ("-(1-3*cos(t))", 0.0, 2.0),
        ("t - 0.1*abs(sin(t))", 0.0, 0.0),
        ("cos(2*t)", math.pi / 2, -1.0),
        ("0.1*sin(t)", math.pi / 2, 0.1),
        ("2^3^2", 0.0, 512.0),
        ("-2^2", 0.0, -4.0),
        ("2^-1", 0.0, 0.5),
        ("2**3", 0.0, 8.0),
        ("pow(t, 2)", 3.0, 9.0),
        ("sqrt(t) + exp(0)", 4.0, 3.0),
        ("1e-3*t", 2.0, 0.002),
    ],
)
def test_evaluates_known_values(source, t, expected):
    assert evaluate(parse(source), t) == pytest.approx(expected, abs=1e-15)


def test_exponential_constant():
    assert evaluate(parse("exp(0.06*0.1)"), 123.0) == pytest.approx(math.exp(0.006), rel=1e-15)


def test_tree_shape():
    tree = parse("-0.4*sin(t)^2")
    assert tree == Binary(
        op="*",
        left=Unary(op="neg", operand=Constant(value=0.4)),
        right=Binary(op="^", left=Unary(op="sin", operand=Variable()), right=Constant(value=2.0)),
    )


def test_vectorized_evaluation_matches_scalar():
    tree = parse("0.0025*cos(3*t)^4 - t/7")
    times = np.linspace(-1.0, 5.0, 41)
    values = evaluate(tree, times)
    assert values.shape == times.shape
    for t, value in zip(times, values):
        assert value == pytest.approx(evaluate(tree, float(t)), rel=1e-14, abs=1e-15)


def test_constant_broadcasts_over_grid():
    values = parse("3").evaluate(np.zeros(5))
    assert values.shape == (5,)
    assert np.all(values == 3.0)


@pytest.mark.parametrize(
    "source, position",
    [
        ("", 0),
        ("sin(t", 5),
        ("2 + ", 4),
        ("t $ 2", 2),
        ("foo(t)", 0),
        ("(t))", 3),
        ("sin t", 4),
    ],
)
def test_syntax_errors_report_position(source, position):
    with pytest.raises(ExprSyntaxError) as info:
        parse(source)
    assert info.value.position == position
    assert info.value.source == source


def test_booleans_are_not_expressions():
    with pytest.raises(ExprSyntaxError):
        parse_value(True)


@pytest.mark.parametrize("source", ["1/(t-1)", "sqrt(t-2)", "(t-3)^0.5", "0^(t-2)"])
def test_domain_errors_name_the_time(source):
    with pytest.raises(ExprDomainError) as info:
        evaluate(parse(source), np.array([0.0, 1.0]))
    assert info.value.t in (0.0, 1.0)


def test_round_trip_is_semantically_equal(rng):
    sources = [
        "-(1-3*cos(t))",
        "t - 0.1*abs(sin(t))",
        "-2^2 + 2^-3",
        "0.0025*cos(4*t)^3",
        "exp(-t)/(2 + sin(t))",
        "-(-t)",
        "-0.4*sin(t)^2",
    ]
    times = rng.uniform(-10.0, 10.0, size=200)
    for source in sources:
        tree = parse(source)
        again = parse(unparse(tree))
        np.testing.assert_array_equal(evaluate(tree, times), evaluate(again, times))


def test_parameters_are_substituted_as_literals():
    text, used = substitute_parameters("-nu*(1 - 3*cos(t)) + nuance", {"nu": 0.2, "mu": 1.0})
    assert used == {"nu"}
    assert "nuance" in text
    assert evaluate(parse(text.replace(" + nuance", "")), 0.0) == pytest.approx(0.4)


def test_parameters_used_reports_every_name():
    assert parameters_used(["nu*t", "sin(t)"], {"nu": 1.0, "kappa": 2.0}) == {"nu": True, "kappa": False}
