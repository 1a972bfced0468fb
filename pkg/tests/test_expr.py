"""Testcases for the expression graphs, the DSL and Wirtinger derivatives."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pshlab import errors
from pshlab.expr import (
    Box,
    HoloMap,
    ScalarField,
    W,
    compose_holo,
    field_from_json,
    field_to_json,
    node_count,
    parse_field,
    to_dsl,
    wirtinger,
)

POINTS = np.array(
    [
        [0.1, -0.2, 0.3, 0.05],
        [-0.4, 0.25, -0.1, 0.2],
        [0.7, 0.1, 0.0, -0.3],
    ]
)

coordinate = st.floats(min_value=-0.9, max_value=0.9, allow_nan=False)
coefficient = st.integers(min_value=-5, max_value=5)


def test_parse_and_evaluate():
    f = parse_field("u + absz2^2")
    assert f.evaluate((1.0, 2.0, 3.0, 0.0)) == pytest.approx(28.0)
    g = parse_field("$a*x - 2*v/4", {"a": Fraction(1, 2)})
    assert g.evaluate((4.0, 0.0, 0.0, 2.0)) == pytest.approx(1.0)


def test_exact_constants_fold():
    f = parse_field("1/3 + 1/6")
    assert f.node.op == "const"
    assert f.node.payload == Fraction(1, 2)
    assert parse_field("cos(0)*x").node is parse_field("x").node


def test_interning_shares_nodes():
    a = parse_field("x*y + ln(cos(u))")
    b = parse_field("y*x + ln(cos(u))")
    assert a.node is b.node
    assert node_count(a.node) == node_count(b.node)


def test_syntax_error_reports_position():
    with pytest.raises(errors.DslSyntaxError) as info:
        parse_field("x + (y")
    assert info.value.position == len("x + (y")
    with pytest.raises(errors.DslSyntaxError):
        parse_field("x^0.5")
    with pytest.raises(errors.DslSyntaxError):
        parse_field("foo(x)")


def test_unbound_parameter():
    with pytest.raises(errors.UnboundParameterError) as info:
        parse_field("$a*x")
    assert info.value.name == "a"


def test_symbolic_derivative():
    f = parse_field("x^3*y + exp(u*v)")
    assert f.diff("x").evaluate((2.0, 3.0, 0.0, 0.0)) == pytest.approx(36.0)
    assert f.diff("v").evaluate((0.0, 0.0, 2.0, 0.0)) == pytest.approx(2.0)
    assert parse_field("x*y").diff("u").is_zero()


@settings(max_examples=40, deadline=None)
@given(
    st.lists(coefficient, min_size=4, max_size=4),
    st.tuples(coordinate, coordinate, coordinate, coordinate),
    st.sampled_from("xyuv"),
)
def test_derivative_matches_finite_difference(coefficients, point, var):
    c1, c2, c3, c4 = coefficients
    f = parse_field(
        "$c1*x^2*y + $c2*sin(u*v) + $c3*exp(v/2)*cos(x) + $c4*ln(2 + y^2)",
        {"c1": c1, "c2": c2, "c3": c3, "c4": c4},
    )
    p = np.array(point)
    step = np.zeros(4)
    step["xyuv".index(var)] = 1e-5
    difference = (f.evaluate(p + step) - f.evaluate(p - step)) / 2e-5
    value = f.diff(var).evaluate(p)
    assert abs(value - difference) <= 1e-5 * (1 + abs(value))


def test_wirtinger_derivatives():
    f = parse_field("absz2")
    assert wirtinger(f, a_z=1).evaluate((1.0, 2.0, 0.0, 0.0)) == pytest.approx(1 - 2j)
    assert wirtinger(f, a_z=1, b_zbar=1).evaluate((0.3, 0.4, 0.0, 0.0)) == pytest.approx(1.0)
    # w^2 is holomorphic
    g = W * W
    assert wirtinger(g, b_wbar=1).evaluate((0.0, 0.0, 0.3, -0.7)) == pytest.approx(0.0)
    assert wirtinger(g, a_w=1).evaluate((0.0, 0.0, 0.3, -0.7)) == pytest.approx(2 * (0.3 - 0.7j))


def test_wirtinger_order_limit():
    with pytest.raises(errors.OrderLimitError):
        wirtinger(parse_field("x"), a_z=7, b_zbar=6)


def test_domain_error_carries_point():
    with pytest.raises(errors.DomainError) as info:
        parse_field("ln(x)").evaluate((-1.0, 0.0, 0.0, 0.0))
    assert info.value.point == (-1.0, 0.0, 0.0, 0.0)
    assert "ln" in info.value.reason


def test_region_is_enforced():
    region = Box((-1.0, -np.inf, -np.inf, -np.inf), (1.0, np.inf, np.inf, np.inf), closed=False)
    f = parse_field("ln(cos(x))", region=region)
    assert f.evaluate((0.0, 5.0, 5.0, 5.0)) == pytest.approx(0.0)
    with pytest.raises(errors.DomainError):
        f.evaluate((1.0, 0.0, 0.0, 0.0))
    assert f.diff("x").region == region


def test_dsl_output_evaluates_like_the_field():
    f = parse_field("u - (x - v)^2/2 - ln(cos(x)) + $a*absz2^3", {"a": Fraction(-3, 7)})
    g = parse_field(to_dsl(f))
    assert np.allclose(f.evaluate(POINTS), g.evaluate(POINTS), rtol=1e-14, atol=1e-15)


def test_dsl_output_limit():
    f = parse_field("absz2^40*exp(u)")
    for _ in range(6):
        f = f.diff("x")
    with pytest.raises(errors.ExpressionTooLarge):
        to_dsl(f, max_length=50)


def test_node_table_is_lossless():
    f = parse_field("sqrt(1 + x^2)*0.1 + 2/3*v^(-2)")
    data = field_to_json(f)
    assert data["format"] == "pshlab-graph/1"
    g = field_from_json(data)
    assert g.node is f.node
    assert np.array_equal(f.evaluate(POINTS), g.evaluate(POINTS))


def test_arithmetic_operators():
    x, y = parse_field("x"), parse_field("y")
    f = (x * x + 2 * y - 1) / (1 + y**2)
    expected = parse_field("(x^2 + 2*y - 1)/(1 + y^2)")
    assert np.allclose(f.evaluate(POINTS), expected.evaluate(POINTS))
    assert isinstance(-f, ScalarField)
    with pytest.raises(ValueError):
        x ** 0.5  # pylint:disable=pointless-statement


def test_holomorphic_composition():
    f = parse_field("u + absz2^2")
    assert np.allclose(compose_holo(f, HoloMap.identity()).evaluate(POINTS), f.evaluate(POINTS))
    # (z, w) -> (2z, w + z^2)
    phi = HoloMap({(1, 0): 2}, {(0, 1): 1, (2, 0): 1})
    g = compose_holo(parse_field("u"), phi)
    x, y = POINTS[:, 0], POINTS[:, 1]
    assert np.allclose(g.evaluate(POINTS), POINTS[:, 2] + x**2 - y**2)
    assert np.allclose(phi.jacobian(), [[2, 0], [0, 1]])
    with pytest.raises(ValueError):
        HoloMap({(3, 0): 1}, {(0, 1): 1})


ALL_CASES = [
    test_parse_and_evaluate,
    test_exact_constants_fold,
    test_interning_shares_nodes,
    test_syntax_error_reports_position,
    test_unbound_parameter,
    test_symbolic_derivative,
    test_derivative_matches_finite_difference,
    test_wirtinger_derivatives,
    test_wirtinger_order_limit,
    test_domain_error_carries_point,
    test_region_is_enforced,
    test_dsl_output_evaluates_like_the_field,
    test_dsl_output_limit,
    test_node_table_is_lossless,
    test_arithmetic_operators,
    test_holomorphic_composition,
]
