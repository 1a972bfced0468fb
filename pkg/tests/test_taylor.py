"""Testcases for the batched Taylor jets."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pshlab import errors
from pshlab.expr import parse_field
from pshlab.taylor import Jet, directional, space, taylor

coordinate = st.floats(min_value=-0.9, max_value=0.9, allow_nan=False)


def test_exp_jet():
    jet = taylor(parse_field("exp(x)"), np.array([[0.0, 0, 0, 0], [0.3, 0, 0, 0]]), 5)
    for n in range(6):
        assert np.allclose(jet.partial((n, 0, 0, 0)), [1.0, math.exp(0.3)], rtol=1e-13)
    assert np.allclose(jet.partial((0, 1, 0, 0)), 0.0)


def test_tan_jet():
    x = 0.3
    jet = taylor(parse_field("tan(x)"), (x, 0.0, 0.0, 0.0), 3)
    sec2 = 1 / math.cos(x) ** 2
    assert jet.partial((1, 0, 0, 0))[0] == pytest.approx(sec2, rel=1e-12)
    assert jet.partial((2, 0, 0, 0))[0] == pytest.approx(2 * math.tan(x) * sec2, rel=1e-12)


def test_hessian_matches_closed_form():
    x, y, u = 0.5, 0.2, 0.3
    hessian = taylor(parse_field("sin(x*y) + u^3"), (x, y, u, 0.0), 2).hessian()[0]
    s, c = math.sin(x * y), math.cos(x * y)
    expected = np.zeros((4, 4))
    expected[0, 0] = -y * y * s
    expected[0, 1] = expected[1, 0] = c - x * y * s
    expected[1, 1] = -x * x * s
    expected[2, 2] = 6 * u
    assert np.allclose(hessian, expected, atol=1e-13)


def test_negative_powers():
    jet = taylor(parse_field("v^(-2)"), (0.0, 0.0, 0.0, 0.5), 2)
    assert jet.value[0] == pytest.approx(4.0)
    assert jet.partial((0, 0, 0, 1))[0] == pytest.approx(-16.0)
    assert jet.partial((0, 0, 0, 2))[0] == pytest.approx(96.0)


@settings(max_examples=30, deadline=None)
@given(st.lists(st.tuples(coordinate, coordinate, coordinate, coordinate), min_size=1, max_size=8))
def test_jet_value_is_the_field_value(points):
    f = parse_field("ln(2 + x^2)*sqrt(1 + y^2) + cos(u*v)/(2 + u) - x*y^3")
    pts = np.array(points)
    assert np.allclose(taylor(f, pts, 3).value, f.evaluate(pts), rtol=1e-13, atol=1e-14)


def test_orders_are_coerced():
    pts = np.zeros((2, 4))
    a = Jet.variable("x", pts[:, 0], 4)
    b = Jet.variable("y", pts[:, 1], 2)
    assert (a + b).order == 2
    assert (a * b).order == 2
    assert (a * b).partial((1, 1, 0, 0)).tolist() == [1.0, 1.0]


def test_differentiation_lowers_the_order():
    jet = taylor(parse_field("x^2*y"), (1.0, 2.0, 0.0, 0.0), 3)
    dx = jet.diff("x")
    assert dx.order == 2
    assert dx.value[0] == pytest.approx(4.0)
    assert dx.partial((0, 1, 0, 0))[0] == pytest.approx(2.0)
    with pytest.raises(ValueError):
        Jet.constant(1.0, 1, 0).diff("x")


def test_directional_derivative():
    jet = taylor(parse_field("x^2 + 3*u*v"), (1.0, 0.0, 2.0, -1.0), 2)
    along = directional([1.0, 0.0, 0.5, 0.0], jet)
    assert along.order == 1
    assert along.value[0] == pytest.approx(2.0 + 0.5 * 3 * -1.0)


def test_domain_error_in_jets():
    with pytest.raises(errors.DomainError):
        taylor(parse_field("ln(x)"), np.array([[1.0, 0, 0, 0], [-1.0, 0, 0, 0]]), 2)


def test_monomial_space():
    sp = space(2)
    assert sp.size == 15
    assert sp.size_of(1) == 5
    assert tuple(sp.exponents[0]) == (0, 0, 0, 0)


ALL_CASES = [
    test_exp_jet,
    test_tan_jet,
    test_hessian_matches_closed_form,
    test_negative_powers,
    test_jet_value_is_the_field_value,
    test_orders_are_coerced,
    test_differentiation_lowers_the_order,
    test_directional_derivative,
    test_domain_error_in_jets,
    test_monomial_space,
]
