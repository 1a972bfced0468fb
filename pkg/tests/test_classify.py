"""Testcases for point classification."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pshlab import errors, gallery
from pshlab.boundary import sample_boundary
from pshlab.classify import (
    EXCEEDS,
    Strict4,
    Verdict,
    classify_point,
    kohn_strict_type4,
    point_type,
    pseudoconvex_scan,
    strict4_coordinate_test,
    strict_type4,
    type4_inequality,
)
from pshlab.expr import parse_field

ORIGIN = (0.0, 0.0, 0.0, 0.0)


def _model(a):
    return gallery.make("model", {"a": a}).field


def test_strictly_pseudoconvex_point():
    r = parse_field("u + absz2")
    assert point_type(r, ORIGIN) == 2
    report = classify_point(r, ORIGIN)
    assert report.c_p == 2
    assert report.pseudoconvex == Verdict.PASS
    assert report.strict4 == Strict4.NOT_APPLICABLE
    assert report.to_dict()["kohn4"] == "NotApplicable"
    assert report.levi == pytest.approx(1.0)


def test_types_of_powers():
    for m in (2, 3):
        r = gallery.make("power", {"m": m}).field
        assert point_type(r, ORIGIN, max_order=8) == 2 * m


def test_odd_type_is_not_pseudoconvex():
    r = parse_field("u + x^3")
    assert point_type(r, ORIGIN) == 3
    assert classify_point(r, ORIGIN).pseudoconvex == Verdict.FAIL


def test_flat_boundary_exceeds_the_order():
    assert point_type(parse_field("u"), ORIGIN, max_order=6) == EXCEEDS


def test_off_boundary_point():
    with pytest.raises(errors.OffBoundaryError):
        point_type(parse_field("u + absz2"), (0.0, 0.0, 0.1, 0.0))


def test_model_type4_values():
    llbar, ll = type4_inequality(_model(Fraction(1, 2)), ORIGIN)
    assert llbar == pytest.approx(4.0)
    assert ll == pytest.approx(1.5)
    with pytest.raises(errors.PreconditionError):
        type4_inequality(parse_field("u + absz2"), ORIGIN)


def test_model_thresholds():
    expected = {
        Fraction(0): (Strict4.STRICT, True, Verdict.PASS),
        Fraction(1, 2): (Strict4.STRICT, True, Verdict.PASS),
        Fraction(9, 10): (Strict4.STRICT, True, Verdict.PASS),
        Fraction(1): (Strict4.STRICT, False, Verdict.PASS),
        Fraction(6, 5): (Strict4.STRICT, False, Verdict.PASS),
        Fraction(4, 3): (Strict4.WEAK, False, Verdict.PASS),
        Fraction(7, 5): (Strict4.WEAK, False, Verdict.FAIL),
    }
    for a, (strict, kohn, verdict) in expected.items():
        r = _model(a)
        assert strict_type4(r, ORIGIN) == strict, a
        assert kohn_strict_type4(r, ORIGIN) is kohn, a
        assert classify_point(r, ORIGIN).pseudoconvex == verdict, a


def test_kohn_is_not_applicable_off_type4():
    assert kohn_strict_type4(parse_field("u + absz2"), ORIGIN) is None
    assert strict_type4(gallery.make("power", {"m": 3}).field, ORIGIN) == Strict4.NOT_APPLICABLE


@settings(max_examples=15, deadline=None)
@given(st.fractions(min_value=0, max_value=Fraction(4, 3), max_denominator=1000))
def test_type4_inequality_on_pseudoconvex_models(a):
    llbar, ll = type4_inequality(_model(a), ORIGIN)
    assert llbar.real >= abs(ll) - 1e-9 * max(1.0, abs(llbar), abs(ll))


def test_strict4_in_coordinates():
    assert strict4_coordinate_test(_model(Fraction(9, 10)))
    assert not strict4_coordinate_test(_model(Fraction(7, 5)))
    with pytest.raises(errors.PreconditionError):
        strict4_coordinate_test(parse_field("u + x"))


def test_pseudoconvexity_scan():
    box = ((-0.2, 0.2), (-0.2, 0.2), (-0.05, 0.05), (-0.2, 0.2))
    concave = parse_field("u - absz2")
    scan = pseudoconvex_scan(concave, sample_boundary(concave, box, 32, seed=1))
    assert scan.verdict == Verdict.FAIL
    assert 0 < len(scan.witnesses) <= 5
    assert all(value < 0 for _, value in scan.witnesses)
    convex = parse_field("u + absz2")
    assert pseudoconvex_scan(convex, sample_boundary(convex, box, 32, seed=1)).verdict == Verdict.PASS
    with pytest.raises(errors.EmptySampleError):
        pseudoconvex_scan(convex, np.zeros((0, 4)))


def test_report_dictionary():
    report = classify_point(_model(Fraction(1, 2)), ORIGIN).to_dict()
    assert report["c_p"] == 4
    assert report["strict4"] == "Strict"
    assert report["kohn4"] is True
    assert report["type4"]["LLbar_lambda"] == pytest.approx(4.0)
    assert report["local_scan"] is None
    assert set(report["tolerances"]) >= {"tol_zero", "tol_bdry", "lambda_min", "psd_tol"}


ALL_CASES = [
    test_strictly_pseudoconvex_point,
    test_types_of_powers,
    test_odd_type_is_not_pseudoconvex,
    test_flat_boundary_exceeds_the_order,
    test_off_boundary_point,
    test_model_type4_values,
    test_model_thresholds,
    test_kohn_is_not_applicable_off_type4,
    test_type4_inequality_on_pseudoconvex_models,
    test_strict4_in_coordinates,
    test_pseudoconvexity_scan,
    test_report_dictionary,
]
