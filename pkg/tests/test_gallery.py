"""Testcases for the built-in domains and their checks."""

import math
from fractions import Fraction

import numpy as np
import pytest

from pshlab import errors, gallery
from pshlab.boundary import sample_boundary
from pshlab.certify import Condition
from pshlab.cframe import complex_hessian, levi_values
from pshlab.classify import Verdict
from pshlab.defaults import eval_gallery_spec
from pshlab.expr import parse_field


def test_make_and_list():
    entries = gallery.list_entries()
    assert [e["id"] for e in entries] == list(gallery.GALLERY_IDS)
    assert all(e["claims"] for e in entries)

    local = gallery.make("omega_local")
    assert local.params == {"k": 3}
    assert local.field.evaluate(local.point) == 0.0
    global_claims = [c.name for c in gallery.make("omega_global", {"k": 4}).claims]
    assert "bounded" in global_claims
    assert "pseudoconvex" in global_claims

    model = gallery.make(*eval_gallery_spec("model:a=4/3"))
    assert model.params["a"] == Fraction(4, 3)
    assert model.to_dict()["params"] == {"a": "4/3"}
    assert gallery.make(*eval_gallery_spec("tube:f=x^4 + y^4")).source == "u + (x^4 + y^4)"


def test_invalid_entries():
    with pytest.raises(errors.UnknownGalleryError):
        gallery.make("sphere")
    for params in ({"k": 2}, {"k": "x"}, {"k": 3.5}):
        with pytest.raises(errors.ConfigError):
            gallery.make("omega_local", params)
    with pytest.raises(errors.ConfigError):
        gallery.make("model", {"a": "x"})
    with pytest.raises(errors.ConfigError):
        eval_gallery_spec("omega_local:k")


def test_omega_closed_forms():
    assert gallery.mu(3) == Fraction(1, 2)
    assert gallery.mu(4) == Fraction(1, 6)
    points = np.array([(0.05, 0.03, -0.01, 0.02), (-0.02, 0.04, 0.0, -0.03)])
    for k in (3, 4):
        for global_domain in (False, True):
            r = gallery.make("omega_global" if global_domain else "omega_local", {"k": k}).field
            partials = gallery.omega_partials(k, points, global_domain)
            numeric = complex_hessian(r, points, (1.0, 0.0), (1.0, 0.0))
            assert np.allclose(partials["r_zzbar"], numeric, rtol=1e-9, atol=1e-15)
            numeric = complex_hessian(r, points, (0.0, 1.0), (0.0, 1.0))
            assert np.allclose(partials["r_wwbar"], numeric, rtol=1e-9, atol=1e-15)


def test_tanlog_closed_forms():
    entry = gallery.make("tanlog")
    samples = sample_boundary(entry.field, entry.box, 32)
    assert np.allclose(levi_values(entry.field, samples.points, "raw"), gallery.tanlog_levi(samples.points), atol=1e-10)
    for s in (1e-3, 1e-2, 0.1):
        assert gallery.weak_direction_value(s) == pytest.approx(-s / 2 - s * s / 4, abs=1e-12)

    rows = gallery.lambda_plot_slice(entry, grid=(5, 5))
    assert rows
    points = np.array([(x, 0.0, 0.0, v) for x, v, _ in rows])
    assert np.allclose([row[2] for row in rows], gallery.tanlog_levi(points), atol=1e-12)


def test_sclc_check():
    assert gallery.sclc_check(1, 0, 1)
    assert gallery.sclc_check(Fraction(1, 2), 1, 1)
    assert not gallery.sclc_check(1, 2, 1)
    assert not gallery.sclc_check(-1, 0, 2)


def test_f_k_on_its_interval():
    for k in (3, 4, 5):
        lo, hi = gallery.interval_k(k)
        assert lo == 0.1
        assert hi == pytest.approx(4 ** (-1 / (2 * k - 1)))
        grid = np.linspace(lo, hi, 200)[1:]
        assert np.all(gallery.f_k(k, grid) < 0)


def test_levi_lower_bound():
    entry = gallery.make("omega_local")
    certificate = gallery.levi_lower_bound_check(3, sample_boundary(entry.field, entry.box, 64))
    assert certificate.condition == Condition.LEVI_BOUND
    assert certificate.verdict == Verdict.PASS
    assert certificate.details["constant"] == "1/8"
    with pytest.raises(errors.EmptySampleError):
        gallery.levi_lower_bound_check(3, np.array([(0.5, 0.0, 0.0, 0.0)]))
    with pytest.raises(errors.EmptySampleError):
        gallery.levi_lower_bound_check(3, np.zeros((0, 4)))


def test_global_domain():
    entry = gallery.make("omega_global")
    samples = sample_boundary(entry.field, entry.box, 64)
    bounds = gallery.global_bounds_check(3, samples)
    assert bounds.verdict == Verdict.PASS
    assert bounds.details["max_abs_v"] <= 0.5
    psc = gallery.global_psc_check(3, samples, grid_size=1000)
    assert psc.verdict == Verdict.PASS
    assert psc.details["f_k_max"] < 0

    outside = gallery.global_bounds_check(3, np.array([(0.0, 0.0, 0.5, 0.0)]))
    assert outside.verdict == Verdict.FAIL
    assert outside.witnesses[0].value == pytest.approx(0.5)


def test_curve_branches():
    c = 1 / 9 - 2 / 4 + 1
    assert gallery.curve_u(3, 0.1) == pytest.approx(-(c * 0.1**6 + 0.1**10))
    lower = gallery.curve_u(3, 0.1, "lower", global_domain=True)
    upper = gallery.curve_u(3, 0.1, "upper", global_domain=True)
    assert lower == pytest.approx(0.0, abs=1e-3)
    assert upper == pytest.approx(-1.0, abs=1e-3)

    for branch in ("lower", "upper"):
        points = gallery.boundary_curve(3, 0.1, np.linspace(0, 2 * np.pi, 8), branch, global_domain=True)
        assert points.shape == (8, 4)
        assert np.allclose(points[:, 3], 0.01)

    with pytest.raises(errors.CurveBranchError):
        gallery.curve_u(3, 0.1, "upper")
    with pytest.raises(errors.CurveBranchError):
        gallery.curve_u(3, 0.1, "middle")
    with pytest.raises(errors.CurveBranchError):
        gallery.curve_u(3, 0.8, global_domain=True)


def test_loop_integrals():
    assert abs(gallery.loop_integral("x*y", 3, 0.1)) <= 1e-10
    assert abs(gallery.loop_integral(parse_field("x^2 - v*y"), 4, 0.2)) <= 1e-10
    with pytest.raises(ValueError):
        gallery.loop_integral("x*y", 3, 0.1, quadrature_n=32)

    for k in (3, 4):
        for row in gallery.obstruction_scaling(k, (0.05, 0.1, 0.2)):
            assert row["ratio"] == pytest.approx(1.0, abs=1e-6)
            assert row["expected"] == pytest.approx(8 * math.pi * float(gallery.mu(k)) * row["sigma"] ** (2 * k - 2))

    perturbed = gallery.obstruction_scaling(3, (0.05, 0.1), perturbation=1.0)
    for row in perturbed:
        assert row["ratio"] == pytest.approx(1 - row["sigma"] ** 2, abs=1e-6)


def test_candidate_multipliers():
    candidates = gallery.candidate_multipliers(20)
    assert len(candidates) == 20
    assert candidates[:2] == ["0", "y + u"]
    assert candidates == gallery.candidate_multipliers(20)
    assert gallery.candidate_multipliers(3) == ["0", "y + u", "x^2 + y^2"]
    for text in candidates:
        parse_field(text)


ALL_CASES = [
    test_make_and_list,
    test_invalid_entries,
    test_omega_closed_forms,
    test_tanlog_closed_forms,
    test_sclc_check,
    test_f_k_on_its_interval,
    test_levi_lower_bound,
    test_global_domain,
    test_curve_branches,
    test_loop_integrals,
    test_candidate_multipliers,
]
