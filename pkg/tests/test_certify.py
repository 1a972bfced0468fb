"""Testcases for the sampled certificates."""

import numpy as np
import pytest

from pshlab import errors, gallery
from pshlab.boundary import refine_samples, sample_boundary
from pshlab.certify import (
    NOT_APPLICABLE,
    Condition,
    basic_estimate_C,
    cond_psh_boundary,
    cond_sesqui,
    direction_grid,
    psd_on_samples,
    psh_open_scan,
    ratio_O,
    required_C,
    select_df_constant,
    type6_normal_vanish,
)
from pshlab.cframe import normal_derivative_levi
from pshlab.classify import Verdict
from pshlab.construct import graft
from pshlab.defaults import TOLERANCES
from pshlab.expr import parse_field

ORIGIN = (0.0, 0.0, 0.0, 0.0)
SMALL_BOX = ((-0.05, 0.05),) * 4


def _levels(n=10, count=2):
    rng = np.random.default_rng(7)
    return [rng.uniform(-0.1, 0.1, size=(n, 4)) for _ in range(count)]


def _interior(depths, radii):
    rows = []
    for d in depths:
        for rho in radii:
            for angle in (0.0, 2.0, 4.0):
                x, y = rho * np.cos(angle), rho * np.sin(angle)
                rows.append((x, y, -(x * x + y * y) - d, 0.05 * angle - 0.1))
    return np.array(rows)


def test_ratio_of_stable_constants():
    levels = _levels()
    g = [np.full(10, 0.5), np.full(10, 0.25)]
    f = [0.5 * g[0], 0.5 * g[1]]
    certificate = ratio_O(f, g, levels)
    assert certificate.verdict == Verdict.PASS
    assert certificate.passed
    assert certificate.details["ratio_constants"] == pytest.approx([0.5, 0.5])
    assert certificate.levels[1].usable == 10
    assert certificate.condition == Condition.RATIO_O
    assert certificate.to_dict()["verdict"] == "pass"


def test_ratio_of_growing_constants():
    levels = _levels()
    g = [np.ones(10), np.ones(10)]
    f = [np.ones(10), np.linspace(1.0, 5.0, 10)]
    certificate = ratio_O(f, g, levels)
    assert certificate.verdict == Verdict.FAIL
    witness = certificate.witnesses[0]
    assert witness.value == pytest.approx(5.0)
    assert witness.point == tuple(levels[1][9])


def test_ratio_residual_below_lambda_min():
    levels = _levels()
    g = [np.ones(10), np.concatenate([np.ones(9), [0.0]])]
    f = [np.ones(10), np.concatenate([np.ones(9), [1.0]])]
    certificate = ratio_O(f, g, levels)
    assert certificate.verdict == Verdict.FAIL
    assert certificate.levels[1].below_lambda_min == 1
    assert certificate.levels[1].residual == 1.0
    assert certificate.witnesses[0].point == tuple(levels[1][9])


def test_ratio_with_few_usable_samples():
    levels = _levels()
    g = [np.ones(10), np.concatenate([np.ones(4), np.zeros(6)])]
    f = [np.ones(10), np.concatenate([np.ones(4), np.zeros(6)])]
    certificate = ratio_O(f, g, levels)
    assert certificate.verdict == Verdict.INCONCLUSIVE
    assert certificate.levels[1].usable == 4


def test_ratio_preconditions():
    levels = _levels()
    with pytest.raises(errors.DegenerateInputError):
        ratio_O([np.ones(10)] * 2, [np.zeros(10)] * 2, levels)
    with pytest.raises(errors.PreconditionError):
        ratio_O([np.ones(10)], [np.ones(10)], levels[:1])
    with pytest.raises(errors.PreconditionError):
        ratio_O([np.ones(10)] * 2, None, levels)
    with pytest.raises(errors.EmptySampleError):
        ratio_O([np.zeros(0)] * 2, [np.zeros(0)] * 2, [np.zeros((0, 4))] * 2)


def test_ratio_of_a_field():
    coarse = _levels(count=1)[0]
    levels = [coarse, 0.5 * coarse]
    certificate = ratio_O(parse_field("x"), [np.ones(10), np.ones(10)], levels)
    assert certificate.verdict == Verdict.PASS
    first, second = certificate.details["ratio_constants"]
    assert first == pytest.approx(np.abs(coarse[:, 0]).max())
    assert second == pytest.approx(first / 2)


def test_psh_boundary_of_the_ball_model():
    r = parse_field("u + absz2")
    levels = refine_samples(r, SMALL_BOX, 32)
    certificate = cond_psh_boundary(r, levels)
    assert certificate.verdict == Verdict.PASS
    assert certificate.condition == Condition.COND_LN
    assert len(certificate.levels) == 2


def test_sesquiconvexity_of_the_ball_model():
    r = parse_field("u + absz2")
    certificate = cond_sesqui(r, refine_samples(r, SMALL_BOX, 32))
    assert certificate.verdict == Verdict.PASS
    assert certificate.condition == Condition.SESQUI


def test_psd_on_samples():
    convex = parse_field("u + absz2")
    certificate = psd_on_samples(convex, sample_boundary(convex, SMALL_BOX, 32))
    assert certificate.verdict == Verdict.PASS
    assert certificate.tolerances["psd_tol"] == TOLERANCES.psd_tol

    concave = parse_field("u - absz2")
    certificate = psd_on_samples(concave, sample_boundary(concave, SMALL_BOX, 32))
    assert certificate.verdict == Verdict.FAIL
    assert 0 < len(certificate.witnesses) <= 5
    assert all(w.value < 0 for w in certificate.witnesses)


def test_psh_open_scan():
    points = np.random.default_rng(3).uniform(-1, 1, size=(50, 4))
    certificate = psh_open_scan(parse_field("absz2 + absw2 + u"), points)
    assert certificate.verdict == Verdict.PASS
    assert "coercivity_c" in certificate.details

    certificate = psh_open_scan(parse_field("-absz2"), points, coercivity=False)
    assert certificate.verdict == Verdict.FAIL
    assert "coercivity_c" not in certificate.details
    assert certificate.witnesses[0].value == pytest.approx(-1.0)


def test_required_C():
    r = parse_field("u + absz2")
    assert required_C(r, sample_boundary(r, SMALL_BOX, 32)).value == 0.0

    bent = parse_field("u + absz2 - 10*u^2")
    constant = required_C(bent, sample_boundary(bent, SMALL_BOX, 32))
    assert constant.verdict == Verdict.PASS
    assert constant.value > 20

    hopeless = required_C(bent, sample_boundary(bent, SMALL_BOX, 32), grid=(0.0, 1.0))
    assert hopeless.value is None
    assert hopeless.verdict == Verdict.FAIL
    assert hopeless.witness is not None
    assert hopeless.as_certificate().witnesses


def test_direction_grid():
    grid = direction_grid()
    assert grid.shape == (64, 2)
    assert np.allclose(np.linalg.norm(grid, axis=1), 1.0)
    assert np.array_equal(grid, direction_grid())
    assert direction_grid(8).shape == (8, 2)


def test_basic_estimate_C():
    r = parse_field("u + absz2")
    constant = basic_estimate_C(r, sample_boundary(r, SMALL_BOX, 16))
    assert constant.value == 0.0
    assert constant.verdict == Verdict.PASS
    assert constant.skipped >= 16
    assert constant.evaluated > constant.skipped

    concave = parse_field("u - absz2")
    assert basic_estimate_C(concave, sample_boundary(concave, SMALL_BOX, 16)).value > 0


def test_type6_normal_vanish():
    for m in (3, 4):
        r = parse_field(f"u + absz2^{m}")
        assert type6_normal_vanish(r, ORIGIN) is True
        assert abs(normal_derivative_levi(r, ORIGIN)) <= 1e-10
    assert type6_normal_vanish(parse_field("u + absz2^2"), ORIGIN) == NOT_APPLICABLE
    assert type6_normal_vanish(parse_field("u - absz2^3"), ORIGIN) == NOT_APPLICABLE
    # type 6, but H_r(L, N) does not vanish near the origin
    tilted = parse_field("u + absz2^3 + u*absz2")
    assert normal_derivative_levi(tilted, ORIGIN) == pytest.approx(1.0)
    assert type6_normal_vanish(tilted, ORIGIN) == NOT_APPLICABLE


def test_sesquiconvexity_fails_on_tanlog():
    entry = gallery.make("tanlog")
    levels = refine_samples(entry.field, entry.box, 400, 2, entry.loci, 0)
    assert cond_sesqui(entry.field, levels).verdict == Verdict.FAIL
    flat = parse_field("u + x^2 + y^2")
    assert cond_sesqui(flat, refine_samples(flat, SMALL_BOX, 32)).verdict == Verdict.PASS


def test_sesquiconvexity_is_invariant_under_multipliers():
    ball = parse_field("u + absz2")
    entry = gallery.make("tanlog")
    cases = [
        (ball, refine_samples(ball, SMALL_BOX, 32), Verdict.PASS),
        (entry.field, refine_samples(entry.field, entry.box, 400, 2, entry.loci, 0), Verdict.FAIL),
    ]
    for r, levels, expected in cases:
        for h in gallery.candidate_multipliers(10, 1):
            assert cond_sesqui(graft(r, h), levels).verdict == expected, h


def test_no_multiplier_makes_omega_psh_on_the_boundary():
    entry = gallery.make("omega_local", {"k": 3})
    levels = refine_samples(entry.field, entry.box, 400, 4, entry.loci, 0)
    assert cond_psh_boundary(entry.field, levels).verdict == Verdict.FAIL
    for h in gallery.candidate_multipliers(20, 0):
        assert cond_psh_boundary(graft(entry.field, h), levels).verdict == Verdict.FAIL, h


def test_tanlog_grafts_are_psh_on_the_boundary():
    entry = gallery.make("tanlog")
    levels = refine_samples(entry.field, entry.box, 400, 2, entry.loci, 0)
    for h in ("y + u", "y + ln(cos(x))"):
        assert cond_psh_boundary(graft(entry.field, h), levels).verdict == Verdict.PASS, h



def test_df_constant_selection():
    points = _interior((0.01, 0.05, 0.1), (0.0, 0.05, 0.1))
    K, certificate = select_df_constant(parse_field("u + absz2"), 0.5, points)
    assert K == 0.0
    assert certificate.condition == Condition.DF_BUMP
    assert certificate.details["eta"] == 0.5

    shallow = np.array([(0.0, 0.0, -d, 0.0) for d in (0.001, 0.002, 0.005)])
    K, certificate = select_df_constant(parse_field("u - (x^2 + y^2)"), 0.5, shallow)
    assert K is None
    assert certificate.verdict == Verdict.FAIL
    assert certificate.details["K"] == 100.0


ALL_CASES = [
    test_ratio_of_stable_constants,
    test_ratio_of_growing_constants,
    test_ratio_residual_below_lambda_min,
    test_ratio_with_few_usable_samples,
    test_ratio_preconditions,
    test_ratio_of_a_field,
    test_psh_boundary_of_the_ball_model,
    test_sesquiconvexity_of_the_ball_model,
    test_psd_on_samples,
    test_psh_open_scan,
    test_required_C,
    test_direction_grid,
    test_basic_estimate_C,
    test_type6_normal_vanish,
    test_sesquiconvexity_fails_on_tanlog,
    test_sesquiconvexity_is_invariant_under_multipliers,
    test_no_multiplier_makes_omega_psh_on_the_boundary,
    test_tanlog_grafts_are_psh_on_the_boundary,
    test_df_constant_selection,
]
