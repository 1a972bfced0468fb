"""Testcases for frames, Hessian forms and the Levi form."""

import numpy as np
import pytest

from pshlab import errors
from pshlab.boundary import sample_boundary
from pshlab.cframe import (
    LeviJets,
    chern_nabla,
    complex_hessian,
    convexity_flags,
    frame_at,
    frame_fields,
    hessian_matrix_LN,
    levi,
    levi_field,
    levi_values,
    levi_words_at,
    lie_derivative_words,
    normal_derivative_levi,
    normal_levi_field,
    normalize_at,
    real_hessian_matrix,
)
from pshlab.construct import graft
from pshlab.expr import parse_field

BOX = ((-0.3, 0.3), (-0.3, 0.3), (-0.3, 0.3), (-0.3, 0.3))
ORIGIN = (0.0, 0.0, 0.0, 0.0)


def _samples(source, n=32):
    r = parse_field(source)
    return r, sample_boundary(r, BOX, n, seed=3)


def test_frame_is_orthonormal():
    r, samples = _samples("u + absz2 + x*v^2 - y^3")
    frame = frame_at(r, samples.points)
    basis = frame.basis()
    assert np.allclose(np.einsum("nij,nkj->nik", basis, basis), np.eye(4), atol=1e-12)
    gram = np.einsum("nj,nj->n", frame.L, np.conj(frame.N))
    assert np.allclose(gram, 0.0, atol=1e-12)
    assert np.allclose(np.linalg.norm(frame.L, axis=1), 1.0)
    assert np.allclose(frame.norm_del_r * np.sqrt(2), frame.norm_dr)


def test_L_is_tangential():
    r, samples = _samples("u + absz2^2 + v^2*x")
    frame = frame_at(r, samples.points)
    grad = np.stack([r.diff(v).evaluate(samples.points) for v in "xyuv"], axis=1)
    r_z = 0.5 * (grad[:, 0] - 1j * grad[:, 1])
    r_w = 0.5 * (grad[:, 2] - 1j * grad[:, 3])
    assert np.allclose(frame.L[:, 0] * r_z + frame.L[:, 1] * r_w, 0.0, atol=1e-12)
    assert np.allclose(np.einsum("ni,ni->n", frame.X, grad), 0.0, atol=1e-12)
    assert np.allclose(np.einsum("ni,ni->n", frame.nu, grad), frame.norm_dr)


def test_levi_of_the_ball_model():
    r = parse_field("u + absz2")
    assert levi(r, ORIGIN) == pytest.approx(1.0)
    assert levi(r, ORIGIN, normalization="raw") == pytest.approx(0.25)
    p = (0.5, 0.0, -0.25, 0.0)
    assert levi(r, p) == pytest.approx(1 / (1 + 4 * 0.25))
    assert levi(r, p, normalization="raw") == pytest.approx(0.25)


def test_levi_requires_boundary_points():
    r = parse_field("u + absz2")
    with pytest.raises(errors.OffBoundaryError) as info:
        levi(r, (0.0, 0.0, 1.0, 0.0))
    assert info.value.value == pytest.approx(1.0)
    with pytest.raises(ValueError):
        levi(r, ORIGIN, normalization="other")


def test_degenerate_gradient():
    with pytest.raises(errors.DegenerateGradientError) as info:
        frame_at(parse_field("absz2 + absw2 - 1"), ORIGIN)
    assert info.value.point == ORIGIN


def test_levi_is_conformal():
    r, samples = _samples("u + absz2^2 - x*y*v")
    h = parse_field("y + u^2 - x*v")
    rho = graft(r, h)
    expected = np.exp(h.evaluate(samples.points)) * levi_values(r, samples.points)
    assert np.allclose(levi_values(rho, samples.points), expected, rtol=1e-8, atol=1e-12)


def test_symbolic_and_jet_levi_agree():
    r, samples = _samples("u + absz2^2 + x^2*v")
    points = samples.points[:8]
    symbolic = levi_field(r).evaluate(points)
    assert np.allclose(symbolic, levi_values(r, points), atol=1e-12)
    frame = frame_fields(r)
    lam = frame.levi_field()
    llbar = frame.apply_L(frame.apply_Lbar(lam)).evaluate(points)
    jets = LeviJets(r, points, 2)
    assert np.allclose(jets.value("L,Lb"), llbar, rtol=1e-8, atol=1e-10)


def test_symbolic_words_and_normal_derivative_match_the_jets():
    r, samples = _samples("u + absz2^2 + x^2*v + y*u")
    points = samples.points[:8]
    jets = LeviJets(r, points, 2)
    words = levi_words_at(r, points, ("L,Lb", "L,L"))
    assert np.allclose(words["L,Lb"], jets.value("L,Lb"), rtol=1e-8, atol=1e-10)
    assert np.allclose(words["L,L"], jets.value("L,L"), rtol=1e-8, atol=1e-10)
    nu = jets.apply_nu(jets.levi).value.real
    assert np.allclose(normal_derivative_levi(r, points), nu, rtol=1e-8, atol=1e-10)
    assert np.allclose(normal_levi_field(r).evaluate(points), nu, rtol=1e-8, atol=1e-10)
    with pytest.raises(ValueError):
        frame_fields(r).word("L,N")
    with pytest.raises(errors.DegenerateGradientError):
        levi_words_at(parse_field("absz2"), ORIGIN, ("L,Lb",))



def test_type4_words_of_the_model():
    a = 0.6
    r = parse_field("u + $a*absz2*(x^2 - y^2) + absz2^2", {"a": a})
    words = lie_derivative_words(r, ORIGIN, 2)
    assert words["lambda"] == pytest.approx(0.0, abs=1e-14)
    assert words["L,Lb"] == pytest.approx(4.0)
    assert words["L,L"] == pytest.approx(3 * a)
    assert words["L"] == pytest.approx(0.0, abs=1e-14)


def test_hessian_matrix_is_linear():
    r, samples = _samples("u + absz2 - v^2")
    f = parse_field("x^2*u + sin(y)")
    g = parse_field("v^3 - x*y")
    total = hessian_matrix_LN(f + g, samples.points, reference=r)
    parts = hessian_matrix_LN(f, samples.points, reference=r) + hessian_matrix_LN(g, samples.points, reference=r)
    assert np.allclose(total.matrix(), parts.matrix(), atol=1e-12)


def test_hessian_matrix_entries():
    r = parse_field("u + absz2")
    hm = hessian_matrix_LN(r, ORIGIN)
    assert hm.h11 == pytest.approx(1.0)
    assert abs(hm.h12) == pytest.approx(0.0)
    assert hm.h22 == pytest.approx(0.0)
    assert complex_hessian(r, ORIGIN, (1, 0), (1, 0)) == pytest.approx(1.0)
    assert np.allclose(hm.eigenvalues(), [[0.0, 1.0]])


def test_real_hessian_in_the_frame():
    # a convex defining function: the tangential block is positive definite
    r = parse_field("u + absz2 + v^2")
    q = real_hessian_matrix(r, ORIGIN)
    assert q.entry("X", "X") == pytest.approx(2.0)
    assert q.entry("T", "T") == pytest.approx(2.0)
    assert q.entry("X", "T") == pytest.approx(0.0)
    flags = convexity_flags(q)
    assert flags["convex"].all() and flags["pseudoconvex"].all()
    concave = convexity_flags(real_hessian_matrix(parse_field("u - absz2"), ORIGIN))
    assert not concave["c_convex"].any()


def test_normal_derivative_of_the_levi_form():
    # lambda = 1 / (1 + 4|z|^2) only depends on z, nu = d/du at the origin
    assert normal_derivative_levi(parse_field("u + absz2"), ORIGIN) == pytest.approx(0.0, abs=1e-14)
    value = normal_derivative_levi(parse_field("u + absz2*(1 + u)"), ORIGIN)
    assert value == pytest.approx(1.0)


def test_chern_connection_of_constant_fields():
    assert np.allclose(chern_nabla((1, 0), (0, 1), (0.2, 0.1, 0.0, 0.0)), [0, 0])
    z = parse_field("x")
    value = chern_nabla((1, 0), (z, 0), (0.2, 0.1, 0.0, 0.0))
    assert np.allclose(value, [0.5, 0.0])


def test_normalization_of_a_tilted_plane():
    r = parse_field("u + x")
    phi, normalized = normalize_at(r, ORIGIN)
    grad = np.array([normalized.diff(v).evaluate(ORIGIN) for v in "xyuv"])
    assert 0.5 * (grad[0] - 1j * grad[1]) == pytest.approx(0.0, abs=1e-12)
    assert 0.5 * (grad[2] - 1j * grad[3]) == pytest.approx(0.5)
    assert np.allclose(phi.apply(ORIGIN), ORIGIN)


def test_normalization_keeps_normalized_fields():
    r = parse_field("u + $a*absz2*(x^2 - y^2) + absz2^2", {"a": 1})
    phi, normalized = normalize_at(r, ORIGIN)
    assert np.allclose(phi.jacobian(), np.eye(2))
    points = np.array([[0.1, 0.05, 0.02, -0.03], [-0.2, 0.1, 0.0, 0.1]])
    assert np.allclose(normalized.evaluate(points), r.evaluate(points))


ALL_CASES = [
    test_frame_is_orthonormal,
    test_L_is_tangential,
    test_levi_of_the_ball_model,
    test_levi_requires_boundary_points,
    test_degenerate_gradient,
    test_levi_is_conformal,
    test_symbolic_and_jet_levi_agree,
    test_symbolic_words_and_normal_derivative_match_the_jets,
    test_type4_words_of_the_model,
    test_hessian_matrix_is_linear,
    test_hessian_matrix_entries,
    test_real_hessian_in_the_frame,
    test_normal_derivative_of_the_levi_form,
    test_chern_connection_of_constant_fields,
    test_normalization_of_a_tilted_plane,
    test_normalization_keeps_normalized_fields,
]
