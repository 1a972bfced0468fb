"""Testcases for projection, signed distance and boundary sampling."""

import csv
import tempfile
from pathlib import Path

import numpy as np
import pytest

from pshlab import errors
from pshlab.boundary import (
    SampleSet,
    project_onto,
    project_to_boundary,
    refine_samples,
    sample_boundary,
    signed_distance,
    taylor_normal,
    tubular_samples,
)
from pshlab.cframe import levi_values
from pshlab.expr import parse_field

BOX = ((-0.2, 0.2), (-0.2, 0.2), (-0.05, 0.05), (-0.2, 0.2))


def test_projection_onto_a_plane():
    r = parse_field("u - 1")
    assert np.allclose(project_to_boundary(r, (0.0, 0.0, 2.0, 0.0)), (0.0, 0.0, 1.0, 0.0))
    assert signed_distance(r, (0.3, 0.0, 2.0, 0.0)) == pytest.approx(1.0)
    assert signed_distance(r, (0.3, 0.0, 0.5, 0.0)) == pytest.approx(-0.5)


def test_projection_onto_a_sphere_is_orthogonal():
    r = parse_field("absz2 + absw2 - 1")
    q = np.array([[0.5, 0.5, 0.5, 0.5], [0.1, -0.2, 0.3, 0.9], [0.0, 0.0, 0.0, 3.0]])
    p = project_to_boundary(r, q)
    expected = q / np.linalg.norm(q, axis=1)[:, None]
    assert np.allclose(p, expected, atol=1e-9)
    assert np.allclose(signed_distance(r, q), np.linalg.norm(q, axis=1) - 1)


def test_projection_failure_has_diagnostics():
    r = parse_field("absz2 + absw2 + 1")
    with pytest.raises(errors.ProjectionError) as info:
        project_to_boundary(r, (0.5, 0.0, 0.0, 0.0))
    assert info.value.diagnostics["converged"] is False
    assert info.value.diagnostics["failures"] == 1


def test_taylor_along_the_normal():
    r = parse_field("u")
    f = parse_field("x + u^2")
    on_boundary, normal, residual = taylor_normal(f, r, (0.2, 0.0, 0.1, 0.0))
    assert on_boundary == pytest.approx(0.2)
    assert normal == pytest.approx(0.0)
    assert residual == pytest.approx(0.01)


def test_common_zero_set():
    fields = [parse_field("x"), parse_field("v - absz2")]
    points, converged = project_onto(fields, np.array([[0.3, 0.1, 0.0, 0.5], [-0.2, 0.0, 0.4, 0.0]]))
    assert converged.all()
    assert np.allclose(points[:, 0], 0.0, atol=1e-12)
    assert np.allclose(points[:, 3], points[:, 1] ** 2, atol=1e-12)


def test_sampling_lands_on_the_boundary():
    r = parse_field("u + absz2^2 - x*v^2")
    samples = sample_boundary(r, BOX, 64, seed=5)
    assert len(samples) == 64
    assert samples.shortfall == 0
    assert np.abs(r.evaluate(samples.points)).max() <= 1e-10
    lower = np.array([lo for lo, _ in BOX])
    upper = np.array([hi for _, hi in BOX])
    assert np.all((samples.points >= lower) & (samples.points <= upper))
    assert np.allclose(samples.levi, levi_values(r, samples.points))


def test_sampling_is_deterministic():
    r = parse_field("u + absz2")
    first = sample_boundary(r, BOX, 40, seed=11)
    second = sample_boundary(r, BOX, 40, seed=11)
    other = sample_boundary(r, BOX, 40, seed=12)
    assert np.array_equal(first.points, second.points)
    assert not np.array_equal(first.points, other.points)


def test_grid_strategy():
    r = parse_field("u + absz2")
    samples = sample_boundary(r, BOX, 20, strategy="grid")
    assert len(samples) == 20
    with pytest.raises(ValueError):
        sample_boundary(r, BOX, 20, strategy="random")


def test_refinement_clusters_at_the_locus():
    r = parse_field("u + absz2^2")
    levels = refine_samples(r, BOX, 48, levels=3, loci=[["x", "y"]], seed=2)
    assert [int(level.level[0]) for level in levels] == [0, 1, 2]
    radius = [np.median(np.hypot(level.points[:, 0], level.points[:, 1])) for level in levels]
    assert radius[0] > radius[1] > radius[2]
    assert np.median(levels[2].levi) < np.median(levels[0].levi)


def test_tubular_points():
    r = parse_field("u + absz2")
    samples = sample_boundary(r, BOX, 16, seed=1)
    points, deltas = tubular_samples(r, samples, [-0.01, 0.01])
    assert points.shape == (32, 4)
    assert np.allclose(np.sign(r.evaluate(points)), np.sign(deltas))


def test_sample_sets():
    r = parse_field("u + absz2")
    samples = sample_boundary(r, BOX, 16, seed=4)
    subset = samples.subset(samples.points[:, 0] > 0)
    both = SampleSet.concat([subset, samples.subset(samples.points[:, 0] <= 0)])
    assert len(both) == 16
    with tempfile.TemporaryDirectory() as directory:
        path = Path(directory) / "samples.csv"
        samples.to_csv(path)
        with open(path, newline="") as f:
            rows = list(csv.reader(f))
    assert rows[0] == ["x", "y", "u", "v", "lambda", "|dr|"]
    assert len(rows) == 17
    with pytest.raises(errors.EmptySampleError):
        SampleSet.concat([])


def test_boundary_sample_records():
    r = parse_field("u + absz2")
    samples = sample_boundary(r, BOX, 8, seed=5)
    records = list(samples.samples(r))
    assert len(records) == 8
    for record, point, lam in zip(records, samples.points, samples.levi):
        assert np.array_equal(record.point, point)
        assert record.levi == pytest.approx(lam)
        assert record.weight == 1.0
        assert record.frame.L.shape == (2,)
        assert abs(np.vdot(record.frame.L, record.frame.L)) == pytest.approx(1.0)
        assert float(np.dot(record.frame.nu, record.frame.T)) == pytest.approx(0.0, abs=1e-12)



ALL_CASES = [
    test_projection_onto_a_plane,
    test_projection_onto_a_sphere_is_orthogonal,
    test_projection_failure_has_diagnostics,
    test_taylor_along_the_normal,
    test_common_zero_set,
    test_sampling_lands_on_the_boundary,
    test_sampling_is_deterministic,
    test_grid_strategy,
    test_refinement_clusters_at_the_locus,
    test_tubular_points,
    test_sample_sets,
    test_boundary_sample_records,
]
