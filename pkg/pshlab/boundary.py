"""Projection onto the hypersurface {r = 0}, signed distance and boundary sampling.

Points are projected by damped Newton steps along grad r followed by a
Lagrange refinement which makes q - p parallel to grad r(p). Samples are seeded
in a box (Halton sequence or grid), optionally pulled towards degenerate loci
and then projected.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import qmc

from . import defaults, messages
from .cframe import FrameAt, frame_at, levi_values
from .errors import DomainError, EmptySampleError, ProjectionError
from .expr import ScalarField, as_points, evaluate, parse_field
from .taylor import taylor
from .utils import AnnotatedTimer, chunked, parallel_map, write_csv

logger = logging.getLogger(__name__)

Interval = Tuple[float, float]
BoxSpec = Sequence[Interval]

_DAMPING_STEPS = 12
_LAGRANGE_ITERATIONS = 20
_ANGLE_TOL = 1e-6

### PROJECTION ###
# region
def _jets(r: ScalarField, pts: np.ndarray, order: int):
    """Values, gradients (and Hessians) at points; rows outside the domain are nan."""
    n = len(pts)
    value = np.full(n, np.nan)
    grad = np.full((n, 4), np.nan)
    hess = np.full((n, 4, 4), np.nan)
    ok = np.ones(n, dtype=bool)
    if r.region is not None:
        ok &= r.region.contains(pts)
    ok &= np.all(np.isfinite(pts), axis=1)
    try:
        rows = np.flatnonzero(ok)
        jets = [taylor(r, pts[rows], order)] if len(rows) else []
        groups = [rows] if len(rows) else []
    except DomainError:
        jets, groups = [], []
        for i in np.flatnonzero(ok):
            try:
                jets.append(taylor(r, pts[i : i + 1], order))
                groups.append(np.array([i]))
            except DomainError:
                ok[i] = False
    for rows, jet in zip(groups, jets):
        value[rows] = jet.value
        grad[rows] = np.stack([jet.partial(e) for e in np.eye(4, dtype=int)], axis=1)
        if order >= 2:
            hess[rows] = jet.hessian()
    return value, grad, hess, ok


def _newton(r: ScalarField, pts: np.ndarray, tol: float, max_iter: int):
    p = pts.copy()
    value, grad, _, ok = _jets(r, p, 1)
    done = ok & (np.abs(value) <= tol)
    iterations = 0
    for iterations in range(1, max_iter + 1):
        active = ok & ~done
        if not np.any(active):
            break
        rows = np.flatnonzero(active)
        g = grad[rows]
        norm2 = np.einsum("ij,ij->i", g, g)
        bad = norm2 == 0
        ok[rows[bad]] = False
        rows, g, norm2 = rows[~bad], g[~bad], norm2[~bad]
        step = (value[rows] / norm2)[:, None] * g
        current = np.abs(value[rows])
        factor = np.ones(len(rows))
        pending = np.ones(len(rows), dtype=bool)
        for _ in range(_DAMPING_STEPS):
            trial = p[rows] - factor[:, None] * step
            trial_value, trial_grad, _, trial_ok = _jets(r, trial, 1)
            accept = pending & trial_ok & (np.abs(trial_value) < current)
            idx = rows[accept]
            p[idx] = trial[accept]
            value[idx] = trial_value[accept]
            grad[idx] = trial_grad[accept]
            pending &= ~accept
            if not np.any(pending):
                break
            factor[pending] *= 0.5
        ok[rows[pending]] = False
        done = ok & (np.abs(value) <= tol)
    return p, value, done, iterations


def _lagrange(r: ScalarField, q: np.ndarray, p: np.ndarray, tol: float):
    """Refines boundary points p so that q - p is parallel to grad r(p)."""
    value, grad, hess, ok = _jets(r, p, 2)
    norm2 = np.einsum("ij,ij->i", grad, grad)
    t = -np.einsum("ij,ij->i", q - p, grad) / norm2
    x = np.concatenate([p, t[:, None]], axis=1)
    for _ in range(_LAGRANGE_ITERATIONS):
        residual = np.concatenate([x[:, :4] - q + x[:, 4:5] * grad, value[:, None]], axis=1)
        scale = 1 + np.abs(q).max(axis=1)
        converged = (np.abs(value) <= tol) & (np.abs(residual[:, :4]).max(axis=1) <= 1e-13 * scale)
        if np.all(converged | ~ok):
            break
        jac = np.zeros((len(x), 5, 5))
        jac[:, :4, :4] = np.eye(4) + x[:, 4, None, None] * hess
        jac[:, :4, 4] = grad
        jac[:, 4, :4] = grad
        jac[~ok] = np.eye(5)
        residual[~ok] = 0
        step = np.einsum("nij,nj->ni", np.linalg.pinv(jac), residual)
        x = x - step
        value, grad, hess, new_ok = _jets(r, x[:, :4], 2)
        ok &= new_ok
    return x[:, :4], value, ok


def _parallel(q: np.ndarray, p: np.ndarray, grad: np.ndarray) -> np.ndarray:
    d = q - p
    length = np.linalg.norm(d, axis=1)
    g = grad / np.linalg.norm(grad, axis=1)[:, None]
    orthogonal = d - np.einsum("ij,ij->i", d, g)[:, None] * g
    return np.linalg.norm(orthogonal, axis=1) <= _ANGLE_TOL * np.maximum(length, 1e-300) + 1e-15


@dataclass
class Projection:
    """Result of a batched projection.

    Attributes:
        points: The projected points.
        values: r at the projected points.
        converged: |r| <= tol.
        parallel: q - p is parallel to grad r(p).
        iterations: Newton iterations used.
    """

    points: np.ndarray
    values: np.ndarray
    converged: np.ndarray
    parallel: np.ndarray
    iterations: int = 0


def project_points(
    r: ScalarField,
    points,
    tol: Optional[float] = None,
    max_iter: Optional[int] = None,
    orthogonal: bool = True,
) -> Projection:
    """Projects points onto {r = 0} without raising on failures."""
    tol = defaults.TOLERANCES.tol_bdry if tol is None else tol
    max_iter = defaults.TOLERANCES.newton_max_iter if max_iter is None else max_iter
    q, _ = as_points(points)

    def project_chunk(chunk):
        p, value, converged, iterations = _newton(r, chunk, tol, max_iter)
        parallel = np.zeros(len(chunk), dtype=bool)
        if orthogonal and np.any(converged):
            rows = np.flatnonzero(converged)
            refined, refined_value, refined_ok = _lagrange(r, chunk[rows], p[rows], tol)
            _, grad, _, grad_ok = _jets(r, refined, 1)
            good = refined_ok & grad_ok & (np.abs(refined_value) <= tol)
            good[good] &= _parallel(chunk[rows][good], refined[good], grad[good])
            p[rows[good]] = refined[good]
            value[rows[good]] = refined_value[good]
            parallel[rows[good]] = True
        return p, value, converged, parallel, iterations

    parts = parallel_map(project_chunk, chunked(q, 1024))
    return Projection(
        np.concatenate([part[0] for part in parts]),
        np.concatenate([part[1] for part in parts]),
        np.concatenate([part[2] for part in parts]),
        np.concatenate([part[3] for part in parts]),
        max(part[4] for part in parts),
    )


def project_to_boundary(r: ScalarField, q, tol: Optional[float] = None, max_iter: Optional[int] = None):
    """Projects q (or the rows of q) onto {r = 0} along the normal.

    Raises:
        ProjectionError: If a projection does not converge or does not end with
            q - p parallel to grad r(p).
    """
    pts, single = as_points(q)
    result = project_points(r, pts, tol, max_iter, orthogonal=True)
    failed = ~(result.converged & result.parallel)
    if np.any(failed):
        index = int(np.flatnonzero(failed)[0])
        raise ProjectionError(
            f"Projection of {tuple(pts[index])} failed.",
            {
                "point": pts[index].tolist(),
                "last_iterate": result.points[index].tolist(),
                "residual": float(result.values[index]),
                "converged": bool(result.converged[index]),
                "parallel": bool(result.parallel[index]),
                "failures": int(np.count_nonzero(failed)),
            },
        )
    return result.points[0] if single else result.points


def signed_distance(r: ScalarField, q, tol: Optional[float] = None):
    """+-|q - pi(q)| with the sign of r(q)."""
    pts, single = as_points(q)
    projected = np.atleast_2d(project_to_boundary(r, pts, tol))
    distance = np.linalg.norm(pts - projected, axis=1) * np.sign(np.asarray(evaluate(r, pts)))
    return float(distance[0]) if single else distance


def taylor_normal(f: ScalarField, r: ScalarField, q, tol: Optional[float] = None):
    """Splits f(q) = f(pi(q)) + delta(q) (nu f)(pi(q)) + residual.

    Returns:
        Tuple: (f(pi(q)), delta(q) (nu f)(pi(q)), residual).
    """
    pts, single = as_points(q)
    projected = np.atleast_2d(project_to_boundary(r, pts, tol))
    delta = np.linalg.norm(pts - projected, axis=1) * np.sign(np.asarray(evaluate(r, pts)))
    frame = frame_at(r, projected)
    jet = taylor(f, projected, 1)
    grad = np.stack([jet.partial(e) for e in np.eye(4, dtype=int)], axis=1)
    on_boundary = jet.value
    normal_term = delta * np.einsum("ij,ij->i", np.atleast_2d(frame.nu), grad)
    residual = np.asarray(evaluate(f, pts)) - on_boundary - normal_term
    if single:
        return float(on_boundary[0]), float(normal_term[0]), float(residual[0])
    return on_boundary, normal_term, residual


def project_onto(fields: Sequence[ScalarField], points, tol: float = 1e-12, max_iter: int = 30):
    """Minimum-norm Gauss-Newton projection onto the common zero set of fields.

    Returns:
        Tuple: (projected points, converged mask).
    """
    pts, _ = as_points(points)
    p = pts.copy()
    converged = np.zeros(len(p), dtype=bool)
    ok = np.ones(len(p), dtype=bool)
    for _ in range(max_iter):
        values, jacobian = [], []
        for f in fields:
            value, grad, _, f_ok = _jets(f, p, 1)
            ok &= f_ok
            values.append(value)
            jacobian.append(grad)
        F = np.stack(values, axis=1)
        J = np.stack(jacobian, axis=1)
        F[~ok] = 0
        J[~ok] = 0
        converged = ok & (np.abs(F).max(axis=1) <= tol)
        active = ok & ~converged
        if not np.any(active):
            break
        step = np.einsum("nij,nj->ni", np.linalg.pinv(J[active]), F[active])
        p[active] = p[active] - step
    return p, converged & ok


# endregion

### SAMPLING ###
# region
@dataclass(frozen=True)
class BoundarySample:
    """A boundary point with its frame and Levi value."""

    point: np.ndarray
    frame: FrameAt
    levi: float
    weight: float


@dataclass
class SampleSet:
    """Boundary samples stored column-wise.

    Attributes:
        points: (n, 4) points with |r| <= tol_bdry.
        levi: The Levi values H_r(L, L) (unit normalization).
        norm_dr: |dr| at the points.
        level: Refinement level of each sample.
        weight: Clustering scale of each sample (1 for unclustered samples).
        seed_index: Index of the seed the sample was projected from.
        requested: Number of samples requested.
    """

    points: np.ndarray
    levi: np.ndarray
    norm_dr: np.ndarray
    level: np.ndarray
    weight: np.ndarray
    seed_index: np.ndarray
    requested: int = 0
    notes: Dict[str, int] = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.points)

    @property
    def shortfall(self) -> int:
        return max(0, self.requested - len(self))

    def subset(self, mask) -> "SampleSet":
        mask = np.asarray(mask)
        return SampleSet(
            self.points[mask],
            self.levi[mask],
            self.norm_dr[mask],
            self.level[mask],
            self.weight[mask],
            self.seed_index[mask],
            int(np.count_nonzero(mask)) if mask.dtype == bool else len(mask),
            dict(self.notes),
        )

    @classmethod
    def concat(cls, sets: Sequence["SampleSet"]) -> "SampleSet":
        if not sets:
            raise EmptySampleError("There are no sample sets to concatenate.")
        return cls(
            np.concatenate([s.points for s in sets]),
            np.concatenate([s.levi for s in sets]),
            np.concatenate([s.norm_dr for s in sets]),
            np.concatenate([s.level for s in sets]),
            np.concatenate([s.weight for s in sets]),
            np.concatenate([s.seed_index for s in sets]),
            sum(s.requested for s in sets),
        )

    def samples(self, r: ScalarField) -> Iterator[BoundarySample]:
        frames = frame_at(r, self.points)
        for i, point in enumerate(self.points):
            frame = FrameAt(**{k: np.asarray(v)[i] for k, v in frames.as_dict().items()})
            yield BoundarySample(point, frame, float(self.levi[i]), float(self.weight[i]))

    def rows(self) -> List[list]:
        return [
            [*map(float, p), float(lam), float(norm)]
            for p, lam, norm in zip(self.points, self.levi, self.norm_dr)
        ]

    def to_csv(self, path):
        write_csv(path, ["x", "y", "u", "v", "lambda", "|dr|"], self.rows())


def _seeds(box: BoxSpec, count: int, strategy: str, seed: int, offset: int = 0) -> np.ndarray:
    lower = np.array([lo for lo, _ in box], dtype=float)
    upper = np.array([hi for _, hi in box], dtype=float)
    if strategy == "quasirandom":
        sampler = qmc.Halton(d=4, scramble=True, seed=seed)
        if offset:
            sampler.fast_forward(offset)
        unit = sampler.random(count)
    elif strategy == "grid":
        per_axis = max(2, math.ceil(count ** 0.25))
        axis = (np.arange(per_axis) + 0.5) / per_axis
        mesh = np.stack(np.meshgrid(axis, axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 4)
        unit = mesh[offset : offset + count]
        if len(unit) < count:
            shift = (offset // len(mesh) + 1) * 0.5 / per_axis / 4
            unit = np.concatenate([unit, (mesh[: count - len(unit)] + shift) % 1.0])
    else:
        raise ValueError(f"Unknown sampling strategy '{strategy}', use 'quasirandom' or 'grid'.")
    return lower + unit * (upper - lower)


def _box_center_locus(box: BoxSpec) -> List[ScalarField]:
    return [parse_field(f"{name} - $c", {"c": 0.5 * (lo + hi)}) for name, (lo, hi) in zip("xyuv", box)]


def _as_locus(locus) -> List[ScalarField]:
    if isinstance(locus, (ScalarField, str)):
        locus = [locus]
    return [parse_field(f) if isinstance(f, str) else f for f in locus]


def _cluster(seeds: np.ndarray, loci, level: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
    """Pulls seeds towards the loci, the distance scaled into 10^-level * [0.1, 1]."""
    scale = 10.0 ** (-level) * 10.0 ** rng.uniform(-1.0, 0.0, size=len(seeds))
    choice = rng.integers(0, len(loci), size=len(seeds))
    clustered = seeds.copy()
    failures = 0
    for index, locus in enumerate(loci):
        rows = np.flatnonzero(choice == index)
        if not len(rows):
            continue
        foot, converged = project_onto(locus, seeds[rows])
        moved = foot + scale[rows, None] * (seeds[rows] - foot)
        clustered[rows[converged]] = moved[converged]
        failures += int(np.count_nonzero(~converged))
    if failures:
        logger.info(messages.locus_projection_failures(failures))
    return clustered, scale


def sample_boundary(
    r: ScalarField,
    box: BoxSpec,
    n: int,
    strategy: str = "quasirandom",
    seed: int = 0,
    loci: Optional[Sequence] = None,
    level: Optional[int] = None,
    tol: Optional[float] = None,
    normalization: str = "unit",
) -> SampleSet:
    """Samples n points of {r = 0} inside a box.

    Seeds are drawn from a scrambled Halton sequence (or a grid) in the box and
    projected onto the boundary. With a level, the seeds are first pulled towards
    the given degenerate loci (default: the box center) by a factor in
    10^-level * [0.1, 1]. Seeds whose projection fails or leaves the box are
    replaced by further seeds for up to three rounds; a shortfall is logged and
    the partial set is returned.

    Args:
        r (ScalarField): The defining function.
        box (BoxSpec): Four (lower, upper) intervals.
        n (int): The number of samples.
        strategy (str, optional): "quasirandom" or "grid". Defaults to "quasirandom".
        seed (int, optional): The seed of the sequence. Defaults to 0.
        loci (Sequence, optional): Loci, each a field, a DSL text or a list of them
            (the common zero set). Defaults to None.
        level (int, optional): The clustering level, None for no clustering.
        tol (float, optional): The boundary tolerance. Defaults to tol_bdry.
        normalization (str, optional): Normalization of the stored Levi values.

    Returns:
        SampleSet: The samples in seed order.
    """
    tol = defaults.TOLERANCES.tol_bdry if tol is None else tol
    box = tuple((float(lo), float(hi)) for lo, hi in box)
    lower = np.array([lo for lo, _ in box])
    upper = np.array([hi for _, hi in box])
    rng = np.random.default_rng(seed + 7919 * (0 if level is None else level + 1))
    locus_fields = None
    if level is not None:
        locus_fields = [_as_locus(l) for l in loci] if loci else [_box_center_locus(box)]

    accepted_points, accepted_scale, accepted_index = [], [], []
    offset, found = 0, 0
    with AnnotatedTimer(logger, lambda t: messages.sampling_time(found, level or 0, t)):
        for _ in range(3):
            missing = n - found
            if missing <= 0:
                break
            seeds = _seeds(box, missing, strategy, seed, offset)
            scale = np.ones(len(seeds))
            if locus_fields is not None:
                seeds, scale = _cluster(seeds, locus_fields, level, rng)
            result = project_points(r, seeds, tol, orthogonal=False)
            inside = np.all((result.points >= lower) & (result.points <= upper), axis=1)
            if r.region is not None:
                inside &= r.region.contains(result.points)
            good = result.converged & inside
            if np.any(~result.converged):
                logger.debug(messages.projection_failures(int(np.count_nonzero(~result.converged)), "no convergence"))
            rows = np.flatnonzero(good)[:missing]
            accepted_points.append(result.points[rows])
            accepted_scale.append(scale[rows])
            accepted_index.append(offset + rows)
            found += len(rows)
            offset += len(seeds)
    points = np.concatenate(accepted_points) if accepted_points else np.zeros((0, 4))
    if found < n:
        logger.warning(messages.sampling_shortfall(found, n, level or 0))
    if not len(points):
        return SampleSet(points, np.zeros(0), np.zeros(0), np.zeros(0, int), np.zeros(0), np.zeros(0, int), n, {"shortfall": n})
    frame = frame_at(r, points)
    return SampleSet(
        points,
        levi_values(r, points, normalization),
        np.atleast_1d(frame.norm_dr),
        np.full(len(points), 0 if level is None else level, dtype=int),
        np.concatenate(accepted_scale),
        np.concatenate(accepted_index),
        n,
        {"shortfall": n - found},
    )


def refine_samples(
    r: ScalarField,
    box: BoxSpec,
    n: int,
    levels: int = 2,
    loci: Optional[Sequence] = None,
    seed: int = 0,
    strategy: str = "quasirandom",
    tol: Optional[float] = None,
) -> List[SampleSet]:
    """Sample sets at refinement levels 0 .. levels-1, each clustered a decade closer
    to the degenerate loci than the previous one."""
    if levels < 1:
        raise ValueError("At least one refinement level is needed.")
    return [
        sample_boundary(r, box, n, strategy, seed, loci, level, tol) for level in range(levels)
    ]


def tubular_samples(r: ScalarField, samples: Union[SampleSet, np.ndarray], deltas: Sequence[float]):
    """Points p + delta nu(p) off the boundary.

    Returns:
        Tuple: (points (len(deltas) * n, 4), the delta of each point).
    """
    points = samples.points if isinstance(samples, SampleSet) else as_points(samples)[0]
    nu = np.atleast_2d(frame_at(r, points).nu)
    out, offsets = [], []
    for delta in deltas:
        out.append(points + delta * nu)
        offsets.append(np.full(len(points), float(delta)))
    return np.concatenate(out), np.concatenate(offsets)


# endregion
