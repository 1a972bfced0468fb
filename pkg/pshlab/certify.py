"""Sampled certificates for inequalities and Landau class conditions.

A condition f = O(g) on a compact set cannot be verified from finitely many
samples. The certificates use an empirical convention instead: samples are
drawn at two or more refinement levels, each clustered a decade closer to the
degenerate locus, and the ratio constants

    C_l = max |f| / |g|   over samples of level l with |g| > lambda_min

must not grow by more than growth_cap from one level to the next, while the
residual max |f| over samples with |g| <= lambda_min must not grow by more
than a factor 2. Failing certificates carry witnesses which can be re-evaluated.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.stats import qmc

from . import defaults, messages
from .boundary import SampleSet
from .cframe import (
    LeviJets,
    _frame_from_gradient,
    _hessian_arrays,
    gradient_at,
    hessian_matrix_LN,
    normal_derivative_levi,
    normal_levi_field,
    real_hessian_matrix,
)
from .classify import Verdict, local_samples, type_words
from .construct import MultiplierRecipe, df_bump, df_bump_ext
from .errors import DegenerateInputError, EmptySampleError, PreconditionError
from .expr import ScalarField, as_points, evaluate
from .taylor import taylor
from .utils import AnnotatedTimer, map_points

logger = logging.getLogger(__name__)

DEFAULT_C_GRID = (0.0,) + tuple(float(c) for c in np.logspace(-3, 6, 91))
DEFAULT_K_GRID = (0.0, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0)
MAX_WITNESSES = 5


class Condition(str, Enum):
    PSH_BOUNDARY = "PSH_BOUNDARY"
    PSH_OPEN = "PSH_OPEN"
    COND_LN = "COND_LN"
    COND_NORMAL = "COND_NORMAL"
    COND_NORMAL_ONESIDED = "COND_NORMAL_ONESIDED"
    BASIC_EST = "BASIC_EST"
    SESQUI = "SESQUI"
    REAL_COORDS = "REAL_COORDS"
    HX_HY = "HX_HY"
    TYPE6_NORMAL = "TYPE6_NORMAL"
    DF_BUMP = "DF_BUMP"
    RATIO_O = "RATIO_O"
    LEVI_BOUND = "LEVI_BOUND"
    GLOBAL_BOUNDS = "GLOBAL_BOUNDS"
    GLOBAL_PSC = "GLOBAL_PSC"


@dataclass
class LevelStats:
    """Statistics of one refinement level.

    Attributes:
        level: The level index.
        samples: Number of samples.
        usable: Samples with |g| > lambda_min (all samples for pointwise checks).
        max_ratio: The ratio constant (or the largest violation of pointwise checks).
        argmax: The sample attaining max_ratio.
        below_lambda_min: Samples with |g| <= lambda_min.
        residual: max |f| over samples with |g| <= lambda_min.
    """

    level: int
    samples: int
    usable: int
    max_ratio: float
    argmax: Optional[Tuple[float, ...]] = None
    below_lambda_min: int = 0
    residual: float = 0.0

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "samples": self.samples,
            "usable": self.usable,
            "max_ratio": self.max_ratio,
            "argmax": None if self.argmax is None else list(self.argmax),
            "below_lambda_min": self.below_lambda_min,
            "residual": self.residual,
        }


@dataclass
class Witness:
    point: Tuple[float, ...]
    value: float
    note: str = ""

    def to_dict(self) -> dict:
        return {"point": list(self.point), "value": self.value, "note": self.note}


@dataclass
class Certificate:
    """Outcome of a sampled check.

    Attributes:
        condition: The checked condition.
        verdict: pass, fail or inconclusive.
        levels: Statistics per refinement level.
        witnesses: Violating samples (always present for fail).
        tolerances: The tolerances used.
        details: Condition specific values, e.g. empirical constants.
    """

    condition: Condition
    verdict: Verdict
    levels: List[LevelStats] = field(default_factory=list)
    witnesses: List[Witness] = field(default_factory=list)
    tolerances: Dict[str, float] = field(default_factory=dict)
    details: Dict[str, object] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == Verdict.PASS

    def to_dict(self) -> dict:
        return {
            "condition": self.condition.value,
            "verdict": self.verdict.value,
            "levels": [level.to_dict() for level in self.levels],
            "witnesses": [w.to_dict() for w in self.witnesses],
            "tolerances": self.tolerances,
            "details": self.details,
        }

    def witness_rows(self) -> List[list]:
        return [[*w.point, w.value, w.note] for w in self.witnesses]


def _tol(tolerances: Optional[defaults.Tolerances]) -> defaults.Tolerances:
    return tolerances or defaults.TOLERANCES


def _level_points(levels) -> List[np.ndarray]:
    if isinstance(levels, (SampleSet, np.ndarray)):
        levels = [levels]
    out = []
    for level in levels:
        points = level.points if isinstance(level, SampleSet) else as_points(level)[0]
        out.append(points)
    if not out or not any(len(p) for p in out):
        raise EmptySampleError("The certificate needs at least one sample.")
    return out


def _point(p) -> Tuple[float, ...]:
    return tuple(float(c) for c in p)


### RATIO CERTIFICATES ###
# region
def ratio_O(
    numerator: Union[ScalarField, Sequence[np.ndarray]],
    denominator: Optional[Sequence[np.ndarray]],
    levels,
    lambda_min: Optional[float] = None,
    tolerances: Optional[defaults.Tolerances] = None,
    condition: Condition = Condition.RATIO_O,
) -> Certificate:
    """Empirical check of f = O(g) across refinement levels.

    Args:
        numerator: The field f or its values per level.
        denominator: The values of g per level, None for the Levi values of
            the sample sets.
        levels: The sample sets (or point arrays) of at least two levels.
        lambda_min (float, optional): Denominators at most this value are excluded
            from the ratios. Defaults to the configured value.
        tolerances (Tolerances, optional): Growth cap, ratio floor and minimal
            sample counts.
        condition (Condition, optional): The condition reported.

    Raises:
        PreconditionError: For less than two levels.
        DegenerateInputError: If every denominator is at most lambda_min.

    Returns:
        Certificate: pass if the constants are stable, fail with the argmax of the
        offending level as witness, inconclusive if a level has too few usable samples.
    """
    tol = _tol(tolerances)
    lambda_min = tol.lambda_min if lambda_min is None else lambda_min
    if isinstance(levels, (SampleSet, np.ndarray)) or len(levels) < 2:
        raise PreconditionError("Ratio certificates need at least two refinement levels.")
    points = _level_points(levels)
    if isinstance(numerator, ScalarField):
        f_values = [np.asarray(evaluate(numerator, p)) if len(p) else np.zeros(0) for p in points]
    else:
        f_values = [np.asarray(v, dtype=float) for v in numerator]
    if denominator is None:
        if not all(isinstance(level, SampleSet) for level in levels):
            raise PreconditionError("Without denominators the levels must be sample sets.")
        g_values = [level.levi for level in levels]
    else:
        g_values = [np.asarray(v, dtype=float) for v in denominator]

    if all(np.all(np.abs(g) <= lambda_min) for g in g_values):
        raise DegenerateInputError("All denominators are below lambda_min, no ratio can be formed.")

    stats, witnesses = [], []
    for index, (pts, f, g) in enumerate(zip(points, f_values, g_values)):
        f, g = np.abs(f), np.abs(g)
        usable = g > lambda_min
        ratios = np.where(usable, f / np.where(usable, g, 1.0), -np.inf)
        argmax = int(np.argmax(ratios)) if np.any(usable) else None
        stats.append(
            LevelStats(
                index,
                len(pts),
                int(np.count_nonzero(usable)),
                float(ratios[argmax]) if argmax is not None else 0.0,
                _point(pts[argmax]) if argmax is not None else None,
                int(np.count_nonzero(~usable)),
                float(f[~usable].max()) if np.any(~usable) else 0.0,
            )
        )
        logger.debug(messages.level_statistics(index, stats[-1].usable, stats[-1].max_ratio, stats[-1].residual))

    verdict = Verdict.PASS
    for previous, current in zip(stats, stats[1:]):
        bound = tol.growth_cap * max(previous.max_ratio, tol.ratio_floor)
        if current.max_ratio > bound:
            verdict = Verdict.FAIL
            witnesses.append(
                Witness(
                    current.argmax,
                    current.max_ratio,
                    f"ratio grows from {previous.max_ratio:.6e} (level {previous.level}) "
                    f"to {current.max_ratio:.6e} (level {current.level})",
                )
            )
        if current.residual > 2 * previous.residual and current.residual > tol.ratio_floor:
            verdict = Verdict.FAIL
            index = current.level
            f, g = np.abs(f_values[index]), np.abs(g_values[index])
            small = np.flatnonzero(g <= lambda_min)
            worst = small[int(np.argmax(f[small]))]
            witnesses.append(
                Witness(
                    _point(points[index][worst]),
                    float(f[worst]),
                    f"numerator {f[worst]:.6e} where the denominator is below lambda_min",
                )
            )
    if verdict == Verdict.PASS and any(s.usable < tol.min_level_samples for s in stats):
        verdict = Verdict.INCONCLUSIVE
    return Certificate(
        condition,
        verdict,
        stats,
        witnesses[:MAX_WITNESSES],
        {**tol.as_dict(), "lambda_min": lambda_min},
        {"ratio_constants": [s.max_ratio for s in stats]},
    )


def _per_level(levels, function: Callable[[np.ndarray], np.ndarray]) -> List[np.ndarray]:
    return [map_points(function, pts) if len(pts) else np.zeros(0) for pts in _level_points(levels)]


def _levi_of(rho: ScalarField) -> Callable[[np.ndarray], np.ndarray]:
    def levi(points):
        return np.atleast_1d(hessian_matrix_LN(rho, points).h11)

    return levi


def _ratio(condition, rho, levels, f, tolerances, lambda_min=None) -> Certificate:
    outcome = {}
    with AnnotatedTimer(logger, lambda t: messages.certificate_result(condition.value, outcome.get("verdict", "error"), t)):
        certificate = ratio_O(
            _per_level(levels, f),
            _per_level(levels, _levi_of(rho)),
            levels,
            lambda_min,
            tolerances,
            condition,
        )
        outcome["verdict"] = certificate.verdict.value
    return certificate


def cond_psh_boundary(rho: ScalarField, levels, lambda_min=None, tolerances=None) -> Certificate:
    """|H_rho(L, N)|^2 = O(H_rho(L, L)) on the boundary."""

    def f(points):
        return np.abs(np.atleast_1d(hessian_matrix_LN(rho, points).h12)) ** 2

    return _ratio(Condition.COND_LN, rho, levels, f, tolerances, lambda_min)


def _normal_levi(rho: ScalarField) -> Callable[[np.ndarray], np.ndarray]:
    nu_field = normal_levi_field(rho)

    def values(points):
        return np.atleast_1d(evaluate(nu_field, points)).real

    return values


def cond_normal(rho: ScalarField, levels, lambda_min=None, tolerances=None) -> Certificate:
    """|nu H_rho(L, L)|^2 = O(H_rho(L, L)) on the boundary."""
    nu_levi = _normal_levi(rho)
    return _ratio(Condition.COND_NORMAL, rho, levels, lambda p: nu_levi(p) ** 2, tolerances, lambda_min)


def cond_normal_onesided(rho: ScalarField, levels, lambda_min=None, tolerances=None) -> Certificate:
    """max(nu H_rho(L, L), 0)^2 = O(H_rho(L, L)) on the boundary."""
    nu_levi = _normal_levi(rho)
    return _ratio(
        Condition.COND_NORMAL_ONESIDED,
        rho,
        levels,
        lambda p: np.maximum(nu_levi(p), 0.0) ** 2,
        tolerances,
        lambda_min,
    )


def cond_sesqui(rho: ScalarField, levels, lambda_min=None, tolerances=None) -> Certificate:
    """H^R(Y, T)^2 + H^R(X, T)^2 = O(H_rho(L, L)) on the boundary."""

    def f(points):
        q = real_hessian_matrix(rho, points)
        return np.atleast_1d(q.entry("Y", "T") ** 2 + q.entry("X", "T") ** 2)

    return _ratio(Condition.SESQUI, rho, levels, f, tolerances, lambda_min)


def cond_real_coords(rho: ScalarField, levels, lambda_min=None, tolerances=None) -> Certificate:
    """(H^R(X, nu) + H^R(Y, T))^2 + (H^R(Y, nu) - H^R(X, T))^2 = O(H_rho(L, L))."""

    def f(points):
        q = real_hessian_matrix(rho, points)
        p = q.entry("X", "nu") + q.entry("Y", "T")
        s = q.entry("Y", "nu") - q.entry("X", "T")
        return np.atleast_1d(p**2 + s**2)

    return _ratio(Condition.REAL_COORDS, rho, levels, f, tolerances, lambda_min)


def _hx_hy_residuals(r: ScalarField, h: ScalarField, points: np.ndarray) -> np.ndarray:
    q = real_hessian_matrix(r, points).matrix
    q = q if q.ndim == 3 else q[None]
    parts = _frame_from_gradient(gradient_at(r, points))
    jet = taylor(h, points, 1)
    grad = np.stack([jet.partial(e) for e in np.eye(4, dtype=int)], axis=1)
    xh = np.einsum("ij,ij->i", parts["X"], grad)
    yh = np.einsum("ij,ij->i", parts["Y"], grad)
    p = q[:, 0, 3] + q[:, 1, 2]
    s = q[:, 1, 3] - q[:, 0, 2]
    norm = parts["norm_dr"]
    return np.stack([xh + p / norm, yh + s / norm], axis=1)


def check_hx_hy(r: ScalarField, h, levels, lambda_min=None, tolerances=None) -> Certificate:
    """Xh = -(H^R(X, nu) + H^R(Y, T)) / |dr| and Yh = -(H^R(Y, nu) - H^R(X, T)) / |dr|
    up to O(sqrt(lambda)): the squared residuals are certified against lambda."""
    h = h.h if isinstance(h, MultiplierRecipe) else h

    def f(points):
        residuals = _hx_hy_residuals(r, h, points)
        return (residuals**2).sum(axis=1)

    certificate = _ratio(Condition.HX_HY, r, levels, f, tolerances, lambda_min)
    residuals = [_hx_hy_residuals(r, h, pts) for pts in _level_points(levels) if len(pts)]
    certificate.details["max_abs_residual_Xh"] = max(float(np.abs(res[:, 0]).max()) for res in residuals)
    certificate.details["max_abs_residual_Yh"] = max(float(np.abs(res[:, 1]).max()) for res in residuals)
    return certificate


def strict4_residual(r: ScalarField, h, levels, lambda_min=None, tolerances=None) -> Certificate:
    """|L h - F|^2 = O(lambda) with F = -(2/|dr|) H_r(L, N)."""
    h = h.h if isinstance(h, MultiplierRecipe) else h

    def f(points):
        jets = LeviJets(r, points, 0)
        lh = jets.apply_L(taylor(h, points, 1)).value
        hm = hessian_matrix_LN(r, points)
        forced = -2 * np.atleast_1d(hm.h12) / jets.norm_dr.value
        return np.abs(lh - forced) ** 2

    certificate = _ratio(Condition.RATIO_O, r, levels, f, tolerances, lambda_min)
    certificate.details["check"] = "strict4_residual"
    return certificate


def normal_residuals(r: ScalarField, h, levels, lambda_min=None, tolerances=None) -> Tuple[Certificate, Certificate]:
    """|L h|^2 = O(lambda) and |Lbar L h - F|^2 = O(lambda) with F = -(1/|dr|) nu lambda."""
    h = h.h if isinstance(h, MultiplierRecipe) else h

    def first(points):
        jets = LeviJets(r, points, 0)
        return np.abs(jets.apply_L(taylor(h, points, 1)).value) ** 2

    def second(points):
        jets = LeviJets(r, points, 1)
        lbar_l = jets.apply_Lbar(jets.apply_L(taylor(h, points, 2))).value
        forced = -jets.apply_nu(jets.levi).value.real / jets.norm_dr.value
        return np.abs(lbar_l - forced) ** 2

    a = _ratio(Condition.RATIO_O, r, levels, first, tolerances, lambda_min)
    a.details["check"] = "normal_residual_Lh"
    b = _ratio(Condition.RATIO_O, r, levels, second, tolerances, lambda_min)
    b.details["check"] = "normal_residual_LbarLh"
    return a, b


# endregion

### POSITIVITY CERTIFICATES ###
# region
def _psd_violation(matrices: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Relative violation -lambda_min / (1 + |M|) and lambda_min of Hermitian matrices."""
    eigenvalues = np.linalg.eigvalsh(matrices)
    norm = np.abs(eigenvalues).max(axis=-1)
    smallest = eigenvalues[..., 0]
    return -smallest / (1 + norm), smallest


def _pointwise_certificate(condition, points_per_level, violations, values, tol, note) -> Certificate:
    stats, witnesses = [], []
    for index, (pts, violation, value) in enumerate(zip(points_per_level, violations, values)):
        if not len(pts):
            stats.append(LevelStats(index, 0, 0, 0.0))
            continue
        worst = int(np.argmax(violation))
        stats.append(LevelStats(index, len(pts), len(pts), float(violation[worst]), _point(pts[worst])))
        for i in np.argsort(-violation, kind="stable")[:MAX_WITNESSES]:
            if violation[i] > tol:
                witnesses.append(Witness(_point(pts[i]), float(value[i]), note))
    verdict = Verdict.FAIL if witnesses else Verdict.PASS
    return Certificate(condition, verdict, stats, witnesses[:MAX_WITNESSES])


def psd_on_samples(rho: ScalarField, samples, tol: Optional[float] = None, tolerances=None) -> Certificate:
    """H_rho in the frame (L, N) is positive semi-definite at every boundary sample.

    Eigenvalues >= -tol (1 + |H|) pass. Witness values are the smallest eigenvalues.
    """
    tolerances = _tol(tolerances)
    tol = tolerances.psd_tol if tol is None else tol
    points = _level_points(samples)
    matrices = [hessian_matrix_LN(rho, pts).matrix() if len(pts) else np.zeros((0, 2, 2)) for pts in points]
    pairs = [_psd_violation(m) for m in matrices]
    certificate = _pointwise_certificate(
        Condition.PSH_BOUNDARY,
        points,
        [p[0] for p in pairs],
        [p[1] for p in pairs],
        tol,
        "smallest eigenvalue of H_rho in the frame (L, N)",
    )
    certificate.tolerances = {**tolerances.as_dict(), "psd_tol": tol}
    return certificate


def _coordinate_hessians(rho: ScalarField, points: np.ndarray):
    _, hc, _ = _hessian_arrays(rho, points)
    jet = taylor(rho, points, 1)
    grad = np.stack([jet.partial(e) for e in np.eye(4, dtype=int)], axis=1)
    del_rho = np.stack([0.5 * (grad[:, 0] - 1j * grad[:, 1]), 0.5 * (grad[:, 2] - 1j * grad[:, 3])], axis=1)
    return hc, jet.value, del_rho


def psh_open_scan(rho: ScalarField, points, tol: Optional[float] = None, coercivity: bool = True, tolerances=None) -> Certificate:
    """The complex Hessian of rho in coordinates is positive semi-definite at the points.

    With coercivity, the best empirical c with H_rho(xi, xi) >= c (rho^2 |xi|^2 +
    |<del rho, xi>|^2) is reported, bounded below by lambda_min(H) / lambda_max(M)
    with M = rho^2 I + conj(del rho) del rho^T.
    """
    tolerances = _tol(tolerances)
    tol = tolerances.psd_tol if tol is None else tol
    levels = _level_points(points)
    violations, values, coercive = [], [], []
    for pts in levels:
        if not len(pts):
            violations.append(np.zeros(0))
            values.append(np.zeros(0))
            continue
        hc, value, del_rho = _coordinate_hessians(rho, pts)
        violation, smallest = _psd_violation(hc)
        violations.append(violation)
        values.append(smallest)
        if coercivity:
            m = value[:, None, None] ** 2 * np.eye(2) + np.conj(del_rho)[:, :, None] * del_rho[:, None, :]
            largest = np.linalg.eigvalsh(m)[:, -1]
            coercive.append(smallest / largest)
    certificate = _pointwise_certificate(
        Condition.PSH_OPEN, levels, violations, values, tol, "smallest eigenvalue of the complex Hessian"
    )
    certificate.tolerances = {**tolerances.as_dict(), "psd_tol": tol}
    if coercivity and coercive:
        certificate.details["coercivity_c"] = float(np.concatenate(coercive).min())
    return certificate


@dataclass
class EmpiricalConstant:
    """An empirical constant with its provenance.

    Attributes:
        value: The constant, None if none was found.
        verdict: pass if the constant is finite and well sampled.
        skipped: Pairs skipped for tiny denominators.
        evaluated: Pairs evaluated.
        witness: The sample (and direction) attaining the constant.
        per_level: The constant per refinement level.
    """

    value: Optional[float]
    verdict: Verdict
    skipped: int = 0
    evaluated: int = 0
    witness: Optional[Witness] = None
    per_level: List[float] = field(default_factory=list)
    condition: Condition = Condition.BASIC_EST

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "verdict": self.verdict.value,
            "skipped": self.skipped,
            "evaluated": self.evaluated,
            "witness": None if self.witness is None else self.witness.to_dict(),
            "per_level": self.per_level,
        }

    def as_certificate(self) -> Certificate:
        return Certificate(
            self.condition,
            self.verdict,
            witnesses=[self.witness] if self.witness is not None and self.verdict == Verdict.FAIL else [],
            details=self.to_dict(),
        )


def required_C(rho: ScalarField, samples, grid: Sequence[float] = DEFAULT_C_GRID, tol: Optional[float] = None) -> EmpiricalConstant:
    """The smallest C of the grid for which H_rho + diag(0, C |N rho|^2) is positive
    semi-definite with positive trace at all boundary samples (the correction of
    bend(rho, C))."""
    tol = defaults.TOLERANCES.psd_tol if tol is None else tol
    points = np.concatenate(_level_points(samples))
    hm = hessian_matrix_LN(rho, points)
    matrices = hm.matrix()
    n_rho2 = (np.atleast_1d(gradient_at(rho, points)) ** 2).sum(axis=1) / 4
    worst = None
    for C in sorted(grid):
        modified = matrices.copy()
        modified[:, 1, 1] += C * n_rho2
        violation, smallest = _psd_violation(modified)
        trace = np.trace(modified, axis1=1, axis2=2).real
        bad = (violation > tol) | (trace <= 0)
        if not np.any(bad):
            return EmpiricalConstant(float(C), Verdict.PASS, evaluated=len(points), condition=Condition.PSH_BOUNDARY)
        index = int(np.argmax(violation))
        worst = Witness(_point(points[index]), float(smallest[index]), f"smallest eigenvalue with C = {C:.6g}")
    return EmpiricalConstant(None, Verdict.FAIL, evaluated=len(points), witness=worst, condition=Condition.PSH_BOUNDARY)


def direction_grid(size: int = defaults.direction_grid_size) -> np.ndarray:
    """The fixed grid of unit directions in C^2 (version defaults.direction_grid_version)."""
    unit = qmc.Halton(d=3, scramble=False).random(size + 1)[1:]
    t, s1, s2 = unit[:, 0], unit[:, 1], unit[:, 2]
    return np.stack(
        [np.sqrt(t) * np.exp(2j * np.pi * s1), np.sqrt(1 - t) * np.exp(2j * np.pi * s2)], axis=1
    )


def basic_estimate_C(r: ScalarField, points, tolerances=None) -> EmpiricalConstant:
    """The empirical smallest C with H_r(xi, xi) >= -C (r^2 |xi|^2 + |<del r, xi>|^2).

    Directions are the frame directions L, N, (L +- N)/sqrt(2), (L +- iN)/sqrt(2)
    at each sample and the fixed direction grid. Pairs whose denominator is at
    most lambda_min are skipped; if more than half are skipped the result is
    inconclusive. With several levels of points, a constant growing by more
    than growth_cap between levels is reported as inconclusive (diverging).
    """
    tol = _tol(tolerances)
    grid = direction_grid()
    per_level, skipped, evaluated = [], 0, 0
    best, witness = 0.0, None
    for pts in _level_points(points):
        if not len(pts):
            continue
        hc, value, del_r = _coordinate_hessians(r, pts)
        frame = _frame_from_gradient(gradient_at(r, pts))
        L, N = frame["L"], frame["N"]
        s = 1 / np.sqrt(2)
        local = np.stack([L, N, s * (L + N), s * (L - N), s * (L + 1j * N), s * (L - 1j * N)], axis=1)
        directions = np.concatenate([local, np.broadcast_to(grid, (len(pts),) + grid.shape)], axis=1)
        quadratic = np.einsum("ndj,njk,ndk->nd", directions, hc, np.conj(directions)).real
        pairing = np.abs(np.einsum("nj,ndj->nd", del_r, directions)) ** 2
        denominator = value[:, None] ** 2 * (np.abs(directions) ** 2).sum(axis=2) + pairing
        usable = denominator > tol.lambda_min
        skipped += int(np.count_nonzero(~usable))
        evaluated += int(np.count_nonzero(usable))
        ratio = np.where(usable, -quadratic / np.where(usable, denominator, 1.0), -np.inf)
        level_best = float(max(0.0, ratio.max()))
        per_level.append(level_best)
        if witness is None or level_best > best:
            n, d = np.unravel_index(int(np.argmax(ratio)), ratio.shape)
            best = level_best
            witness = Witness(_point(pts[n]), level_best, f"direction {directions[n, d].tolist()}")
    if skipped:
        logger.info(messages.skipped_directions(skipped, evaluated))
    verdict = Verdict.PASS
    if skipped > evaluated:
        verdict = Verdict.INCONCLUSIVE
    for previous, current in zip(per_level, per_level[1:]):
        if current > tol.growth_cap * max(previous, tol.ratio_floor):
            verdict = Verdict.INCONCLUSIVE
    return EmpiricalConstant(best, verdict, skipped, evaluated, witness, per_level)


# endregion

### POINTWISE CONDITIONS ###
# region
NOT_APPLICABLE = "NotApplicable"


def type6_normal_vanish(
    r: ScalarField, p0, tol: float = 1e-10, tolerances=None, seed: int = 0
) -> Union[bool, str]:
    """|nu H_r(L, L)(p0)| <= tol * scale at a point of type >= 6.

    scale is the largest modulus, at least 1, of the words over {L, Lbar} applied to
    Lambda that were computed while finding the type. r has to be plurisubharmonic on
    the boundary near p0, which is certified by psd_on_samples on boundary samples
    around p0.

    Returns:
        Union[bool, str]: Whether the normal derivative vanishes, or "NotApplicable"
        at points of type < 6 and where the boundary certificate does not pass.
    """
    tolerances = _tol(tolerances)
    c_p, table, _ = type_words(r, p0, tolerances.max_order, tolerances.tol_zero)
    if isinstance(c_p, int) and c_p < 6:
        logger.info(messages.not_applicable("type6_normal_vanish", f"type {c_p} < 6"))
        return NOT_APPLICABLE
    boundary = psd_on_samples(r, local_samples(r, p0, seed=seed), tolerances=tolerances)
    if not boundary.passed:
        logger.info(messages.not_applicable("type6_normal_vanish", f"psd_on_samples {boundary.verdict.value}"))
        return NOT_APPLICABLE
    scale = max([1.0] + [abs(value) for value in table.values()])
    return bool(abs(normal_derivative_levi(r, p0)) <= tol * scale)



def df_check(
    r: ScalarField,
    K: float,
    eta: float,
    points,
    exterior: bool = False,
    mu: Optional[float] = None,
    tolerances=None,
) -> Certificate:
    """psh_open_scan of -(-r - K r^2)^eta on interior points, or of (r + K r^2)^mu
    on exterior points."""
    bump = df_bump_ext(r, K, mu) if exterior else df_bump(r, K, eta)
    certificate = psh_open_scan(bump, points, coercivity=False, tolerances=tolerances)
    certificate.condition = Condition.DF_BUMP
    certificate.details.update({"K": K, "eta": eta, "mu": mu, "exterior": exterior})
    return certificate


def select_df_constant(r: ScalarField, eta: float, points, grid: Sequence[float] = DEFAULT_K_GRID, tolerances=None):
    """The smallest K of the grid passing df_check.

    Returns:
        Tuple: (K or None, the certificate of K or of the largest K tried).
    """
    certificate = None
    for K in sorted(grid):
        certificate = df_check(r, K, eta, points, tolerances=tolerances)
        if certificate.passed:
            return K, certificate
    return None, certificate


# endregion
