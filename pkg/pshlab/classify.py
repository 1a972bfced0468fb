"""Classification of boundary points: pseudoconvexity, finite type and type 4 data.

The type is found with :class:`pshlab.cframe.LeviJets`, the type 4 values
L Lbar lambda and L L lambda by applying the symbolic frame fields to the Levi
field. Words over {L, Lbar} are written outermost letter first, so "L,Lb" is
L(Lbar(lambda)).
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, List, Optional, Tuple, Union

import numpy as np

from . import defaults, messages
from .boundary import SampleSet, sample_boundary
from .cframe import LeviJets, check_on_boundary, levi_values, levi_words_at
from .errors import EmptySampleError, PreconditionError
from .expr import ScalarField, as_points
from .taylor import taylor

logger = logging.getLogger(__name__)

EXCEEDS = "exceeds max_order"
KOHN_FACTOR = 4.0 / 3.0
TYPE4_WORDS = ("L,Lb", "L,L")
LOCAL_SCAN_HALF_WIDTH = 0.05
LOCAL_SCAN_SAMPLES = 64


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    INCONCLUSIVE = "inconclusive"


class Strict4(str, Enum):
    STRICT = "Strict"
    WEAK = "Weak"
    NOT_APPLICABLE = "NotApplicable"


def _tolerances(tolerances: Optional[defaults.Tolerances], **overrides) -> defaults.Tolerances:
    return (tolerances or defaults.TOLERANCES).updated(**overrides)


def _single_point(p) -> np.ndarray:
    pts, single = as_points(p)
    if not single and len(pts) != 1:
        raise ValueError("Classification works on a single point.")
    return pts


### TYPE ###
# region
def type_words(
    r: ScalarField, p, max_order: Optional[int] = None, tol_zero: Optional[float] = None
) -> Tuple[Union[int, str], Dict[str, complex], LeviJets]:
    """Finds the type at p and the word values computed on the way.

    Returns:
        Tuple: (c_p or "exceeds max_order", {word: value}, the jets).
    """
    tol = _tolerances(None, max_order=max_order, tol_zero=tol_zero)
    pts = _single_point(p)
    jets = LeviJets(r, pts, tol.max_order - 2)
    table: Dict[str, complex] = {}
    scale = 1.0
    for length, words in jets.levels(tol.max_order - 2):
        values = {w: complex(v[0]) for w, v in words.items()}
        table.update({(w or "lambda"): v for w, v in values.items()})
        magnitude = max(abs(v) for v in values.values())
        threshold = tol.tol_zero * scale
        logger.debug(messages.type_level(length, magnitude, threshold))
        if magnitude > threshold:
            c_p = length + 2
            logger.info(messages.type_detected(pts[0], c_p))
            return c_p, table, jets
        scale = max(scale, magnitude)
    logger.info(messages.type_detected(pts[0], EXCEEDS))
    return EXCEEDS, table, jets


def point_type(
    r: ScalarField,
    p,
    max_order: Optional[int] = None,
    tol_zero: Optional[float] = None,
    tol_bdry: Optional[float] = None,
) -> Union[int, str]:
    """The type c_p of the boundary point p.

    c_p is the smallest k such that a word of length k - 2 over {L, Lbar} applied
    to lambda does not vanish at p, a value counting as zero if its modulus is at
    most tol_zero times the largest modulus of the shorter words (and at least
    tol_zero). Strictly pseudoconvex points have type 2.

    Raises:
        OffBoundaryError: If p is not on the boundary.
        DegenerateGradientError: If dr(p) = 0.

    Returns:
        Union[int, str]: The type or "exceeds max_order".
    """
    pts = _single_point(p)
    check_on_boundary(r, pts, _tolerances(None, tol_bdry=tol_bdry).tol_bdry)
    c_p, _, _ = type_words(r, pts, max_order, tol_zero)
    return c_p


# endregion

### TYPE 4 ###
# region
def _type4_values(r: ScalarField, pts: np.ndarray) -> Tuple[complex, complex]:
    values = levi_words_at(r, pts, TYPE4_WORDS)
    return tuple(complex(values[w][0]) for w in TYPE4_WORDS)


def type4_inequality(r: ScalarField, p, tol_zero: Optional[float] = None) -> Tuple[complex, complex]:
    """The values (L Lbar lambda)(p) and (L L lambda)(p) at a weakly pseudoconvex point.

    Raises:
        PreconditionError: If lambda(p) > tol_zero.
    """
    tol = _tolerances(None, tol_zero=tol_zero)
    pts = _single_point(p)
    lam = float(levi_values(r, pts)[0])
    if lam > tol.tol_zero:
        raise PreconditionError(
            f"The point is strictly pseudoconvex (lambda = {lam:.3e}), type 4 data do not apply."
        )
    return _type4_values(r, pts)


def _scale(*values) -> float:
    return max([1.0] + [abs(v) for v in values])


def _strict4_from(c_p, llbar: complex, ll: complex, tol: float) -> Strict4:
    if c_p != 4:
        return Strict4.NOT_APPLICABLE
    if llbar.real - abs(ll) > tol * _scale(llbar, ll):
        return Strict4.STRICT
    return Strict4.WEAK


def _kohn_from(c_p, llbar: complex, ll: complex, tol: float) -> Optional[bool]:
    if c_p != 4:
        return None
    return bool(llbar.real - KOHN_FACTOR * abs(ll) > tol * _scale(llbar, ll))


def strict_type4(r: ScalarField, p, tol: Optional[float] = None) -> Strict4:
    """Strict if L Lbar lambda - |L L lambda| > tol * scale at a type 4 point, Weak at
    other type 4 points and NotApplicable at points of other types."""
    tol_zero = _tolerances(None, tol_zero=tol).tol_zero
    pts = _single_point(p)
    c_p, _, _ = type_words(r, pts, tol_zero=tol_zero)
    if c_p != 4:
        return Strict4.NOT_APPLICABLE
    return _strict4_from(c_p, *_type4_values(r, pts), tol_zero)


def kohn_strict_type4(r: ScalarField, p, tol: Optional[float] = None) -> Optional[bool]:
    """Strict type 4 in the sense of Kohn, L Lbar lambda > 4/3 |L L lambda|.

    Returns None at points which are not of type 4.
    """
    tol_zero = _tolerances(None, tol_zero=tol).tol_zero
    pts = _single_point(p)
    c_p, _, _ = type_words(r, pts, tol_zero=tol_zero)
    if c_p != 4:
        return None
    return _kohn_from(c_p, *_type4_values(r, pts), tol_zero)


def strict4_coordinate_test(r: ScalarField, p0=(0.0, 0.0, 0.0, 0.0), tol: float = 1e-10) -> bool:
    """Tests H_r(L, L)(z, 0) >= eps |z|^2 for a normalized r.

    r must satisfy r(0) = 0, r_z(0) = 0, r_w(0) = 1/2 and r_zz(0) = 0 (see
    :func:`pshlab.cframe.normalize_at`). The test is positive iff the real Hessian
    of lambda(., 0) in (x, y) at 0 is positive definite.

    Raises:
        PreconditionError: If r is not normalized at p0.
    """
    pts = _single_point(p0)
    jet = taylor(r, pts, 2)
    grad = np.array([jet.partial(e)[0] for e in np.eye(4, dtype=int)])
    r_zz = 0.25 * (jet.partial((2, 0, 0, 0))[0] - jet.partial((0, 2, 0, 0))[0]) - 0.5j * jet.partial(
        (1, 1, 0, 0)
    )[0]
    conditions = [
        abs(jet.value[0]),
        abs(0.5 * (grad[0] - 1j * grad[1])),
        abs(0.5 * (grad[2] - 1j * grad[3]) - 0.5),
        abs(r_zz),
    ]
    if max(conditions) > tol:
        raise PreconditionError("The defining function is not normalized, use normalize_at first.")
    levi = LeviJets(r, pts, 2).levi
    hessian = np.array(
        [
            [levi.partial((2, 0, 0, 0))[0], levi.partial((1, 1, 0, 0))[0]],
            [levi.partial((1, 1, 0, 0))[0], levi.partial((0, 2, 0, 0))[0]],
        ]
    ).real
    eigenvalues = np.linalg.eigvalsh(hessian)
    return bool(eigenvalues.min() > defaults.TOLERANCES.tol_zero * max(1.0, np.abs(eigenvalues).max()))


# endregion

### PSEUDOCONVEXITY ###
# region
@dataclass
class ScanResult:
    """Outcome of a pseudoconvexity scan.

    Attributes:
        verdict: pass iff lambda >= -tol at every sample.
        min_levi: The smallest Levi value.
        witnesses: The most negative samples as (point, lambda).
        count: Number of samples.
    """

    verdict: Verdict
    min_levi: float
    witnesses: List[Tuple[Tuple[float, ...], float]] = field(default_factory=list)
    count: int = 0

    def to_dict(self) -> dict:
        return {
            "verdict": self.verdict.value,
            "min_lambda": self.min_levi,
            "samples": self.count,
            "witnesses": [{"point": list(p), "lambda": v} for p, v in self.witnesses],
        }


def pseudoconvex_scan(r: ScalarField, samples, tol: Optional[float] = None, witnesses: int = 5) -> ScanResult:
    """Checks lambda >= -tol on boundary samples (a SampleSet or an (n, 4) array).

    Raises:
        EmptySampleError: If there are no samples.
    """
    tol = defaults.TOLERANCES.psd_tol if tol is None else tol
    if isinstance(samples, SampleSet):
        points, values = samples.points, samples.levi
    else:
        points, _ = as_points(samples)
        values = levi_values(r, points) if len(points) else np.zeros(0)
    if not len(points):
        raise EmptySampleError("The pseudoconvexity scan needs at least one sample.")
    order = np.argsort(values, kind="stable")
    failing = [i for i in order[:witnesses] if values[i] < -tol]
    verdict = Verdict.FAIL if failing else Verdict.PASS
    return ScanResult(
        verdict,
        float(values[order[0]]),
        [(tuple(float(c) for c in points[i]), float(values[i])) for i in failing],
        len(points),
    )


def local_samples(r: ScalarField, p, half_width: float = LOCAL_SCAN_HALF_WIDTH, n: int = LOCAL_SCAN_SAMPLES, seed: int = 0):
    pts = _single_point(p)
    box = [(c - half_width, c + half_width) for c in pts[0]]
    return sample_boundary(r, box, n, seed=seed, level=0)


# endregion

### REPORT ###
# region
@dataclass
class TypeReport:
    """The classification of a boundary point.

    Attributes:
        point: The point.
        pseudoconvex: Local pseudoconvexity verdict.
        c_p: The type or "exceeds max_order".
        lambda_derivs: Values of the words over {L, Lbar} applied to lambda.
        strict4: Strict, Weak or NotApplicable.
        kohn4: Kohn's strict type 4 condition, None if not applicable.
        type4: (L Lbar lambda, L L lambda) when lambda(p) vanishes.
        tolerances: The tolerances used.
        scan: The local boundary scan, if one was needed.
    """

    point: Tuple[float, ...]
    pseudoconvex: Verdict
    c_p: Union[int, str]
    lambda_derivs: Dict[str, complex]
    strict4: Strict4
    kohn4: Optional[bool]
    type4: Optional[Tuple[complex, complex]]
    tolerances: Dict[str, float]
    scan: Optional[ScanResult] = None

    @property
    def levi(self) -> float:
        return self.lambda_derivs["lambda"].real

    def to_dict(self) -> dict:
        return {
            "point": list(self.point),
            "pseudoconvex": self.pseudoconvex.value,
            "c_p": self.c_p,
            "lambda": self.levi,
            "lambda_derivs": dict(self.lambda_derivs),
            "strict4": self.strict4.value,
            "kohn4": "NotApplicable" if self.kohn4 is None else self.kohn4,
            "type4": None
            if self.type4 is None
            else {"LLbar_lambda": self.type4[0], "LL_lambda": self.type4[1]},
            "tolerances": self.tolerances,
            "local_scan": None if self.scan is None else self.scan.to_dict(),
        }


def classify_point(r: ScalarField, p, tolerances: Optional[defaults.Tolerances] = None, seed: int = 0) -> TypeReport:
    """Classifies a boundary point.

    The pseudoconvexity verdict is positive at strictly pseudoconvex and strict
    type 4 points, negative where lambda < 0, at odd types and where
    L Lbar lambda < |L L lambda|; otherwise a scan of boundary samples around p
    decides.

    Raises:
        OffBoundaryError: If p is not on the boundary.
        DegenerateGradientError: If dr(p) = 0.
    """
    tol = tolerances or defaults.TOLERANCES
    pts = _single_point(p)
    check_on_boundary(r, pts, tol.tol_bdry)
    c_p, table, _ = type_words(r, pts, tol.max_order, tol.tol_zero)
    lam = table["lambda"].real
    type4 = _type4_values(r, pts) if abs(lam) <= tol.tol_zero else None
    strict4, kohn4 = Strict4.NOT_APPLICABLE, None
    if type4 is not None:
        strict4 = _strict4_from(c_p, *type4, tol.tol_zero)
        kohn4 = _kohn_from(c_p, *type4, tol.tol_zero)

    scan = None
    if c_p == 2:
        verdict = Verdict.PASS if lam > 0 else Verdict.FAIL
    elif isinstance(c_p, int) and c_p % 2:
        verdict = Verdict.FAIL
    elif c_p == 4 and type4[0].real < abs(type4[1]) - tol.tol_zero * _scale(*type4):
        verdict = Verdict.FAIL
    elif strict4 == Strict4.STRICT:
        verdict = Verdict.PASS
    else:
        scan = pseudoconvex_scan(r, local_samples(r, pts, seed=seed), tol.psd_tol)
        verdict = scan.verdict
    return TypeReport(
        tuple(float(c) for c in pts[0]),
        verdict,
        c_p,
        table,
        strict4,
        kohn4,
        type4,
        tol.as_dict(),
        scan,
    )


# endregion
