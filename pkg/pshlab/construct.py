"""Constructions of modified defining functions.

The multipliers h are built symbolically from the frame of r, so that the grafted
function rho = r exp(h) is again a field which the certificates can
differentiate. Denominators are checked on boundary samples before a recipe is
returned.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, Optional, Sequence, Tuple, Union

import numpy as np

from . import defaults, messages
from .boundary import BoxSpec, SampleSet, project_points, sample_boundary
from .cframe import LeviJets, frame_fields
from .errors import ExpressionTooLarge, StrictType4Violation, TypeExceeds4
from .expr import (
    ComplexField,
    ScalarField,
    X,
    Y,
    U,
    V,
    as_points,
    const_field,
    exp,
    field_to_json,
    flat_field,
    ln,
    node_count,
    parse_field,
    sqrt,
    to_dsl,
)

logger = logging.getLogger(__name__)

Number = Union[int, float, Fraction]

CHECK_SAMPLES = 64
DSL_LIMIT = 4000


class MultiplierKind(str, Enum):
    STRICT4 = "Strict4"
    NORMAL = "NormalDeriv"
    USER = "UserGiven"


def field_summary(f: ScalarField, limit: int = DSL_LIMIT) -> dict:
    """DSL text of a field if it is short enough, its node count otherwise."""
    try:
        return {"dsl": to_dsl(f, limit), "nodes": node_count(f.node)}
    except ExpressionTooLarge:
        return {"dsl": None, "nodes": node_count(f.node)}


@dataclass
class MultiplierRecipe:
    """A multiplier h for the graft rho = r exp(h) and the fields it is built from.

    Attributes:
        kind: Strict4, NormalDeriv or UserGiven.
        h: The multiplier.
        ingredients: Named fields (F, A1, A2, A, B) the multiplier is built from.
        min_denominator: The smallest denominator B on the check samples.
        witness: The sample attaining min_denominator.
    """

    kind: MultiplierKind
    h: ScalarField
    ingredients: Dict[str, ScalarField] = field(default_factory=dict)
    min_denominator: Optional[float] = None
    witness: Optional[Tuple[float, ...]] = None

    def to_dict(self, include_graph: bool = False) -> dict:
        out = {
            "kind": self.kind.value,
            "h": field_summary(self.h),
            "ingredients": {k: field_summary(v) for k, v in sorted(self.ingredients.items())},
            "min_denominator": self.min_denominator,
            "witness": None if self.witness is None else list(self.witness),
        }
        if include_graph:
            out["h_graph"] = field_to_json(self.h)
        return out


def user_multiplier(h: Union[str, ScalarField]) -> MultiplierRecipe:
    return MultiplierRecipe(MultiplierKind.USER, parse_field(h) if isinstance(h, str) else h)


def _check_points(r: ScalarField, region: Optional[BoxSpec], samples) -> np.ndarray:
    if samples is not None:
        points = samples.points if isinstance(samples, SampleSet) else as_points(samples)[0]
        return points
    box = region or defaults.fallback_box
    center = np.array([[0.5 * (lo + hi) for lo, hi in box]])
    projected = project_points(r, center, orthogonal=False)
    points = [projected.points[projected.converged]]
    points.append(sample_boundary(r, box, CHECK_SAMPLES, level=0).points)
    return np.concatenate(points)


def _denominators(r: ScalarField, points: np.ndarray, kind: MultiplierKind) -> np.ndarray:
    jets = LeviJets(r, points, 2)
    lbar_l = jets.word("Lb,L").value
    l_l = jets.word("L,L").value
    if kind == MultiplierKind.STRICT4:
        return np.abs(lbar_l) ** 2 - np.abs(l_l) ** 2
    l_lbar = jets.word("L,Lb").value
    return jets.levi.value.real ** 2 + np.abs(l_lbar) ** 2 + np.abs(l_l) ** 2


### MULTIPLIERS ###
# region
def multiplier_strict4(
    r: ScalarField, region: Optional[BoxSpec] = None, samples=None, tol: Optional[float] = None
) -> MultiplierRecipe:
    """The multiplier h = (Re F A1 + Im F A2) / B of a strict type 4 neighborhood.

    With lambda the Levi field, F = -(2/|dr|) H_r(L, N),
    A1 = 2 Re((Lbar L lambda - L L lambda) Lbar lambda),
    A2 = 2 Re(i (Lbar L lambda + L L lambda) Lbar lambda) and
    B = |Lbar L lambda|^2 - |L L lambda|^2. On the boundary, L h = F + O(sqrt(lambda)).

    Args:
        r (ScalarField): The defining function.
        region (BoxSpec, optional): The box whose boundary samples must have B > tol.
        samples (optional): Explicit check samples instead of the region.
        tol (float, optional): The denominator threshold. Defaults to tol_zero.

    Raises:
        StrictType4Violation: If B <= tol at a check sample.
    """
    tol = defaults.TOLERANCES.tol_zero if tol is None else tol
    points = _check_points(r, region, samples)
    denominators = _denominators(r, points, MultiplierKind.STRICT4)
    worst = int(np.argmin(denominators))
    if denominators[worst] <= tol:
        raise StrictType4Violation(
            "B = |Lbar L lambda|^2 - |L L lambda|^2 is not bounded away from 0, "
            "the point is not of strict type 4.",
            points[worst],
            denominators[worst],
        )

    frame = frame_fields(r)
    lam = frame.levi_field()
    l_lam = frame.apply_L(lam)
    lbar_lam = frame.apply_Lbar(lam)
    lbar_l = frame.apply_Lbar(l_lam)
    l_l = frame.apply_L(l_lam)
    F = frame.hessian(r, frame.L, frame.N) * ComplexField(-2 / frame.norm_dr)
    A1 = ((lbar_l - l_l) * lbar_lam).re * 2
    A2 = -((lbar_l + l_l) * lbar_lam).im * 2
    B = lbar_l.abs2() - l_l.abs2()
    h = (F.re * A1 + F.im * A2) / B
    logger.info(messages.multiplier_built("strict type 4", node_count(h.node), float(denominators[worst])))
    return MultiplierRecipe(
        MultiplierKind.STRICT4,
        h,
        {"F_re": F.re, "F_im": F.im, "A1": A1, "A2": A2, "B": B},
        float(denominators[worst]),
        tuple(float(c) for c in points[worst]),
    )


def multiplier_normal(
    r: ScalarField, region: Optional[BoxSpec] = None, samples=None, tol: Optional[float] = None
) -> MultiplierRecipe:
    """The multiplier h = F A / B of a type 4 neighborhood.

    With lambda the Levi field, F = -(1/|dr|) nu lambda, A = |L lambda|^2 and
    B = lambda^2 + |L Lbar lambda|^2 + |L L lambda|^2. On the boundary
    L h = O(sqrt(lambda)) and Lbar L h = F + O(sqrt(lambda)).

    Raises:
        TypeExceeds4: If B <= tol at a check sample.
    """
    tol = defaults.TOLERANCES.tol_zero if tol is None else tol
    points = _check_points(r, region, samples)
    denominators = _denominators(r, points, MultiplierKind.NORMAL)
    worst = int(np.argmin(denominators))
    if denominators[worst] <= tol:
        raise TypeExceeds4(
            "B = lambda^2 + |L Lbar lambda|^2 + |L L lambda|^2 vanishes, the type exceeds 4.",
            points[worst],
            denominators[worst],
        )

    frame = frame_fields(r)
    lam = frame.levi_field()
    l_lam = frame.apply_L(lam)
    l_lbar = frame.apply_L(frame.apply_Lbar(lam))
    l_l = frame.apply_L(l_lam)
    F = -frame.apply_real("nu", lam) / frame.norm_dr
    A = l_lam.abs2()
    B = lam * lam + l_lbar.abs2() + l_l.abs2()
    h = F * A / B
    logger.info(messages.multiplier_built("normal derivative", node_count(h.node), float(denominators[worst])))
    return MultiplierRecipe(
        MultiplierKind.NORMAL,
        h,
        {"F": F, "A": A, "B": B},
        float(denominators[worst]),
        tuple(float(c) for c in points[worst]),
    )


# endregion

### MODIFICATIONS ###
# region
def _multiplier_field(h) -> ScalarField:
    if isinstance(h, MultiplierRecipe):
        return h.h
    if isinstance(h, str):
        return parse_field(h)
    return h


def graft(r: ScalarField, h) -> ScalarField:
    """rho = r exp(h), a defining function of the same domain."""
    h = _multiplier_field(h)
    if h.is_zero():
        return r
    return (r * exp(h)).with_region(r.region)


def bend(rho: ScalarField, C: Number) -> ScalarField:
    """rho + (C/2) rho^2. On the boundary this adds C |N rho|^2 to H(N, N)."""
    if C == 0:
        return rho
    return (rho + _exact(C) / 2 * rho * rho).with_region(rho.region)


def _exact(value: Number):
    if isinstance(value, float) and value.is_integer():
        return Fraction(int(value))
    if isinstance(value, (int, Fraction)):
        return Fraction(value)
    return value


def globalize_constants(C: Number, D: Number) -> Tuple[Number, Number]:
    """K1 = 3 K2 D^2 + 3C/4 + 1 and K2 = 3C + 1."""
    C, D = _exact(C), _exact(D)
    K2 = 3 * C + 1
    K1 = 3 * K2 * D * D + Fraction(3, 4) * C + 1
    return K1, K2


def globalize_quadratic(r: ScalarField, C: Number, D: Number) -> Tuple[ScalarField, Number, Number]:
    """rho = r + r^2 (K1 + K2 (|z|^2 + |w|^2)).

    C is an empirical constant of the estimate H_r(xi, xi) >= -C (r^2 |xi|^2 +
    |<del r, xi>|^2) and D bounds |(z, w)| on the working region.
    """
    if C < 0 or D < 0:
        raise ValueError("The constants C and D must be non-negative.")
    K1, K2 = globalize_constants(C, D)
    psi = K1 + K2 * (X * X + Y * Y + U * U + V * V)
    logger.info(messages.globalized(float(K1), float(K2)))
    return (r + r * r * psi).with_region(r.region), K1, K2


def uk_mask(r: ScalarField, K1: Number, K2: Number, points) -> np.ndarray:
    """The shrinkage condition 1/2 <= 1 + 2 r psi <= 3/2 at points."""
    pts, _ = as_points(points)
    psi = float(K1) + float(K2) * np.einsum("ij,ij->i", pts, pts)
    value = 1 + 2 * np.asarray(r.evaluate(pts)) * psi
    return (value >= 0.5) & (value <= 1.5)


def smooth_step(t: ScalarField) -> ScalarField:
    """1 for t <= 0, 0 for t >= 1, smooth in between."""
    inner, outer = flat_field(1 - t), flat_field(t)
    return inner / (inner + outer)


def cutoff_patch(
    r: ScalarField,
    h,
    inner_radius: Number,
    outer_radius: Number,
    center: Sequence[float] = (0.0, 0.0, 0.0, 0.0),
) -> ScalarField:
    """r exp(chi h) with a smooth cutoff chi, 1 inside inner_radius and 0 outside
    outer_radius around center."""
    if not 0 < inner_radius < outer_radius:
        raise ValueError("The radii must satisfy 0 < inner_radius < outer_radius.")
    h = _multiplier_field(h)
    if h.is_zero():
        return r
    distance2 = const_field(0)
    for coordinate, c in zip((X, Y, U, V), center):
        distance2 = distance2 + (coordinate - c) * (coordinate - c)
    inner2, outer2 = _exact(inner_radius) ** 2, _exact(outer_radius) ** 2
    t = (distance2 - inner2) / (outer2 - inner2)
    chi = smooth_step(t)
    return (r * exp(chi * h)).with_region(r.region)


def df_bump(r: ScalarField, K: Number, eta: Number) -> ScalarField:
    """-(-r - K r^2)^eta, defined where -r - K r^2 > 0."""
    if not 0 < eta <= 1:
        raise ValueError("The exponent eta must lie in (0, 1].")
    base = -r - _exact(K) * r * r
    return (-exp(_exact(eta) * ln(base))).with_region(r.region)


def df_bump_ext(r: ScalarField, K: Number, mu: Number) -> ScalarField:
    """(r + K r^2)^mu, defined where r + K r^2 > 0."""
    if not mu > 1:
        raise ValueError("The exponent mu must be larger than 1.")
    base = r + _exact(K) * r * r
    return exp(_exact(mu) * ln(base)).with_region(r.region)


def normalize_gradient(r: ScalarField) -> ScalarField:
    """r / |dr|."""
    partials = [r.diff(v) for v in "xyuv"]
    return (r / sqrt(sum((p * p for p in partials), const_field(0)))).with_region(r.region)


# endregion
