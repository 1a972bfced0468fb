"""Built-in domains and the verification checks of their known properties.

Entries:

- ``omega_local`` (k >= 3): u + |z|^2k/k^2 - 2|z|^(2k-2) v/(k-1)^2 + |z|^(2k-4) v^2/(k-2)^2
  + |z|^(4k-2), pseudoconvex near 0 and of type 2k at 0, without a defining
  function which is plurisubharmonic on the boundary near 0.
- ``omega_global`` (k >= 3): the same plus |w|^2, a bounded pseudoconvex domain.
- ``tanlog``: u - (x-v)^2/2 - ln(cos(x)) on |x| < pi/2, weak type 4 at 0.
- ``model`` (a): u + a Re(z^3 zbar) + |z|^4.
- ``tube`` (f): u + f(x, y).
- ``power`` (m): u + |z|^2m.

The coefficients are exact. a := |z|^2 - v is the quantity measuring the distance
to the weakly pseudoconvex paraboloid of the omega domains.
"""

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Union

import numpy as np

from . import defaults
from .boundary import BoxSpec, SampleSet
from .certify import Certificate, Condition, LevelStats, Witness
from .cframe import complex_hessian, levi_values
from .classify import Verdict
from .construct import graft
from .errors import ConfigError, CurveBranchError, EmptySampleError, UnknownGalleryError
from .expr import Box, ComplexField, ScalarField, as_points, evaluate, parse_field
from .taylor import taylor

logger = logging.getLogger(__name__)

BRANCHES = ("lower", "upper")
CURVE_TOL = 1e-10
MAX_WITNESSES = 5


@dataclass(frozen=True)
class Claim:
    """A known property of an entry and the check which evidences it."""

    name: str
    statement: str
    check: str

    def to_dict(self) -> dict:
        return {"name": self.name, "statement": self.statement, "check": self.check}


@dataclass
class GalleryEntry:
    """A built-in domain.

    Attributes:
        id: The gallery id.
        field: The defining function.
        params: The parameters the field was made with.
        claims: Known properties with the checks evidencing them.
        loci: Degenerate loci for the sampler, each a list of DSL texts whose
            common zero set is the locus.
        box: The default sampling box.
        point: A declared boundary point.
    """

    id: str
    field: ScalarField
    params: Dict[str, object]
    claims: List[Claim] = field(default_factory=list)
    loci: List[List[str]] = field(default_factory=list)
    box: BoxSpec = defaults.fallback_box
    point: tuple = (0.0, 0.0, 0.0, 0.0)
    source: str = ""

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "params": {k: str(v) if isinstance(v, Fraction) else v for k, v in self.params.items()},
            "dsl": self.source,
            "claims": [c.to_dict() for c in self.claims],
            "degenerate_loci": self.loci,
            "box": [list(i) for i in self.box],
            "point": list(self.point),
        }


def _integer(params: dict, name: str, default: int, minimum: int) -> int:
    value = params.get(name, default)
    if isinstance(value, Fraction) and value.denominator == 1:
        value = int(value)
    if isinstance(value, float) and value.is_integer():
        value = int(value)
    if not isinstance(value, int) or isinstance(value, bool) or value < minimum:
        raise ConfigError(f"The parameter '{name}' must be an integer >= {minimum}, got '{value}'.")
    return value


def omega_source(k: int, global_domain: bool = False) -> str:
    text = (
        f"u + 1/{k * k}*absz2^{k} - 2/{(k - 1) ** 2}*absz2^{k - 1}*v"
        f" + 1/{(k - 2) ** 2}*absz2^{k - 2}*v^2 + absz2^{2 * k - 1}"
    )
    return text + " + absw2" if global_domain else text


def _omega(params: dict, global_domain: bool) -> GalleryEntry:
    k = _integer(params, "k", 3, 3)
    source = omega_source(k, global_domain)
    gallery_id = "omega_global" if global_domain else "omega_local"
    claims = [
        Claim("type", f"finite type {2 * k} at 0", "type"),
        Claim("levi_bound", "H_r(L, L) >= |z|^(2k-6) (a^2 + |z|^(2k+2)) / 8 near 0", "levi-bound"),
        Claim("no_psh_boundary", "no defining function is plurisubharmonic on the boundary near 0", "psh-boundary"),
        Claim("loop", f"the forced loop integral equals 8 pi mu_k sigma^{2 * k - 2}", "loop"),
    ]
    if global_domain:
        claims += [
            Claim("bounded", "|z|^2 <= 4^(-1/(2k-1)), |v| <= 1/2 and u in [-1, 0]", "global-bounds"),
            Claim("pseudoconvex", "pseudoconvex everywhere", "global-psc"),
        ]
    else:
        claims.insert(0, Claim("pseudoconvex", "pseudoconvex near 0", "psd"))
    return GalleryEntry(
        gallery_id,
        parse_field(source),
        {"k": k},
        claims,
        [["v - absz2"]],
        defaults.default_boxes[gallery_id],
        source=source,
    )


def _tanlog(params: dict) -> GalleryEntry:
    source = "u - (x - v)^2/2 - ln(cos(x))"
    region = Box((-math.pi / 2, -math.inf, -math.inf, -math.inf), (math.pi / 2, math.inf, math.inf, math.inf), False)
    claims = [
        Claim("levi", "raw Levi form (x-v)^2 sec^2(x) / 16", "levi-closed-form"),
        Claim("weak_type4", "weak type 4 at 0", "type"),
        Claim("grafts", "r exp(y + u) and r exp(y + ln(cos(x))) satisfy the boundary psh condition", "psh-boundary"),
        Claim("weak_direction", "H_r(V, V)(0) = -s/2 + O(s^2) for V = -d/dz + is d/dw", "weak-direction"),
        Claim("not_sesquiconvex", "not sesquiconvex at 0", "sesqui"),
    ]
    return GalleryEntry("tanlog", parse_field(source, region=region), {}, claims, [["x - v"]], defaults.default_boxes["tanlog"], source=source)


def _model(params: dict) -> GalleryEntry:
    a = params.get("a", 1)
    if isinstance(a, str):
        raise ConfigError(f"The parameter 'a' must be a number, got '{a}'.")
    source = "u + $a*absz2*(x^2 - y^2) + absz2^2"
    claims = [
        Claim("pseudoconvex", "pseudoconvex at 0 iff |a| <= 4/3", "type"),
        Claim("strict4", "strict type 4 at 0 iff |a| < 4/3", "type"),
        Claim("kohn", "strict type 4 in the sense of Kohn iff |a| < 1", "type"),
    ]
    return GalleryEntry("model", parse_field(source, {"a": a}), {"a": a}, claims, [["x", "y"]], defaults.default_boxes["model"], source=source.replace("$a", f"({a})"))


def _tube(params: dict) -> GalleryEntry:
    f = str(params.get("f", "x^4"))
    source = f"u + ({f})"
    claims = [Claim("psh", "H_r(V, V) = f_zzbar |V^1|^2, plurisubharmonic for subharmonic f", "psh-boundary")]
    return GalleryEntry("tube", parse_field(source), {"f": f}, claims, [["x", "y"]], defaults.default_boxes["tube"], source=source)


def _power(params: dict) -> GalleryEntry:
    m = _integer(params, "m", 2, 1)
    source = f"u + absz2^{m}"
    claims = [Claim("type", f"finite type {2 * m} at 0", "type")]
    if m >= 3:
        claims.append(Claim("normal_vanish", "nu H_r(L, L)(0) = 0", "type6"))
    return GalleryEntry("power", parse_field(source), {"m": m}, claims, [["x", "y"]], defaults.default_boxes["power"], source=source)


_FACTORIES: Dict[str, Callable[[dict], GalleryEntry]] = {
    "omega_local": lambda p: _omega(p, False),
    "omega_global": lambda p: _omega(p, True),
    "tanlog": _tanlog,
    "model": _model,
    "tube": _tube,
    "power": _power,
}

GALLERY_IDS = tuple(_FACTORIES)


def make(gallery_id: str, params: Optional[dict] = None) -> GalleryEntry:
    """Creates a gallery entry.

    Args:
        gallery_id (str): One of GALLERY_IDS.
        params (dict, optional): k for the omega domains, a for model, f (DSL) for
            tube and m for power. Defaults to the documented defaults.

    Raises:
        UnknownGalleryError: For unknown ids.
        ConfigError: For invalid parameters.
    """
    if gallery_id not in _FACTORIES:
        raise UnknownGalleryError(f"Unknown gallery id '{gallery_id}', use one of {', '.join(GALLERY_IDS)}.")
    return _FACTORIES[gallery_id](dict(params or {}))


def list_entries() -> List[dict]:
    return [make(gallery_id).to_dict() for gallery_id in GALLERY_IDS]


### CLOSED FORMS ###
# region
def mu(k: int) -> Fraction:
    return Fraction(1, (k - 1) * (k - 2))


def omega_partials(k: int, points, global_domain: bool = False) -> Dict[str, np.ndarray]:
    """The displayed closed forms of r_z, r_w, r_zzbar, r_zwbar and r_wwbar."""
    pts, _ = as_points(points)
    x, y, u, v = pts.T
    zbar = x - 1j * y
    s = x**2 + y**2
    r_z = zbar * (
        s ** (k - 1) / k - 2 * s ** (k - 2) * v / (k - 1) + s ** (k - 3) * v**2 / (k - 2) + (2 * k - 1) * s ** (2 * k - 2)
    )
    imag = s ** (k - 1) / (k - 1) ** 2 - s ** (k - 2) * v / (k - 2) ** 2
    if global_domain:
        r_w = (0.5 + u) + 1j * (imag - v)
    else:
        r_w = 0.5 + 1j * imag
    r_zzbar = s ** (k - 3) * (s - v) ** 2 + (2 * k - 1) ** 2 * s ** (2 * k - 2)
    r_zwbar = -1j / (k - 1) * zbar * s ** (k - 2) + 1j / (k - 2) * zbar * s ** (k - 3) * v
    r_wwbar = s ** (k - 2) / (2 * (k - 2) ** 2) + (1.0 if global_domain else 0.0)
    return {"r_z": r_z, "r_w": r_w, "r_zzbar": r_zzbar + 0j, "r_zwbar": r_zwbar, "r_wwbar": r_wwbar + 0j}


def tanlog_levi(points) -> np.ndarray:
    """(x-v)^2 sec^2(x) / 16, the raw Levi form of the tanlog entry."""
    pts, _ = as_points(points)
    x, v = pts[:, 0], pts[:, 3]
    return (x - v) ** 2 / np.cos(x) ** 2 / 16


def weak_direction_value(s: float, h=None) -> float:
    """H_rho(V, V)(0) for V = -d/dz + is d/dw on tanlog, rho = r exp(h)."""
    r = make("tanlog").field
    rho = r if h is None else graft(r, h)
    return float(np.real(complex_hessian(rho, (0.0, 0.0, 0.0, 0.0), (-1.0, 1j * s), (-1.0, 1j * s))))


def sclc_check(A, B, C) -> bool:
    """Whether A s^2 + B s t + C t^2 >= eps (s^2 + t^2) for some eps > 0, in exact arithmetic."""
    A, B, C = (Fraction(c) for c in (A, B, C))
    return 4 * A * C - B * B > 0 and A >= 0 and C >= 0 and A + C > 0


def f_k(k: int, t):
    return np.asarray(t, dtype=float) ** (k - 1) - (k - 2) ** 2 * np.asarray(t, dtype=float) + 1 / ((k - 1) ** 2 * (2 * k - 1) ** 2)


def interval_k(k: int):
    """I_k = (1/10, 4^(-1/(2k-1))]."""
    return 0.1, 4 ** (-1 / (2 * k - 1))


# endregion

### CHECKS ###
# region
def _points_of(samples) -> np.ndarray:
    if isinstance(samples, (list, tuple)) and samples and isinstance(samples[0], SampleSet):
        samples = SampleSet.concat(samples)
    points = samples.points if isinstance(samples, SampleSet) else as_points(samples)[0]
    if not len(points):
        raise EmptySampleError("The check needs at least one sample.")
    return points


def _witnesses(points, values, bad, note) -> List[Witness]:
    rows = np.flatnonzero(bad)
    return [Witness(tuple(float(c) for c in points[i]), float(values[i]), note) for i in rows[:MAX_WITNESSES]]


def levi_lower_bound_check(k: int, samples, constant=Fraction(1, 8), global_domain: bool = False) -> Certificate:
    """H_r(L, L) >= c |z|^(2k-6) (a^2 + |z|^(2k+2)) - 1e-12 with the raw L = r_w d/dz - r_z d/dw.

    Samples with |z| or |v| above 1/10 are ignored.
    """
    r = make("omega_global" if global_domain else "omega_local", {"k": k}).field
    points = _points_of(samples)
    x, y, _, v = points.T
    s = x**2 + y**2
    inside = (np.sqrt(s) <= 0.1) & (np.abs(v) <= 0.1)
    points, s, v = points[inside], s[inside], v[inside]
    if not len(points):
        raise EmptySampleError("No sample with |z|, |v| <= 1/10.")
    levi = levi_values(r, points, "raw")
    bound = float(constant) * s ** (k - 3) * ((s - v) ** 2 + s ** (k + 1))
    margin = levi - (bound - 1e-12)
    bad = margin < 0
    stats = [LevelStats(0, len(points), len(points), float(np.max(-margin)), tuple(points[int(np.argmin(margin))]))]
    return Certificate(
        Condition.LEVI_BOUND,
        Verdict.FAIL if np.any(bad) else Verdict.PASS,
        stats,
        _witnesses(points, levi, bad, "raw Levi value below the bound"),
        details={"k": k, "constant": str(Fraction(constant)), "min_margin": float(margin.min())},
    )


def global_bounds_check(k: int, samples) -> Certificate:
    """|z|^2 <= 4^(-1/(2k-1)), |v| <= 1/2 and u in [-1, 0] up to 1e-9."""
    points = _points_of(samples)
    x, y, u, v = points.T
    s = x**2 + y**2
    _, z_bound = interval_k(k)
    excess = np.stack([s - z_bound, np.abs(v) - 0.5, -1 - u, u], axis=1).max(axis=1)
    bad = excess > 1e-9
    return Certificate(
        Condition.GLOBAL_BOUNDS,
        Verdict.FAIL if np.any(bad) else Verdict.PASS,
        [LevelStats(0, len(points), len(points), float(excess.max()), tuple(points[int(np.argmax(excess))]))],
        _witnesses(points, excess, bad, "bound exceeded"),
        details={"max_abs_z2": float(s.max()), "max_abs_v": float(np.abs(v).max()), "u_range": [float(u.min()), float(u.max())]},
    )


def case2_d(k: int, points) -> np.ndarray:
    pts, _ = as_points(points)
    s = pts[:, 0] ** 2 + pts[:, 1] ** 2
    a = np.abs(s - pts[:, 3])
    return (
        (1 - s ** (k - 2) / (k - 2) ** 2) * a**2
        - 2 * s ** (k - 1) / ((k - 1) * (k - 2) ** 2) * a
        + ((2 * k - 1) ** 2 * s ** (k + 1) - s**k / ((k - 1) ** 2 * (k - 2) ** 2))
    )


def global_psc_check(k: int, samples, grid_size: int = 10000) -> Certificate:
    """Pseudoconvexity of the global domain in three parts and a remainder.

    1. Samples with |z|, |a| < 1/10: the best eps with H_r(L, L) >= eps |z|^(2k-6)
       (a^2 + |z|^(2k+2)) must be positive.
    2. Samples with |a| > 1/10 and |z|^2 <= 1/10, or |z|^2 > 1/10: d(z, w) > 0.
    3. f_k < 0 on a grid of I_k.
    Samples in neither part (|z| >= 1/10, |z|^2 <= 1/10, |a| <= 1/10) must have a
    positive raw Levi value.
    """
    r = make("omega_global", {"k": k}).field
    points = _points_of(samples)
    s = points[:, 0] ** 2 + points[:, 1] ** 2
    a = np.abs(s - points[:, 3])
    levi = levi_values(r, points, "raw")
    case1 = (np.sqrt(s) < 0.1) & (a < 0.1)
    case2 = ((a > 0.1) & (s <= 0.1)) | (s > 0.1)
    rest = ~case1 & ~case2
    witnesses, details = [], {"k": k}

    if np.any(case1):
        weight = s[case1] ** (k - 3) * (a[case1] ** 2 + s[case1] ** (k + 1))
        usable = weight > 0
        eps = float((levi[case1][usable] / weight[usable]).min()) if np.any(usable) else math.inf
        details["case1_eps"] = eps
        details["case1_samples"] = int(np.count_nonzero(case1))
        if not eps > 0:
            index = np.flatnonzero(case1)[usable][int(np.argmin(levi[case1][usable] / weight[usable]))]
            witnesses.append(Witness(tuple(points[index]), float(levi[index]), "case 1: no positive eps"))
    d = case2_d(k, points[case2])
    details["case2_samples"] = int(np.count_nonzero(case2))
    details["case2_min_d"] = float(d.min()) if len(d) else None
    witnesses += _witnesses(points[case2], d, d <= 0, "case 2: d(z, w) <= 0")
    lo, hi = interval_k(k)
    grid = np.linspace(lo, hi, grid_size + 1)[1:]
    values = f_k(k, grid)
    details["f_k_max"] = float(values.max())
    if np.any(values >= 0):
        t = float(grid[int(np.argmax(values))])
        witnesses.append(Witness((math.sqrt(t), 0.0, 0.0, 0.0), float(values.max()), "f_k >= 0 at |z|^2 = t"))
    details["remaining_samples"] = int(np.count_nonzero(rest))
    witnesses += _witnesses(points[rest], levi[rest], levi[rest] <= 0, "remaining: Levi value <= 0")
    return Certificate(
        Condition.GLOBAL_PSC,
        Verdict.FAIL if witnesses else Verdict.PASS,
        [LevelStats(0, len(points), len(points), float(-levi.min()), tuple(points[int(np.argmin(levi))]))],
        witnesses[:MAX_WITNESSES],
        details=details,
    )


# endregion

### LOOP OBSTRUCTION ###
# region
def curve_u(k: int, sigma: float, branch: str = "lower", global_domain: bool = False) -> float:
    """u(sigma) such that (zeta, u + i|zeta|^2) lies on the boundary for |zeta| = sigma.

    The local domain has a single solution ("lower"). The global domain has two,
    "lower" is the one near u = 0 and "upper" the one near u = -1.

    Raises:
        CurveBranchError: For unknown branches or branches without a solution.
    """
    if branch not in BRANCHES:
        raise CurveBranchError(f"Unknown branch '{branch}', use one of {BRANCHES}.")
    c = (Fraction(1, k * k) - Fraction(2, (k - 1) ** 2) + Fraction(1, (k - 2) ** 2))
    rest = float(c) * sigma ** (2 * k) + sigma ** (4 * k - 2)
    if not global_domain:
        if branch != "lower":
            raise CurveBranchError(f"The local domain has no '{branch}' branch, use 'lower'.")
        return -rest
    discriminant = 1 - 4 * (rest + sigma**4)
    if discriminant < 0:
        raise CurveBranchError(f"No boundary point on the '{branch}' branch for sigma = {sigma}.")
    root = math.sqrt(discriminant)
    return (-1 + root) / 2 if branch == "lower" else (-1 - root) / 2


def boundary_curve(k: int, sigma: float, t, branch: str = "lower", global_domain: bool = False) -> np.ndarray:
    """gamma_sigma(t) = (sigma e^it, u(sigma) + i sigma^2), checked to lie on the boundary."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    u = curve_u(k, sigma, branch, global_domain)
    points = np.stack(
        [sigma * np.cos(t), sigma * np.sin(t), np.full_like(t, u), np.full_like(t, sigma**2)], axis=1
    )
    r = make("omega_global" if global_domain else "omega_local", {"k": k}).field
    residual = np.abs(np.atleast_1d(evaluate(r, points)))
    if residual.max() > CURVE_TOL:
        raise CurveBranchError(
            f"The curve on the '{branch}' branch leaves the boundary (|r| = {residual.max():.3e})."
        )
    return points


def forced_form(k: int) -> ComplexField:
    """h_z = -2i mu_k zbar |z|^(2k-4), the leading term a multiplier would need."""
    m = mu(k)
    absz = parse_field(f"absz2^{k - 2}")
    return ComplexField(parse_field("y") * absz * (-2 * m), parse_field("x") * absz * (-2 * m))


def loop_integral(
    form: Union[ScalarField, ComplexField, str],
    k: int,
    sigma: float,
    quadrature_n: int = 256,
    branch: str = "lower",
    global_domain: bool = False,
) -> float:
    """The integral of 2 Re(h_z dz) along gamma_sigma.

    Args:
        form: A real function h (its h_z is used) or a complex field taken as h_z.
        k (int): The omega parameter.
        sigma (float): The radius.
        quadrature_n (int, optional): Number of nodes of the periodic trapezoidal
            rule, at least 64. Defaults to 256.
        branch (str, optional): The u branch. Defaults to "lower".
        global_domain (bool, optional): Whether the curve lies on the global domain.
    """
    if quadrature_n < 64:
        raise ValueError("The quadrature needs at least 64 nodes.")
    if isinstance(form, str):
        form = parse_field(form)
    h_z = ComplexField(form).dz() if isinstance(form, ScalarField) else form
    t = 2 * np.pi * np.arange(quadrature_n) / quadrature_n
    points = boundary_curve(k, sigma, t, branch, global_domain)
    dz = 1j * sigma * np.exp(1j * t)
    values = np.asarray(h_z.evaluate(points)) * dz
    return float(2 * np.real(values).sum() * 2 * np.pi / quadrature_n)


def obstruction_scaling(k: int, sigmas: Sequence[float], perturbation: float = 0.0, quadrature_n: int = 256) -> List[dict]:
    """loop_integral of the forced form over 8 pi mu_k sigma^(2k-2) for every sigma.

    With a perturbation p the term i p zbar |z|^(2k-2) is added to the form. It
    changes the ratio by -p sigma^2 / (2 mu_k), which vanishes as sigma -> 0.
    """
    form = forced_form(k)
    if perturbation:
        extra = parse_field(f"absz2^{k - 1}") * perturbation
        form = form + ComplexField(parse_field("y") * extra, parse_field("x") * extra)
    rows = []
    for sigma in sigmas:
        value = loop_integral(form, k, sigma, quadrature_n)
        expected = 8 * math.pi * float(mu(k)) * sigma ** (2 * k - 2)
        rows.append({"sigma": float(sigma), "integral": value, "expected": expected, "ratio": value / expected})
    return rows


# endregion

### SUPPORT ###
# region
def candidate_multipliers(n: int = 20, seed: int = 0) -> List[str]:
    """A deterministic library of real polynomial multipliers of degree <= 4 (DSL)."""
    fixed = ["0", "y + u", "x^2 + y^2", "v", "-2*u + x*y"]
    rng = np.random.default_rng(seed)
    monomials = ["x", "y", "u", "v", "x^2", "x*y", "y^2", "x*v", "y*u", "u^2", "x^3", "y^2*v", "x^4", "absz2^2", "u*v"]
    out = fixed[:n]
    while len(out) < n:
        chosen = rng.choice(len(monomials), size=3, replace=False)
        coefficients = rng.integers(-9, 10, size=3)
        terms = [f"{int(c)}/10*{monomials[i]}" for c, i in zip(coefficients, chosen) if c]
        out.append(" + ".join(terms) if terms else "0")
    return out


def lambda_plot_slice(entry: GalleryEntry, grid=(41, 41), x_range=None, v_range=None, normalization: str = "raw") -> List[list]:
    """Rows (x, v, lambda) along a grid in (x, v) at y = 0, solving r = 0 for u."""
    x_range = x_range or entry.box[0]
    v_range = v_range or entry.box[3]
    xs, vs = np.meshgrid(np.linspace(*x_range, grid[0]), np.linspace(*v_range, grid[1]), indexing="ij")
    points = np.stack([xs.ravel(), np.zeros(xs.size), np.zeros(xs.size), vs.ravel()], axis=1)
    r = entry.field
    ok = np.ones(len(points), dtype=bool) if r.region is None else r.region.contains(points)
    points = points[ok]
    for _ in range(60):
        jet = taylor(r, points, 1)
        r_u = jet.partial((0, 0, 1, 0))
        step = np.where(r_u != 0, jet.value / np.where(r_u != 0, r_u, 1.0), 0.0)
        points[:, 2] -= step
        if np.max(np.abs(step), initial=0.0) < 1e-14:
            break
    converged = np.abs(np.atleast_1d(evaluate(r, points))) <= defaults.TOLERANCES.tol_bdry
    points = points[converged]
    values = levi_values(r, points, normalization) if len(points) else np.zeros(0)
    return [[float(p[0]), float(p[3]), float(l)] for p, l in zip(points, values)]


# endregion
