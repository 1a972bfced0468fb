"""The command line interface.

Reports are written as deterministic JSON to stdout (and to --out). Logging goes
to stderr. Exit codes: 0 for pass (and inconclusive results), 2 for a mathematical
failure with witnesses, 1 for operational errors.
"""

import argparse
import logging
import sys
from dataclasses import dataclass
from pathlib import Path
from time import perf_counter
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from . import certify, defaults, gallery, messages
from .boundary import SampleSet, refine_samples, sample_boundary, tubular_samples
from .cframe import levi_values, normal_derivative_levi
from .classify import Verdict, classify_point
from .construct import (
    bend,
    cutoff_patch,
    df_bump,
    globalize_quadratic,
    graft,
    multiplier_normal,
    multiplier_strict4,
    field_summary,
    normalize_gradient,
    uk_mask,
)
from .errors import ConfigError, MathematicalFailure, PshlabError
from .expr import ScalarField, field_from_json, field_to_json, node_count, parse_field
from .utils import SCHEMA, AnnotatedTimer, create_logger, get_json_from_file, to_json, write_csv, write_text

logger = logging.getLogger(__name__)

CONDITIONS = (
    "psd",
    "psh-boundary",
    "psh-open",
    "normal",
    "normal-onesided",
    "basic-estimate",
    "sesqui",
    "real-coords",
    "hx-hy",
    "type6",
    "df",
    "levi-bound",
    "global-bounds",
    "global-psc",
)
RECIPES = ("strict4", "normal", "bend", "globalize", "cutoff", "df", "sesqui")
TUBE_DELTAS = (-0.01, -0.001, 0.001, 0.01)
DF_DEPTHS = (0.005, 0.01, 0.02, 0.05)
SUITE_SIGMAS = (0.05, 0.1, 0.2)
MODEL_PARAMETERS = ("0", "1/2", "9/10", "1", "6/5", "4/3", "7/5")
OBSTRUCTION_LEVELS = 4
STRICT4_PIPELINE_ENTRIES = ("power:m=2", "model:a=1")
NORMAL_PIPELINE_ENTRY = "power:m=2"

EXIT_PASS = 0
EXIT_OPERATIONAL = 1
EXIT_FAIL = 2


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, assembled from the command line flags.

    Identical configurations produce byte-identical reports.
    """

    command: str
    condition: Optional[str] = None
    recipe: Optional[str] = None
    field_text: Optional[str] = None
    file: Optional[str] = None
    gallery: Optional[str] = None
    multiplier: Optional[str] = None
    h: Optional[str] = None
    point: Optional[Tuple[float, float, float, float]] = None
    box: Optional[str] = None
    samples: int = defaults.samples
    levels: int = defaults.levels
    tolerances: defaults.Tolerances = defaults.TOLERANCES
    seed: int = defaults.seed
    C: Optional[float] = None
    D: Optional[float] = None
    K: Optional[float] = None
    eta: float = 0.9
    mu: float = 2.0
    exterior: bool = False
    inner: float = 0.05
    outer: float = 0.1
    k: int = 3
    candidates: int = 20
    out: Optional[str] = None
    field_out: Optional[str] = None
    emit_plots: Optional[str] = None

    def __post_init__(self):
        if self.samples < 16:
            raise ConfigError(f"At least 16 samples are needed, got {self.samples}.")
        if self.levels < 2:
            raise ConfigError(f"At least 2 refinement levels are needed, got {self.levels}.")
        if self.command in ("classify", "certify", "construct") and not any(
            (self.field_text, self.file, self.gallery)
        ):
            raise ConfigError("One of --field, --file or --gallery is required.")

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        tolerances = defaults.TOLERANCES.updated(
            tol_zero=args.tol_zero, tol_bdry=args.tol_bdry, lambda_min=args.lambda_min, psd_tol=args.psd_tol
        )
        return cls(
            command=args.command,
            condition=getattr(args, "condition", None),
            recipe=getattr(args, "recipe", None),
            field_text=args.field,
            file=args.file,
            gallery=args.gallery,
            multiplier=args.multiplier,
            h=args.h,
            point=defaults.eval_point(args.point) if args.point else None,
            box=args.box,
            samples=args.samples,
            levels=args.levels,
            tolerances=tolerances,
            seed=args.seed,
            C=args.C,
            D=args.D,
            K=args.K,
            eta=args.eta,
            mu=args.mu,
            exterior=args.exterior,
            inner=args.inner,
            outer=args.outer,
            k=args.k,
            candidates=args.candidates,
            out=args.out,
            field_out=args.field_out,
            emit_plots=args.emit_plots,
        )

    def as_dict(self) -> dict:
        """The configuration echoed into reports, output paths excluded."""
        out = {
            name: getattr(self, name)
            for name in self.__dataclass_fields__
            if name not in ("tolerances", "out", "field_out", "emit_plots")
        }
        out["tolerances"] = self.tolerances.as_dict()
        return out


@dataclass
class Problem:
    """The field a command works on and where to sample it."""

    field: ScalarField
    box: tuple
    loci: Optional[List[List[str]]]
    point: Tuple[float, float, float, float]
    entry: Optional[gallery.GalleryEntry] = None


### FIELDS AND SAMPLES ###
# region
def load_problem(config: RunConfig) -> Problem:
    entry = None
    if config.gallery:
        gallery_id, params = defaults.eval_gallery_spec(config.gallery)
        entry = gallery.make(gallery_id, params)
        field, box_id = entry.field, entry.id
    elif config.file:
        path = Path(config.file)
        if path.suffix == ".json":
            field = field_from_json(get_json_from_file(path))
            logger.info(messages.loaded_graph(path, node_count(field.node)))
        else:
            field = parse_field(path.read_text())
            logger.info(messages.parsed_field(path, node_count(field.node)))
        box_id = None
    else:
        field = parse_field(config.field_text)
        logger.info(messages.parsed_field(config.field_text, node_count(field.node)))
        box_id = None
    if config.multiplier:
        field = graft(field, config.multiplier)
    point = config.point or (entry.point if entry else (0.0, 0.0, 0.0, 0.0))
    return Problem(field, defaults.eval_box(config.box, box_id), entry.loci if entry else None, point, entry)


def _levels(config: RunConfig, problem: Problem, field: Optional[ScalarField] = None) -> List[SampleSet]:
    return refine_samples(
        field or problem.field,
        problem.box,
        config.samples,
        config.levels,
        problem.loci,
        config.seed,
        tol=config.tolerances.tol_bdry,
    )


def _boundary(config: RunConfig, problem: Problem, field: Optional[ScalarField] = None) -> SampleSet:
    return sample_boundary(
        field or problem.field, problem.box, config.samples, seed=config.seed, tol=config.tolerances.tol_bdry
    )


def _mixed_levels(r: ScalarField, levels: List[SampleSet]) -> List[np.ndarray]:
    out = []
    for index, level in enumerate(levels):
        scale = 10.0 ** (-index)
        off, _ = tubular_samples(r, level, [d * scale for d in TUBE_DELTAS])
        out.append(np.concatenate([level.points, off]))
    return out


def _interior(r: ScalarField, samples: SampleSet, exterior: bool = False) -> np.ndarray:
    depths = DF_DEPTHS if exterior else tuple(-d for d in DF_DEPTHS)
    points, _ = tubular_samples(r, samples, depths)
    return points


def _require_entry(problem: Problem, *ids: str) -> gallery.GalleryEntry:
    if problem.entry is None or problem.entry.id not in ids:
        raise ConfigError(f"This check needs one of the gallery entries {', '.join(ids)}.")
    return problem.entry


def _emit_samples(config: RunConfig, levels: List[SampleSet], certificate: Optional[certify.Certificate] = None):
    if not config.emit_plots:
        return
    directory = Path(config.emit_plots)
    for level in levels:
        path = directory / f"samples_level{int(level.level[0]) if len(level) else 0}.csv"
        level.to_csv(path)
        logger.info(messages.wrote_output(path))
    if certificate is not None and certificate.witnesses:
        path = directory / "witnesses.csv"
        write_csv(path, ["x", "y", "u", "v", "value", "note"], certificate.witness_rows())
        logger.info(messages.wrote_output(path))


# endregion

### COMMANDS ###
# region
def _exit_code(verdict: Verdict) -> int:
    return EXIT_FAIL if verdict == Verdict.FAIL else EXIT_PASS


def cmd_classify(config: RunConfig) -> Tuple[dict, int]:
    problem = load_problem(config)
    report = classify_point(problem.field, problem.point, config.tolerances, config.seed)
    logger.info(messages.type_detected(report.point, report.c_p))
    return report.to_dict(), _exit_code(report.pseudoconvex)


def _certificate(config: RunConfig, problem: Problem) -> certify.Certificate:
    rho, tol, condition = problem.field, config.tolerances, config.condition
    ratio_checks = {
        "psh-boundary": certify.cond_psh_boundary,
        "normal": certify.cond_normal,
        "normal-onesided": certify.cond_normal_onesided,
        "sesqui": certify.cond_sesqui,
        "real-coords": certify.cond_real_coords,
    }
    if condition in ratio_checks:
        levels = _levels(config, problem)
        certificate = ratio_checks[condition](rho, levels, tol.lambda_min, tol)
        if condition == "psh-boundary" and certificate.passed:
            certificate.details["required_C"] = certify.required_C(rho, levels, tol=tol.psd_tol).to_dict()
        _emit_samples(config, levels, certificate)
        return certificate
    if condition == "psd":
        samples = _boundary(config, problem)
        certificate = certify.psd_on_samples(rho, samples, tolerances=tol)
        _emit_samples(config, [samples], certificate)
        return certificate
    if condition == "psh-open":
        levels = _levels(config, problem)
        return certify.psh_open_scan(rho, _mixed_levels(rho, levels), tolerances=tol)
    if condition == "basic-estimate":
        levels = _levels(config, problem)
        return certify.basic_estimate_C(rho, _mixed_levels(rho, levels), tol).as_certificate()
    if condition == "hx-hy":
        if not config.h:
            raise ConfigError("The hx-hy check needs a multiplier --h.")
        levels = _levels(config, problem)
        return certify.check_hx_hy(rho, parse_field(config.h), levels, tol.lambda_min, tol)
    if condition == "type6":
        return _type6_certificate(config, problem)
    if condition == "df":
        interior = _interior(rho, _boundary(config, problem), config.exterior)
        if config.K is not None:
            return certify.df_check(rho, config.K, config.eta, interior, config.exterior, config.mu, tol)
        if config.exterior:
            return certify.df_check(rho, 0.0, config.eta, interior, True, config.mu, tol)
        K, certificate = certify.select_df_constant(rho, config.eta, interior, tolerances=tol)
        certificate.details["selected_K"] = K
        return certificate
    if condition == "levi-bound":
        entry = _require_entry(problem, "omega_local", "omega_global")
        return gallery.levi_lower_bound_check(entry.params["k"], _boundary(config, problem), global_domain=entry.id == "omega_global")
    if condition == "global-bounds":
        entry = _require_entry(problem, "omega_global")
        return gallery.global_bounds_check(entry.params["k"], _boundary(config, problem))
    if condition == "global-psc":
        entry = _require_entry(problem, "omega_global")
        return gallery.global_psc_check(entry.params["k"], _boundary(config, problem))
    raise ConfigError(f"Unknown condition '{condition}'.")


def _type6_certificate(config: RunConfig, problem: Problem) -> certify.Certificate:
    tol = 1e-10
    result = certify.type6_normal_vanish(problem.field, problem.point, tol, config.tolerances, config.seed)
    applicable = result != certify.NOT_APPLICABLE
    if not applicable:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = Verdict.PASS if result else Verdict.FAIL
    value = float(normal_derivative_levi(problem.field, problem.point))
    witnesses = [certify.Witness(problem.point, value, "nu H_r(L, L) does not vanish")] if verdict == Verdict.FAIL else []
    return certify.Certificate(
        certify.Condition.TYPE6_NORMAL,
        verdict,
        witnesses=witnesses,
        tolerances={"tol": tol},
        details={"nu_lambda": value, "applicable": applicable},
    )


def cmd_certify(config: RunConfig) -> Tuple[dict, int]:
    problem = load_problem(config)
    outcome = {}
    with AnnotatedTimer(logger, lambda t: messages.certificate_result(config.condition, outcome.get("verdict", "error"), t)):
        certificate = _certificate(config, problem)
        outcome["verdict"] = certificate.verdict.value
    return certificate.to_dict(), _exit_code(certificate.verdict)


def _write_field(config: RunConfig, field: ScalarField):
    if config.field_out:
        write_text(Path(config.field_out), to_json(field_to_json(field)))
        logger.info(messages.wrote_output(config.field_out))


def _globalize(
    r: ScalarField,
    box,
    levels: List[SampleSet],
    tol: defaults.Tolerances,
    C: Optional[float] = None,
    D: Optional[float] = None,
) -> Tuple[Optional[ScalarField], dict, List[certify.Certificate]]:
    """globalize_quadratic with C from basic_estimate_C and D from the box when not
    given, checked by psh_open_scan on the mixed samples inside U_K."""
    mixed = _mixed_levels(r, levels)
    estimate = None
    if C is None:
        estimate = certify.basic_estimate_C(r, mixed, tol)
        if estimate.value is None or estimate.verdict == Verdict.FAIL:
            return None, {"basic_estimate": estimate.to_dict()}, [estimate.as_certificate()]
        C = estimate.value
    if D is None:
        D = float(np.sqrt(sum(max(lo * lo, hi * hi) for lo, hi in box)))
    rho, K1, K2 = globalize_quadratic(r, C, D)
    points = np.concatenate(mixed)
    inside = uk_mask(r, K1, K2, points)
    checks = [certify.psh_open_scan(rho, points[inside], tolerances=tol)]
    result = {"C": C, "D": D, "K1": float(K1), "K2": float(K2), "shrunken_samples": int(inside.sum())}
    if estimate is not None:
        result["basic_estimate"] = estimate.to_dict()
        if estimate.verdict != Verdict.PASS:
            checks.insert(0, estimate.as_certificate())
    return rho, result, checks


def _construct(config: RunConfig, problem: Problem) -> Tuple[dict, List[certify.Certificate]]:
    r, tol, recipe = problem.field, config.tolerances, config.recipe
    if recipe in ("strict4", "normal"):
        build = multiplier_strict4 if recipe == "strict4" else multiplier_normal
        multiplier = build(r, problem.box, tol=tol.tol_zero)
        rho = graft(r, multiplier)
        _write_field(config, multiplier.h)
        levels = _levels(config, problem)
        if recipe == "strict4":
            checks = [certify.strict4_residual(r, multiplier, levels, tol.lambda_min, tol)]
        else:
            checks = list(certify.normal_residuals(r, multiplier, levels, tol.lambda_min, tol))
            checks.append(certify.cond_normal(rho, levels, tol.lambda_min, tol))
        checks.append(certify.cond_psh_boundary(rho, levels, tol.lambda_min, tol))
        return {"multiplier": multiplier.to_dict()}, checks
    if recipe == "bend":
        samples = _boundary(config, problem)
        if config.C is not None:
            C = config.C
        else:
            needed = certify.required_C(r, samples, tol=tol.psd_tol)
            if needed.value is None:
                return {"required_C": needed.to_dict()}, [
                    certify.Certificate(certify.Condition.PSH_BOUNDARY, Verdict.FAIL, witnesses=[needed.witness])
                ]
            C = needed.value
        rho = bend(r, C)
        _write_field(config, rho)
        return {"C": C, "field": field_summary(rho)}, [certify.psd_on_samples(rho, samples, tolerances=tol)]
    if recipe == "globalize":
        rho, result, checks = _globalize(r, problem.box, _levels(config, problem), tol, config.C, config.D)
        if rho is not None:
            _write_field(config, rho)
        return result, checks
    if recipe == "cutoff":
        if not config.h:
            raise ConfigError("The cutoff recipe needs a multiplier --h.")
        rho = cutoff_patch(r, config.h, config.inner, config.outer, problem.point)
        _write_field(config, rho)
        samples = _boundary(config, problem, rho)
        near = np.linalg.norm(samples.points - np.asarray(problem.point), axis=1) <= config.inner
        check = certify.psd_on_samples(rho, samples.subset(near) if near.any() else samples, tolerances=tol)
        return {"field": field_summary(rho), "inner": config.inner, "outer": config.outer}, [check]
    if recipe == "df":
        interior = _interior(r, _boundary(config, problem))
        if config.K is None:
            K, check = certify.select_df_constant(r, config.eta, interior, tolerances=tol)
        else:
            K, check = config.K, certify.df_check(r, config.K, config.eta, interior, tolerances=tol)
        if K is not None:
            _write_field(config, df_bump(r, K, config.eta))
        return {"K": K, "eta": config.eta}, [check]
    if recipe == "sesqui":
        rho = normalize_gradient(r)
        _write_field(config, rho)
        levels = _levels(config, problem)
        return {"field": field_summary(rho)}, [
            certify.cond_sesqui(r, levels, tol.lambda_min, tol),
            certify.cond_psh_boundary(rho, levels, tol.lambda_min, tol),
            certify.cond_normal_onesided(rho, levels, tol.lambda_min, tol),
        ]
    raise ConfigError(f"Unknown recipe '{recipe}'.")


def cmd_construct(config: RunConfig) -> Tuple[dict, int]:
    problem = load_problem(config)
    result, checks = _construct(config, problem)
    verdicts = [c.verdict for c in checks]
    code = EXIT_FAIL if Verdict.FAIL in verdicts else EXIT_PASS
    return {"recipe": config.recipe, "result": result, "certificates": [c.to_dict() for c in checks]}, code


# endregion

### SUITE ###
# region
def _expect(name: str, passed: bool, **details) -> dict:
    return {"name": name, "verdict": (Verdict.PASS if passed else Verdict.FAIL).value, "details": details}


def _suite_checks(config: RunConfig) -> List[Tuple[str, Callable[[], dict]]]:
    k, tol, n, seed = config.k, config.tolerances, config.samples, config.seed

    def sets(entry, field=None, levels=config.levels):
        return refine_samples(field or entry.field, entry.box, n, levels, entry.loci, seed, tol=tol.tol_bdry)

    def omega_type():
        entry = gallery.make("omega_local", {"k": k})
        report = classify_point(entry.field, entry.point, tol, seed)
        return _expect("omega_local_type", report.c_p == 2 * k, c_p=report.c_p, expected=2 * k)

    def omega_levi_bound():
        entry = gallery.make("omega_local", {"k": k})
        certificate = gallery.levi_lower_bound_check(k, sample_boundary(entry.field, entry.box, n, seed=seed))
        return _expect("omega_local_levi_bound", certificate.passed, certificate=certificate.to_dict())

    def omega_no_psh_boundary():
        entry = gallery.make("omega_local", {"k": k})
        depth = max(config.levels, OBSTRUCTION_LEVELS)
        levels = sets(entry, levels=depth)
        verdicts = {}
        for h in gallery.candidate_multipliers(config.candidates, seed):
            rho = graft(entry.field, h)
            verdicts[h] = certify.cond_psh_boundary(rho, levels, tol.lambda_min, tol).verdict.value
        passed = all(v == Verdict.FAIL.value for v in verdicts.values())
        return _expect("omega_local_no_psh_boundary", passed, verdicts=verdicts, levels=depth)

    def loop_obstruction():
        rows = gallery.obstruction_scaling(k, SUITE_SIGMAS)
        exact = gallery.loop_integral("x*y", k, 0.1)
        passed = all(abs(row["ratio"] - 1) <= 1e-6 for row in rows) and abs(exact) <= 1e-10
        return _expect("loop_obstruction", passed, rows=rows, exact_form=exact)

    def global_domain():
        entry = gallery.make("omega_global", {"k": k})
        samples = sample_boundary(entry.field, entry.box, n, seed=seed)
        bounds = gallery.global_bounds_check(k, samples)
        psc = gallery.global_psc_check(k, samples)
        return _expect("omega_global", bounds.passed and psc.passed, bounds=bounds.to_dict(), psc=psc.to_dict())

    def tanlog_levi():
        entry = gallery.make("tanlog")
        samples = sample_boundary(entry.field, entry.box, n, seed=seed)
        error = np.abs(levi_values(entry.field, samples.points, "raw") - gallery.tanlog_levi(samples.points))
        return _expect("tanlog_levi_closed_form", float(error.max()) <= 1e-9, max_error=float(error.max()))

    def tanlog_grafts():
        entry = gallery.make("tanlog")
        verdicts = {}
        for h in ("y + u", "y + ln(cos(x))"):
            rho = graft(entry.field, h)
            verdicts[h] = certify.cond_psh_boundary(rho, sets(entry), tol.lambda_min, tol).verdict.value
        return _expect("tanlog_grafts", all(v == Verdict.PASS.value for v in verdicts.values()), verdicts=verdicts)

    def weak_direction():
        s = 1e-2
        value = gallery.weak_direction_value(s)
        return _expect("tanlog_weak_direction", abs(value + s / 2) <= 0.1 * s / 2, value=value, s=s)

    def model_thresholds():
        rows, passed = [], True
        for text in MODEL_PARAMETERS:
            entry = gallery.make(*defaults.eval_gallery_spec(f"model:a={text}"))
            report = classify_point(entry.field, entry.point, tol, seed)
            a = float(entry.params["a"])
            expected = {"pseudoconvex": a <= 4 / 3, "strict4": a < 4 / 3, "kohn": a < 1}
            observed = {
                "pseudoconvex": report.pseudoconvex == Verdict.PASS,
                "strict4": report.strict4.value == "Strict",
                "kohn": bool(report.kohn4),
            }
            passed &= expected == observed
            rows.append({"a": text, "expected": expected, "observed": observed})
        return _expect("model_thresholds", passed, rows=rows)

    def type6():
        values = {}
        for m in (3, 4):
            entry = gallery.make("power", {"m": m})
            values[m] = certify.type6_normal_vanish(entry.field, entry.point, tolerances=tol, seed=seed)
        return _expect("type6_normal_vanish", all(v is True for v in values.values()), values=values)

    def df():
        entry = gallery.make("power", {"m": 3})
        interior = _interior(entry.field, sample_boundary(entry.field, entry.box, n, seed=seed))
        K, certificate = certify.select_df_constant(entry.field, 0.9, interior, tolerances=tol)
        return _expect("df_bump", K is not None, K=K, certificate=certificate.to_dict())

    def sesqui():
        verdicts = {}
        for source in ("u + x^2 + y^2", "u + absz2"):
            r = parse_field(source)
            levels = refine_samples(r, defaults.fallback_box, n, config.levels, None, seed, tol=tol.tol_bdry)
            verdicts[source] = certify.cond_sesqui(r, levels, tol.lambda_min, tol).verdict.value
        entry = gallery.make("tanlog")
        verdicts["tanlog"] = certify.cond_sesqui(entry.field, sets(entry), tol.lambda_min, tol).verdict.value
        passed = verdicts["tanlog"] == Verdict.FAIL.value and all(
            verdicts[s] == Verdict.PASS.value for s in ("u + x^2 + y^2", "u + absz2")
        )
        return _expect("sesquiconvexity", passed, verdicts=verdicts)

    def strict4_pipeline():
        rows, passed = {}, True
        for spec in STRICT4_PIPELINE_ENTRIES:
            entry = gallery.make(*defaults.eval_gallery_spec(spec))
            multiplier = multiplier_strict4(entry.field, entry.box, tol=tol.tol_zero)
            levels = sets(entry)
            residual = certify.strict4_residual(entry.field, multiplier, levels, tol.lambda_min, tol)
            rho = graft(entry.field, multiplier)
            needed = certify.required_C(rho, levels, tol=tol.psd_tol)
            row = {"residual": residual.to_dict(), "required_C": needed.to_dict()}
            ok = residual.verdict != Verdict.FAIL and needed.value is not None
            if needed.value is not None:
                bent = certify.psd_on_samples(bend(rho, needed.value), levels, tolerances=tol)
                row["bent"] = bent.to_dict()
                ok = ok and bent.passed
            rows[spec] = row
            passed = passed and ok
        return _expect("strict4_pipeline", passed, rows=rows)

    def normal_pipeline():
        entry = gallery.make(*defaults.eval_gallery_spec(NORMAL_PIPELINE_ENTRY))
        multiplier = multiplier_normal(entry.field, entry.box, tol=tol.tol_zero)
        rho = graft(entry.field, multiplier)
        levels = sets(entry)
        boundary = certify.cond_psh_boundary(rho, levels, tol.lambda_min, tol)
        normal = certify.cond_normal(rho, levels, tol.lambda_min, tol)
        _, result, checks = _globalize(rho, entry.box, levels, tol)
        passed = boundary.passed and normal.passed and all(c.verdict != Verdict.FAIL for c in checks)
        passed = passed and checks[-1].condition == certify.Condition.PSH_OPEN and checks[-1].passed
        return _expect(
            "normal_pipeline",
            passed,
            psh_boundary=boundary.to_dict(),
            normal=normal.to_dict(),
            globalized=result,
            psh_open=checks[-1].to_dict(),
        )

    return [
        ("omega_local_type", omega_type),
        ("omega_local_levi_bound", omega_levi_bound),
        ("omega_local_no_psh_boundary", omega_no_psh_boundary),
        ("loop_obstruction", loop_obstruction),
        ("omega_global", global_domain),
        ("tanlog_levi_closed_form", tanlog_levi),
        ("tanlog_grafts", tanlog_grafts),
        ("tanlog_weak_direction", weak_direction),
        ("model_thresholds", model_thresholds),
        ("type6_normal_vanish", type6),
        ("df_bump", df),
        ("sesquiconvexity", sesqui),
        ("strict4_pipeline", strict4_pipeline),
        ("normal_pipeline", normal_pipeline),
    ]


def _emit_plots(config: RunConfig):
    directory = Path(config.emit_plots)
    for gallery_id in gallery.GALLERY_IDS:
        entry = gallery.make(gallery_id, {"k": config.k} if gallery_id.startswith("omega") else None)
        path = directory / f"lambda_{gallery_id}.csv"
        write_csv(path, ["x", "v", "lambda"], gallery.lambda_plot_slice(entry))
        logger.info(messages.wrote_output(path))


def cmd_suite(config: RunConfig) -> Tuple[dict, int]:
    results = []
    for name, check in _suite_checks(config):
        start = perf_counter()
        try:
            result = check()
        except PshlabError as error:
            logger.error(messages.operational_error(error))
            result = {"name": name, "verdict": "error", "details": {"error": messages.operational_error(error)}}
        logger.info(messages.suite_check(name, result["verdict"], perf_counter() - start))
        results.append(result)
    if config.emit_plots:
        _emit_plots(config)
    passed = all(r["verdict"] == Verdict.PASS.value for r in results)
    return {"k": config.k, "checks": results, "passed": passed}, EXIT_PASS if passed else EXIT_FAIL


def cmd_gallery(config: RunConfig) -> Tuple[dict, int]:
    return {"entries": gallery.list_entries()}, EXIT_PASS


# endregion

### ENTRY POINT ###
# region
COMMANDS: Dict[str, Callable[[RunConfig], Tuple[dict, int]]] = {
    "classify": cmd_classify,
    "certify": cmd_certify,
    "construct": cmd_construct,
    "suite": cmd_suite,
    "gallery": cmd_gallery,
}


def _common_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    source = common.add_mutually_exclusive_group()
    source.add_argument("--field", help="Defining function in the DSL, e.g. 'u + absz2^2'.")
    source.add_argument("--file", help="A DSL text file or a node table (.json).")
    source.add_argument("--gallery", help="A gallery entry, e.g. 'omega_local:k=3' or 'model:a=4/3'.")
    common.add_argument("--multiplier", help="Multiplier h (DSL), the field is replaced by r exp(h).")
    common.add_argument("--h", help="Multiplier for the hx-hy check and the cutoff recipe (DSL).")
    common.add_argument("--point", help="Boundary point 'x,y,u,v'.")
    common.add_argument("--box", help="Sampling box 'xmin,xmax,ymin,ymax,umin,umax,vmin,vmax'.")
    common.add_argument("--samples", type=int, default=defaults.samples, help="Samples per level.")
    common.add_argument("--levels", type=int, default=defaults.levels, help="Refinement levels.")
    common.add_argument("--tol-zero", type=float, help="Relative zero threshold of derivative values.")
    common.add_argument("--tol-bdry", type=float, help="Boundary tolerance |r| <= tol.")
    common.add_argument("--lambda-min", type=float, help="Denominators below are excluded from ratios.")
    common.add_argument("--psd-tol", type=float, help="Relative eigenvalue tolerance.")
    common.add_argument("--seed", type=int, default=defaults.seed)
    common.add_argument("--C", type=float, help="Constant of bend or globalize.")
    common.add_argument("--D", type=float, help="Bound on |(z, w)| for globalize.")
    common.add_argument("--K", type=float, help="Constant of the DF bump.")
    common.add_argument("--eta", type=float, default=0.9, help="Exponent of the DF bump.")
    common.add_argument("--mu", type=float, default=2.0, help="Exponent of the exterior DF bump.")
    common.add_argument("--exterior", action="store_true", help="Check the exterior DF bump.")
    common.add_argument("--inner", type=float, default=0.05, help="Inner radius of the cutoff.")
    common.add_argument("--outer", type=float, default=0.1, help="Outer radius of the cutoff.")
    common.add_argument("--k", type=int, default=3, help="Parameter k of the suite.")
    common.add_argument("--candidates", type=int, default=20, help="Candidate multipliers of the suite.")
    common.add_argument("--out", help="Also write the report to this file.")
    common.add_argument("--field-out", help="Write the constructed field (node table JSON).")
    common.add_argument("--emit-plots", help="Directory for CSV plot data.")
    common.add_argument("-v", "--verbose", action="count", default=0, help="-v info, -vv debug logging.")
    return common


def build_parser() -> argparse.ArgumentParser:
    common = _common_parser()
    parser = argparse.ArgumentParser(prog="pshlab", description="Levi geometry of domains in C^2.")
    commands = parser.add_subparsers(dest="command", required=True)
    commands.add_parser("classify", parents=[common], help="Classify a boundary point.")
    certify_parser = commands.add_parser("certify", parents=[common], help="Run a sampled certificate.")
    certify_parser.add_argument("condition", choices=CONDITIONS)
    construct_parser = commands.add_parser("construct", parents=[common], help="Build a defining function.")
    construct_parser.add_argument("recipe", choices=RECIPES)
    commands.add_parser("suite", parents=[common], help="Verify the gallery claims.")
    gallery_parser = commands.add_parser("gallery", parents=[common], help="Gallery entries.")
    gallery_parser.add_argument("action", choices=("list",))
    return parser


def _emit(report: dict, out: Optional[str]):
    text = to_json({"schema": SCHEMA, **report})
    sys.stdout.write(text)
    if out:
        write_text(Path(out), text)
        logger.info(messages.wrote_output(out))


def main(argv: Optional[List[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as usage:
        return EXIT_OPERATIONAL if usage.code else EXIT_PASS
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    create_logger("pshlab", [logging.StreamHandler(sys.stderr)], level)
    try:
        config = RunConfig.from_args(args)
        result, code = COMMANDS[config.command](config)
        _emit({"command": config.command, "config": config.as_dict(), "result": result}, config.out)
        return code
    except MathematicalFailure as failure:
        logger.error(messages.operational_error(failure))
        _emit(
            {
                "command": args.command,
                "failure": {
                    "type": type(failure).__name__,
                    "message": str(failure),
                    "witness": {"point": failure.point, "value": failure.value},
                },
            },
            args.out,
        )
        return EXIT_FAIL
    except PshlabError as error:
        logger.error(messages.operational_error(error))
        _emit({"command": args.command, "error": {"type": type(error).__name__, "message": str(error)}}, args.out)
        return EXIT_OPERATIONAL


# endregion
