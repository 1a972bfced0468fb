"""
This module contains the default tolerances and limits and functions for evaluating
user supplied arguments (environment variables, gallery specifications, points
and boxes).
"""

import os
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Dict, Tuple, Union

from .errors import ConfigError

# the maximal total order of derivatives the engine builds unless configured otherwise
max_order = 12

# version of the fixed direction grid used for empirical constants
direction_grid_version = 1
direction_grid_size = 64

# default sample counts
samples = 400
levels = 2
seed = 0

# for some gallery entries the default box around the origin
default_boxes = {
    "omega_local": ((-0.1, 0.1), (-0.1, 0.1), (-0.05, 0.05), (-0.1, 0.1)),
    "omega_global": ((-0.95, 0.95), (-0.95, 0.95), (-1.1, 0.1), (-0.6, 0.6)),
    "tanlog": ((-1.0, 1.0), (-1.0, 1.0), (-0.5, 0.5), (-1.0, 1.0)),
    "model": ((-0.2, 0.2), (-0.2, 0.2), (-0.05, 0.05), (-0.2, 0.2)),
    "tube": ((-0.2, 0.2), (-0.2, 0.2), (-0.05, 0.05), (-0.2, 0.2)),
    "power": ((-0.2, 0.2), (-0.2, 0.2), (-0.05, 0.05), (-0.2, 0.2)),
}
fallback_box = ((-0.2, 0.2), (-0.2, 0.2), (-0.05, 0.05), (-0.2, 0.2))


@dataclass(frozen=True)
class Tolerances:
    """The numerical thresholds used by classification and certification.

    Attributes:
        tol_zero: Relative threshold below which a derivative value counts as zero.
        tol_bdry: Absolute bound on |r| for a point to count as a boundary point.
        lambda_min: Denominators below this value are excluded from ratio statistics.
        psd_tol: Relative eigenvalue tolerance, eigenvalues >= -psd_tol(1+|M|) pass.
        growth_cap: Allowed growth factor of a ratio constant between levels.
        ratio_floor: Ratio constants below this value count as zero.
        max_order: Maximal derivative order.
        newton_max_iter: Iteration limit of the boundary projection.
        min_level_samples: Minimal usable samples per level for a conclusive ratio test.
    """

    tol_zero: float = 1e-7
    tol_bdry: float = 1e-10
    lambda_min: float = 1e-12
    psd_tol: float = 1e-9
    growth_cap: float = 2.0
    ratio_floor: float = 1e-9
    max_order: int = max_order
    newton_max_iter: int = 50
    min_level_samples: int = 8

    def __post_init__(self):
        for name in ("tol_zero", "tol_bdry", "lambda_min", "psd_tol", "growth_cap"):
            if not getattr(self, name) > 0:
                raise ConfigError(f"The tolerance '{name}' must be positive.")
        if self.max_order < 2:
            raise ConfigError("The maximal derivative order must be at least 2.")

    def updated(self, **changes) -> "Tolerances":
        """Returns a copy with the given (not None) attributes replaced."""
        return replace(self, **{k: v for k, v in changes.items() if v is not None})

    def as_dict(self) -> Dict[str, float]:
        return {
            "tol_zero": self.tol_zero,
            "tol_bdry": self.tol_bdry,
            "lambda_min": self.lambda_min,
            "psd_tol": self.psd_tol,
            "growth_cap": self.growth_cap,
            "max_order": self.max_order,
        }


TOLERANCES = Tolerances()


def eval_threads(value: Union[str, int, None] = None) -> int:
    """Evaluates the number of worker threads.

    If no value is passed the environment variable PSHLAB_THREADS is used.
    Without both a single thread is used.

    Args:
        value (Union[str, int, None], optional): Explicit thread count. Defaults to None.

    Returns:
        int: The number of threads (at least 1).
    """
    if value is None:
        value = os.environ.get("PSHLAB_THREADS", "1")
    try:
        threads = int(value)
    except ValueError as error:
        raise ConfigError(f"Invalid thread count '{value}'.") from error
    if threads < 1:
        raise ConfigError(f"Invalid thread count '{value}'.")
    return threads


def _eval_number(text: str) -> Union[int, Fraction, float, str]:
    text = text.strip()
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return Fraction(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def eval_gallery_spec(value: str) -> Tuple[str, Dict[str, Union[int, Fraction, float, str]]]:
    """Splits a gallery specification like "omega_local:k=3" or "model:a=4/3".

    Numeric parameter values are converted to int, Fraction or float (in this
    order of preference), everything else stays a string (e.g. the DSL text of
    the tube entry "tube:f=x^4").

    Args:
        value (str): The specification.

    Returns:
        Tuple[str, Dict]: The gallery id and its parameters.
    """
    gallery_id, _, rest = value.partition(":")
    params = {}
    if rest:
        for item in rest.split(","):
            name, sep, text = item.partition("=")
            if not sep or not name.strip():
                raise ConfigError(f"Invalid gallery parameter '{item}' in '{value}'.")
            params[name.strip()] = _eval_number(text)
    return gallery_id.strip(), params


def eval_point(value: str) -> Tuple[float, float, float, float]:
    """Parses "x,y,u,v" into a point."""
    parts = [p for p in value.replace(" ", "").split(",") if p]
    if len(parts) != 4:
        raise ConfigError(f"A point needs four coordinates, got '{value}'.")
    try:
        return tuple(float(Fraction(p)) for p in parts)
    except ValueError as error:
        raise ConfigError(f"Invalid point '{value}'.") from error


def eval_box(value: Union[str, None], gallery_id: str = None):
    """Parses "xmin,xmax,ymin,ymax,umin,umax,vmin,vmax" into four intervals.

    If no value is given, the default box of the gallery entry (or the fallback box)
    is returned.
    """
    if value is None:
        return default_boxes.get(gallery_id, fallback_box)
    parts = [p for p in value.replace(" ", "").split(",") if p]
    if len(parts) != 8:
        raise ConfigError(f"A box needs eight bounds, got '{value}'.")
    try:
        bounds = [float(Fraction(p)) for p in parts]
    except ValueError as error:
        raise ConfigError(f"Invalid box '{value}'.") from error
    box = tuple((bounds[2 * i], bounds[2 * i + 1]) for i in range(4))
    if any(lo > hi for lo, hi in box):
        raise ConfigError(f"Invalid box '{value}': lower bound above upper bound.")
    return box
