"""Canonical frames, Hessian forms and the Levi form of a defining function.

For a defining function r with gradient (r_x, r_y, r_u, r_v) the frame is

    L = (2 / |dr|) (r_w d/dz - r_z d/dw)      (tangential, type (1, 0))
    N = (2 / |dr|) (conj(r_z) d/dz + conj(r_w) d/dw)

with L = (X + iY) / 2 and N = (nu + iT) / 2, where nu = grad r / |dr| is the
outward unit normal. Coefficients of complex vectors refer to (d/dz, d/dw), real
vectors refer to (d/dx, d/dy, d/du, d/dv).

There are two evaluation paths. :class:`FrameFields` builds the frame and the
Levi field symbolically and applies the frame fields to it by differentiating
the graph. Constructions, the type 4 values and the normal derivative of the
Levi form use this path. :class:`LeviJets` runs the graph of r in the Taylor jet
algebra at a batch of points; type detection (words up to max_order - 2) and the
multiplier residuals use it.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from . import defaults
from .errors import DegenerateGradientError, NormalizationError, OffBoundaryError
from .expr import (
    ComplexField,
    HoloMap,
    ScalarField,
    as_points,
    compose_holo,
    const_field,
    evaluate,
    sqrt,
)
from .taylor import Jet, directional, jet_function, taylor

logger = logging.getLogger(__name__)

NORMALIZATIONS = ("unit", "raw")
FRAME_DIRECTIONS = ("X", "Y", "T", "nu")

ComplexVector = Tuple[ComplexField, ComplexField]


def _squeeze(value, single: bool):
    if not single:
        return value
    if isinstance(value, np.ndarray):
        item = value[0]
        return item.item() if np.ndim(item) == 0 else item
    return value


def _check_normalization(normalization: str):
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"Unknown normalization '{normalization}', use one of {NORMALIZATIONS}.")


### COMPLEX SECOND DERIVATIVES ###
# region
def complex_second_derivatives(hessian):
    """Splits real Hessians (..., 4, 4) into the complex Hessian and quadratic parts.

    Works for arrays and for nested lists of jets.

    Returns:
        Tuple: (H, Q), each a 2x2 nested list with H[j][k] = d^2 f / dz_j d conj(z_k)
        and Q[j][k] = d^2 f / dz_j dz_k.
    """
    h = hessian
    f_zzb = (h[0][0] + h[1][1]) * 0.25
    f_wwb = (h[2][2] + h[3][3]) * 0.25
    f_zwb = (h[0][2] + h[1][3]) * 0.25 + (h[0][3] - h[1][2]) * 0.25j
    f_wzb = (h[0][2] + h[1][3]) * 0.25 - (h[0][3] - h[1][2]) * 0.25j
    f_zz = (h[0][0] - h[1][1]) * 0.25 - h[0][1] * 0.5j
    f_ww = (h[2][2] - h[3][3]) * 0.25 - h[2][3] * 0.5j
    f_zw = (h[0][2] - h[1][3]) * 0.25 - (h[0][3] + h[1][2]) * 0.25j
    return [[f_zzb, f_zwb], [f_wzb, f_wwb]], [[f_zz, f_zw], [f_zw, f_ww]]


def _hessian_arrays(f: ScalarField, pts: np.ndarray):
    real = taylor(f, pts, 2).hessian()
    split = [[real[:, i, j] for j in range(4)] for i in range(4)]
    hc, qc = complex_second_derivatives(split)
    return real, np.stack([np.stack(row, axis=-1) for row in hc], axis=-2), np.stack(
        [np.stack(row, axis=-1) for row in qc], axis=-2
    )


def _vectors(vector, n: int, dtype) -> np.ndarray:
    array = np.asarray(vector, dtype=dtype)
    return np.broadcast_to(array, (n, array.shape[-1]))


def complex_hessian(f: ScalarField, p, V, W) -> Union[complex, np.ndarray]:
    """H_f(V, W) = sum f_{z_j conj(z_k)} V^j conj(W^k), sesquilinear."""
    pts, single = as_points(p)
    _, hc, _ = _hessian_arrays(f, pts)
    v, w = _vectors(V, len(pts), complex), _vectors(W, len(pts), complex)
    value = np.einsum("nj,njk,nk->n", v, hc, np.conj(w))
    return _squeeze(value, single)


def complex_quadratic(f: ScalarField, p, V, W) -> Union[complex, np.ndarray]:
    """Q_f(V, W) = sum f_{z_j z_k} V^j W^k, bilinear."""
    pts, single = as_points(p)
    _, _, qc = _hessian_arrays(f, pts)
    v, w = _vectors(V, len(pts), complex), _vectors(W, len(pts), complex)
    return _squeeze(np.einsum("nj,njk,nk->n", v, qc, w), single)


def real_hessian(f: ScalarField, p, V, W) -> Union[float, np.ndarray]:
    pts, single = as_points(p)
    real = taylor(f, pts, 2).hessian()
    v, w = _vectors(V, len(pts), float), _vectors(W, len(pts), float)
    return _squeeze(np.einsum("nj,njk,nk->n", v, real, w), single)


# endregion

### FRAMES AT POINTS ###
# region
@dataclass(frozen=True)
class FrameAt:
    """The frame evaluated at one point or at a batch of points.

    Attributes:
        L: Coefficients of L w.r.t. (d/dz, d/dw).
        N: Coefficients of N w.r.t. (d/dz, d/dw).
        X, Y, T, nu: Real 4-vectors.
        norm_dr: |dr|.
        norm_del_r: |del r| = |dr| / sqrt(2).
    """

    L: np.ndarray
    N: np.ndarray
    X: np.ndarray
    Y: np.ndarray
    T: np.ndarray
    nu: np.ndarray
    norm_dr: Union[float, np.ndarray]
    norm_del_r: Union[float, np.ndarray]

    def basis(self) -> np.ndarray:
        """The rows X, Y, T, nu, shape (..., 4, 4)."""
        return np.stack([self.X, self.Y, self.T, self.nu], axis=-2)

    def as_dict(self) -> dict:
        return {
            "L": self.L,
            "N": self.N,
            "X": self.X,
            "Y": self.Y,
            "T": self.T,
            "nu": self.nu,
            "norm_dr": self.norm_dr,
            "norm_del_r": self.norm_del_r,
        }


def _frame_from_gradient(g: np.ndarray) -> Dict[str, np.ndarray]:
    rx, ry, ru, rv = g[:, 0], g[:, 1], g[:, 2], g[:, 3]
    norm = np.sqrt(rx**2 + ry**2 + ru**2 + rv**2)
    a = (ru - 1j * rv) / norm
    b = -(rx - 1j * ry) / norm
    c = (rx + 1j * ry) / norm
    d = (ru + 1j * rv) / norm
    return {
        "L": np.stack([a, b], axis=1),
        "N": np.stack([c, d], axis=1),
        "X": np.stack([ru, -rv, -rx, ry], axis=1) / norm[:, None],
        "Y": np.stack([-rv, -ru, ry, rx], axis=1) / norm[:, None],
        "T": np.stack([ry, -rx, rv, -ru], axis=1) / norm[:, None],
        "nu": g / norm[:, None],
        "norm_dr": norm,
        "norm_del_r": norm / np.sqrt(2.0),
    }


def gradient_at(r: ScalarField, pts: np.ndarray, check: bool = True) -> np.ndarray:
    jet = taylor(r, pts, 1)
    grad = np.stack([jet.partial(e) for e in np.eye(4, dtype=int)], axis=1)
    if check:
        degenerate = np.linalg.norm(grad, axis=1) == 0
        if np.any(degenerate):
            raise DegenerateGradientError(pts[int(np.flatnonzero(degenerate)[0])])
    return grad


def frame_at(r: ScalarField, p) -> FrameAt:
    """Evaluates the frame of r at a point (4,) or at the rows of (n, 4).

    Raises:
        DegenerateGradientError: If dr vanishes at one of the points.
    """
    pts, single = as_points(p)
    parts = _frame_from_gradient(gradient_at(r, pts))
    return FrameAt(**{k: _squeeze(v, single) for k, v in parts.items()})


def levi_values(r: ScalarField, points, normalization: str = "unit", frame_of: Optional[ScalarField] = None) -> np.ndarray:
    """The ambient Levi field H_r(L, L) at points, without a boundary check."""
    _check_normalization(normalization)
    pts, _ = as_points(points)
    reference = r if frame_of is None else frame_of
    parts = _frame_from_gradient(gradient_at(reference, pts))
    _, hc, _ = _hessian_arrays(r, pts)
    L = parts["L"]
    value = np.einsum("nj,njk,nk->n", L, hc, np.conj(L)).real
    if normalization == "raw":
        value = value * parts["norm_dr"] ** 2 / 4
    return value


def check_on_boundary(r: ScalarField, pts: np.ndarray, tol: float):
    values = np.asarray(evaluate(r, pts))
    off = np.abs(values) > tol
    if np.any(off):
        index = int(np.flatnonzero(off)[0])
        raise OffBoundaryError(pts[index], values[index], tol)


def levi(r: ScalarField, p, normalization: str = "unit", tol_bdry: Optional[float] = None):
    """The Levi form lambda = H_r(L, L) at boundary points.

    Args:
        r (ScalarField): The defining function.
        p: A point (4,) or points (n, 4) on {r = 0}.
        normalization (str, optional): "unit" uses the canonical field L_r, "raw" the
            unnormalized L = r_w d/dz - r_z d/dw. Defaults to "unit".
        tol_bdry (float, optional): Boundary tolerance. Defaults to the configured one.

    Raises:
        OffBoundaryError: If |r(p)| exceeds the tolerance.
        DegenerateGradientError: If dr(p) = 0.
    """
    pts, single = as_points(p)
    check_on_boundary(r, pts, defaults.TOLERANCES.tol_bdry if tol_bdry is None else tol_bdry)
    return _squeeze(levi_values(r, pts, normalization), single)


@dataclass(frozen=True)
class HermitianMatrix2:
    """The matrix of H_rho in the basis (L, N), batched.

    Attributes:
        h11: H(L, L), real.
        h12: H(L, N), complex; H(N, L) is its conjugate.
        h22: H(N, N), real.
    """

    h11: np.ndarray
    h12: np.ndarray
    h22: np.ndarray

    def matrix(self) -> np.ndarray:
        h11, h12, h22 = (np.atleast_1d(a) for a in (self.h11, self.h12, self.h22))
        return np.stack(
            [np.stack([h11 + 0j, h12], axis=-1), np.stack([np.conj(h12), h22 + 0j], axis=-1)],
            axis=-2,
        )

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix())

    def norm(self) -> np.ndarray:
        return np.abs(self.eigenvalues()).max(axis=-1)

    def determinant(self) -> np.ndarray:
        return np.atleast_1d(self.h11 * self.h22 - np.abs(self.h12) ** 2)

    def trace(self) -> np.ndarray:
        return np.atleast_1d(self.h11 + self.h22)

    def __add__(self, other: "HermitianMatrix2") -> "HermitianMatrix2":
        return HermitianMatrix2(self.h11 + other.h11, self.h12 + other.h12, self.h22 + other.h22)

    def __sub__(self, other: "HermitianMatrix2") -> "HermitianMatrix2":
        return HermitianMatrix2(self.h11 - other.h11, self.h12 - other.h12, self.h22 - other.h22)


def hessian_matrix_LN(rho: ScalarField, p, reference: Optional[ScalarField] = None) -> HermitianMatrix2:
    """The matrix of H_rho in the frame (L, N) of the reference function (default rho)."""
    pts, single = as_points(p)
    parts = _frame_from_gradient(gradient_at(rho if reference is None else reference, pts))
    _, hc, _ = _hessian_arrays(rho, pts)
    L, N = parts["L"], parts["N"]
    h11 = np.einsum("nj,njk,nk->n", L, hc, np.conj(L)).real
    h12 = np.einsum("nj,njk,nk->n", L, hc, np.conj(N))
    h22 = np.einsum("nj,njk,nk->n", N, hc, np.conj(N)).real
    return HermitianMatrix2(*(_squeeze(a, single) for a in (h11, h12, h22)))


@dataclass(frozen=True)
class RealMatrix4:
    """The real Hessian in the frame (X, Y, T, nu), batched (..., 4, 4)."""

    matrix: np.ndarray

    def entry(self, first: str, second: str):
        i, j = FRAME_DIRECTIONS.index(first), FRAME_DIRECTIONS.index(second)
        return self.matrix[..., i, j]


def real_hessian_matrix(rho: ScalarField, p, reference: Optional[ScalarField] = None) -> RealMatrix4:
    pts, single = as_points(p)
    parts = _frame_from_gradient(gradient_at(rho if reference is None else reference, pts))
    real = taylor(rho, pts, 2).hessian()
    basis = np.stack([parts[k] for k in FRAME_DIRECTIONS], axis=1)
    matrix = np.einsum("nai,nij,nbj->nab", basis, real, basis)
    return RealMatrix4(matrix[0] if single else matrix)


def convexity_flags(q: RealMatrix4, tol: float = 1e-9) -> Dict[str, np.ndarray]:
    """Convexity-like flags from the real Hessian in the frame.

    convex: the tangential block (X, Y, T) is positive semi-definite.
    c_convex: the complex tangential block (X, Y) is positive semi-definite.
    pseudoconvex: the trace of the (X, Y) block is non-negative.
    """
    matrix = q.matrix
    if matrix.ndim == 2:
        matrix = matrix[None]
    scale = 1 + np.abs(matrix).max(axis=(-2, -1))

    def psd(block):
        return np.linalg.eigvalsh(block).min(axis=-1) >= -tol * scale

    return {
        "convex": psd(matrix[:, :3, :3]),
        "c_convex": psd(matrix[:, :2, :2]),
        "pseudoconvex": matrix[:, 0, 0] + matrix[:, 1, 1] >= -tol * scale,
    }


# endregion

### JET FRAMES ###
# region
class LeviJets:
    """Taylor jets of the frame and of the Levi field of r at a batch of points.

    The Levi field is the ambient extension Lambda = H_r(L, L). Iterated
    derivatives along L and Lbar are computed on its jets; on the boundary they
    agree with the intrinsic tangential derivatives since L is tangential there.

    Args:
        r (ScalarField): The defining function.
        points: A point (4,) or points (n, 4).
        order (int): The order of the jets of Lambda. The jet of r has order + 2.
        normalization (str, optional): "unit" or "raw". Defaults to "unit".
    """

    def __init__(self, r: ScalarField, points, order: int, normalization: str = "unit"):
        _check_normalization(normalization)
        self.points, self.single = as_points(points)
        self.order = order
        self.normalization = normalization
        self.r = taylor(r, self.points, order + 2)
        grad = self.r.gradient()
        g = np.stack([j.value for j in grad], axis=1)
        degenerate = np.linalg.norm(g, axis=1) == 0
        if np.any(degenerate):
            raise DegenerateGradientError(self.points[int(np.flatnonzero(degenerate)[0])])
        rx, ry, ru, rv = grad
        self.norm_dr = jet_function("sqrt", rx * rx + ry * ry + ru * ru + rv * rv)
        scale = Jet.constant(2.0, len(self.points), order + 1) if normalization == "raw" else self.norm_dr
        r_w = (ru - rv * 1j) * 0.5
        r_z = (rx - ry * 1j) * 0.5
        # L = a d/dz + b d/dw, N = c d/dz + d d/dw
        self.a = r_w * 2.0 / scale
        self.b = -r_z * 2.0 / scale
        self.c = r_z.conj() * 2.0 / self.norm_dr
        self.d = r_w.conj() * 2.0 / self.norm_dr
        self.nu = [rx / self.norm_dr, ry / self.norm_dr, ru / self.norm_dr, rv / self.norm_dr]
        hessian = [[grad[i].diff(j) for j in range(4)] for i in range(4)]
        hc, _ = complex_second_derivatives(hessian)
        self.hc = hc
        a, b = self.a.truncate(order), self.b.truncate(order)
        cross = hc[0][1] * a * b.conj()
        self.levi = (hc[0][0] * (a * a.conj()) + hc[1][1] * (b * b.conj()) + cross + cross.conj()).real
        self._words: Dict[str, Jet] = {"": self.levi}

    def _coefficients(self, first: Jet, second: Jet, conjugate: bool) -> List[Jet]:
        if conjugate:
            first, second = first.conj(), second.conj()
            return [first * 0.5, first * 0.5j, second * 0.5, second * 0.5j]
        return [first * 0.5, first * -0.5j, second * 0.5, second * -0.5j]

    def apply_L(self, f: Jet) -> Jet:
        return directional(self._coefficients(self.a, self.b, False), f)

    def apply_Lbar(self, f: Jet) -> Jet:
        return directional(self._coefficients(self.a, self.b, True), f)

    def apply_N(self, f: Jet) -> Jet:
        return directional(self._coefficients(self.c, self.d, False), f)

    def apply_nu(self, f: Jet) -> Jet:
        return directional(self.nu, f)

    def word(self, word: str) -> Jet:
        """The jet of the word applied to Lambda, letters "L" and "Lb", outermost first.

        E.g. "L,Lb" is L(Lbar(Lambda)). Shared suffixes are computed once.
        """
        if word in self._words:
            return self._words[word]
        letters = word.split(",")
        inner = self.word(",".join(letters[1:]))
        if letters[0] == "L":
            result = self.apply_L(inner)
        elif letters[0] == "Lb":
            result = self.apply_Lbar(inner)
        else:
            raise ValueError(f"Unknown letter '{letters[0]}' in word '{word}'.")
        self._words[word] = result
        return result

    def value(self, word: str = "") -> Union[complex, np.ndarray]:
        return _squeeze(self.word(word).value, self.single)

    def levels(self, max_length: int):
        """Yields (length, {word: values}) for all words up to max_length."""
        current = [""]
        yield 0, {"": self.levi.value}
        for length in range(1, max_length + 1):
            current = [
                letter + ("," + w if w else "") for w in current for letter in ("L", "Lb")
            ]
            yield length, {w: self.word(w).value for w in current}


def lie_derivative_words(r: ScalarField, p, max_length: int, normalization: str = "unit") -> Dict[str, complex]:
    """Values of all words over {L, Lbar} up to max_length applied to Lambda at p."""
    jets = LeviJets(r, p, max_length, normalization)
    table = {}
    for _, words in jets.levels(max_length):
        for word, values in words.items():
            table[word or "lambda"] = _squeeze(values, jets.single)
    return table


# endregion

### SYMBOLIC FRAMES ###
# region
def _holo(vector) -> ComplexVector:
    return tuple(ComplexField._lift(c) for c in vector)


def apply_vector(V, f: Union[ScalarField, ComplexField]) -> ComplexField:
    """V f = V^1 f_z + V^2 f_w for a (1, 0) vector field V."""
    v1, v2 = _holo(V)
    f = ComplexField._lift(f)
    return v1 * f.dz() + v2 * f.dw()


def apply_conj_vector(V, f: Union[ScalarField, ComplexField]) -> ComplexField:
    """conj(V) f = conj(V^1) f_zbar + conj(V^2) f_wbar."""
    v1, v2 = _holo(V)
    f = ComplexField._lift(f)
    return v1.conj() * f.dzbar() + v2.conj() * f.dwbar()


def chern_nabla(V, W, p) -> np.ndarray:
    """The covariant derivative nabla_V W = (V W^1, V W^2) of the flat metric at p."""
    pts, single = as_points(p)
    values = np.stack([apply_vector(V, w).evaluate(pts) for w in _holo(W)], axis=-1)
    return values[0] if single else values


@dataclass(frozen=True)
class FrameFields:
    """Symbolic coefficient fields of the frame of r.

    Attributes:
        r: The defining function.
        L, N: Complex coefficient fields w.r.t. (d/dz, d/dw).
        X, Y, T, nu: Real coefficient fields w.r.t. (d/dx, d/dy, d/du, d/dv).
        norm_dr: The field |dr|.
    """

    r: ScalarField
    L: ComplexVector
    N: ComplexVector
    X: Tuple[ScalarField, ...]
    Y: Tuple[ScalarField, ...]
    T: Tuple[ScalarField, ...]
    nu: Tuple[ScalarField, ...]
    norm_dr: ScalarField

    def apply_L(self, f) -> ComplexField:
        return apply_vector(self.L, f)

    def apply_Lbar(self, f) -> ComplexField:
        return apply_conj_vector(self.L, f)

    def apply_N(self, f) -> ComplexField:
        return apply_vector(self.N, f)

    def apply_real(self, direction: str, f: ScalarField) -> ScalarField:
        coefficients = getattr(self, direction)
        total = const_field(0)
        for c, name in zip(coefficients, "xyuv"):
            total = total + c * f.diff(name)
        return total

    def hessian(self, f: ScalarField, V, W) -> ComplexField:
        """The field H_f(V, W) for complex coefficient vectors V, W."""
        v, w = _holo(V), _holo(W)
        f = ComplexField._lift(f)
        second = [[f.dz().dzbar(), f.dz().dwbar()], [f.dw().dzbar(), f.dw().dwbar()]]
        total = ComplexField(const_field(0))
        for j in range(2):
            for k in range(2):
                total = total + second[j][k] * v[j] * w[k].conj()
        return total

    def levi_field(self, f: Optional[ScalarField] = None) -> ScalarField:
        """Lambda = H_f(L, L) with f = r by default."""
        return self.hessian(self.r if f is None else f, self.L, self.L).re

    def word(self, word: str, f: Optional[ScalarField] = None) -> ComplexField:
        """The field of a word over {L, Lbar} applied to f (default Lambda).

        Letters are written outermost first, "L,Lb" is L(Lbar(f)).
        """
        result = ComplexField._lift(self.levi_field() if f is None else f)
        for letter in reversed(word.split(",") if word else []):
            if letter == "L":
                result = self.apply_L(result)
            elif letter == "Lb":
                result = self.apply_Lbar(result)
            else:
                raise ValueError(f"Unknown letter '{letter}' in word '{word}'.")
        return result


def frame_fields(r: ScalarField) -> FrameFields:
    """Builds the symbolic frame of r.

    Evaluating the coefficient fields where dr = 0 raises a DomainError (division
    by zero); :func:`frame_at` reports such points as DegenerateGradientError.
    """
    rx, ry, ru, rv = (r.diff(v) for v in "xyuv")
    norm = sqrt(rx * rx + ry * ry + ru * ru + rv * rv)
    L = (ComplexField(ru / norm, -rv / norm), ComplexField(-rx / norm, ry / norm))
    N = (ComplexField(rx / norm, ry / norm), ComplexField(ru / norm, rv / norm))
    X = (ru / norm, -rv / norm, -rx / norm, ry / norm)
    Y = (-rv / norm, -ru / norm, ry / norm, rx / norm)
    T = (ry / norm, -rx / norm, rv / norm, -ru / norm)
    nu = (rx / norm, ry / norm, ru / norm, rv / norm)
    return FrameFields(r, L, N, X, Y, T, nu, norm)


def levi_field(r: ScalarField, normalization: str = "unit") -> ScalarField:
    """The ambient Levi field Lambda = H_r(L, L) as a field."""
    _check_normalization(normalization)
    frame = frame_fields(r)
    unit = frame.levi_field()
    if normalization == "raw":
        return unit * frame.norm_dr * frame.norm_dr / 4
    return unit


def normal_levi_field(r: ScalarField) -> ScalarField:
    """The field nu Lambda, the normal derivative of the ambient Levi field."""
    frame = frame_fields(r)
    return frame.apply_real("nu", frame.levi_field())


def levi_words_at(r: ScalarField, p, words: Sequence[str]) -> Dict[str, Union[complex, np.ndarray]]:
    """Values of words over {L, Lbar} applied to Lambda, from the symbolic frame fields.

    Raises:
        DegenerateGradientError: If dr vanishes at one of the points.
    """
    pts, single = as_points(p)
    gradient_at(r, pts)
    frame = frame_fields(r)
    lam = frame.levi_field()
    return {w: _squeeze(np.atleast_1d(frame.word(w, lam).evaluate(pts)), single) for w in words}


def normal_derivative_levi(r: ScalarField, p) -> Union[float, np.ndarray]:
    """nu H_r(L, L) at p.

    Raises:
        DegenerateGradientError: If dr vanishes at one of the points.
    """
    pts, single = as_points(p)
    gradient_at(r, pts)
    return _squeeze(np.atleast_1d(evaluate(normal_levi_field(r), pts)), single)


# endregion

### NORMALIZATION ###
# region
def normalize_at(r: ScalarField, p0, tol: float = 1e-10) -> Tuple[HoloMap, ScalarField]:
    """Normalizes r at p0 by a holomorphic map of degree 2.

    Returns Phi with Phi(0) = p0 and r' = r o Phi such that r'_z(0) = 0,
    r'_w(0) = 1/2 and r'_zz(0) = 0.

    Raises:
        DegenerateGradientError: If dr(p0) = 0.
        NormalizationError: If a condition fails numerically.
    """
    pts, _ = as_points(p0)
    grad = gradient_at(r, pts)[0]
    r_z = 0.5 * (grad[0] - 1j * grad[1])
    r_w = 0.5 * (grad[2] - 1j * grad[3])
    size = abs(r_z) ** 2 + abs(r_w) ** 2
    e1 = np.array([r_w, -r_z]) / np.sqrt(size)
    e2 = np.conj(np.array([r_z, r_w])) / (2 * size)
    _, _, qc = _hessian_arrays(r, pts)
    q = -(e1 @ qc[0] @ e1)
    origin = pts[0, 0] + 1j * pts[0, 1], pts[0, 2] + 1j * pts[0, 3]
    components = []
    for k in range(2):
        components.append(
            {
                (0, 0): complex(origin[k]),
                (1, 0): complex(e1[k]),
                (0, 1): complex(e2[k]),
                (2, 0): complex(q * e2[k]),
            }
        )
    phi = HoloMap(*components)
    normalized = compose_holo(r, phi)

    zero = np.zeros((1, 4))
    g = gradient_at(normalized, zero, check=False)[0]
    _, _, q_new = _hessian_arrays(normalized, zero)
    checks = {
        "r'_z(0)": abs(0.5 * (g[0] - 1j * g[1])),
        "r'_w(0) - 1/2": abs(0.5 * (g[2] - 1j * g[3]) - 0.5),
        "r'_zz(0)": abs(q_new[0, 0, 0]) / (1 + abs(qc[0, 0, 0])),
    }
    for name, value in checks.items():
        if value > tol:
            raise NormalizationError(f"Normalization failed, {name} = {value:.3e}.")
    logger.debug("Normalized r at %s with q = %s.", tuple(pts[0]), q)
    return phi, normalized


# endregion
