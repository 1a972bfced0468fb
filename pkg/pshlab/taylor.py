"""Batched truncated Taylor polynomials in (x, y, u, v).

A :class:`Jet` holds, for every point of a batch, the Taylor coefficients of a
function up to a fixed total degree. Jets are what the pointwise higher-order
quantities (Hessians, iterated frame derivatives, type words) are evaluated
with: the expression graph of a field is run once in the jet algebra instead of
differentiating it symbolically many times.

Monomials are sorted by degree, so truncating a jet to a lower order is slicing
its coefficient array.
"""

import math
from functools import lru_cache
from itertools import combinations_with_replacement
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np
from scipy import sparse

from .errors import DomainError
from .expr import VARIABLE_INDEX, ScalarField, as_points, flat_value, topological

_PRODUCT_BLOCK = 4_000_000


class JetSpace:
    """The monomials of degree at most ``order`` in four variables and their tables."""

    def __init__(self, order: int):
        self.order = order
        exponents = []
        for degree in range(order + 1):
            block = []
            for combo in combinations_with_replacement(range(4), degree):
                alpha = [0, 0, 0, 0]
                for i in combo:
                    alpha[i] += 1
                block.append(tuple(alpha))
            exponents.extend(sorted(block, reverse=True))
        self.exponents = np.array(exponents, dtype=int).reshape(-1, 4)
        self.index = {alpha: i for i, alpha in enumerate(exponents)}
        self.degrees = self.exponents.sum(axis=1)
        self.size = len(exponents)
        self.factorials = np.array(
            [np.prod([math.factorial(a) for a in alpha]) for alpha in exponents], dtype=float
        )
        self._product = None
        self._shifts = {}

    def size_of(self, order: int) -> int:
        return int(np.count_nonzero(self.degrees <= order))

    @property
    def product(self) -> Tuple[np.ndarray, np.ndarray, sparse.csr_matrix]:
        """Index pairs (i, j) with deg i + deg j <= order and the scatter matrix."""
        if self._product is None:
            left, right, target = [], [], []
            for i, alpha in enumerate(self.index):
                limit = self.size_of(self.order - self.degrees[i])
                for j in range(limit):
                    beta = self.exponents[j]
                    left.append(i)
                    right.append(j)
                    target.append(self.index[tuple(int(a + b) for a, b in zip(alpha, beta))])
            pairs = len(target)
            scatter = sparse.csr_matrix(
                (np.ones(pairs), (np.arange(pairs), np.array(target))),
                shape=(pairs, self.size),
            )
            self._product = (np.array(left), np.array(right), scatter)
        return self._product

    def shift(self, var: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Source indices, target indices (in the space of order - 1) and factors of d/d var."""
        if var in self._shifts:
            return self._shifts[var]
        lower = space(self.order - 1) if self.order > 0 else None
        sources, targets, factors = [], [], []
        for i, alpha in enumerate(self.index):
            if alpha[var] == 0 or lower is None:
                continue
            beta = list(alpha)
            beta[var] -= 1
            sources.append(i)
            targets.append(lower.index[tuple(beta)])
            factors.append(alpha[var])
        self._shifts[var] = (
            np.array(sources, dtype=int),
            np.array(targets, dtype=int),
            np.array(factors, dtype=float),
        )
        return self._shifts[var]


@lru_cache(maxsize=None)
def space(order: int) -> JetSpace:
    if order < 0:
        raise ValueError("Jet orders are non-negative.")
    return JetSpace(order)


Operand = Union["Jet", float, complex, np.ndarray]


class Jet:
    """Truncated Taylor expansions at a batch of n points.

    Attributes:
        coeffs: Array (n, M) of real or complex coefficients.
        order: The truncation order.
    """

    __slots__ = ("coeffs", "order")

    def __init__(self, coeffs: np.ndarray, order: int):
        self.coeffs = coeffs
        self.order = order

    @classmethod
    def constant(cls, values, n: int, order: int) -> "Jet":
        values = np.broadcast_to(np.asarray(values), (n,))
        coeffs = np.zeros((n, space(order).size), dtype=np.result_type(values, float))
        coeffs[:, 0] = values
        return cls(coeffs, order)

    @classmethod
    def variable(cls, name: str, values: np.ndarray, order: int) -> "Jet":
        jet = cls.constant(values, len(values), order)
        if order > 0:
            alpha = [0, 0, 0, 0]
            alpha[VARIABLE_INDEX[name]] = 1
            jet.coeffs[:, space(order).index[tuple(alpha)]] = 1.0
        return jet

    @property
    def n(self) -> int:
        return self.coeffs.shape[0]

    @property
    def value(self) -> np.ndarray:
        return self.coeffs[:, 0]

    def truncate(self, order: int) -> "Jet":
        if order >= self.order:
            return self
        return Jet(self.coeffs[:, : space(self.order).size_of(order)], order)

    def _coerce(self, other: Operand) -> Tuple["Jet", "Jet"]:
        if isinstance(other, Jet):
            order = min(self.order, other.order)
            return self.truncate(order), other.truncate(order)
        return self, Jet.constant(other, self.n, self.order)

    # arithmetic
    def __add__(self, other: Operand) -> "Jet":
        if not isinstance(other, Jet):
            coeffs = self.coeffs.astype(np.result_type(self.coeffs, np.asarray(other)), copy=True)
            coeffs[:, 0] += other
            return Jet(coeffs, self.order)
        a, b = self._coerce(other)
        return Jet(a.coeffs + b.coeffs, a.order)

    __radd__ = __add__

    def __neg__(self) -> "Jet":
        return Jet(-self.coeffs, self.order)

    def __sub__(self, other: Operand) -> "Jet":
        return self + (-other)

    def __rsub__(self, other: Operand) -> "Jet":
        return (-self) + other

    def __mul__(self, other: Operand) -> "Jet":
        if not isinstance(other, Jet):
            factor = np.asarray(other)
            if factor.ndim == 1:
                factor = factor[:, None]
            return Jet(self.coeffs * factor, self.order)
        a, b = self._coerce(other)
        return Jet(_product(a.coeffs, b.coeffs, a.order), a.order)

    __rmul__ = __mul__

    def __truediv__(self, other: Operand) -> "Jet":
        if not isinstance(other, Jet):
            factor = np.asarray(other)
            if factor.ndim == 1:
                factor = factor[:, None]
            return Jet(self.coeffs / factor, self.order)
        return self * other.reciprocal()

    def __rtruediv__(self, other: Operand) -> "Jet":
        return self.reciprocal() * other

    def __pow__(self, n: int) -> "Jet":
        n = int(n)
        if n < 0:
            return self.reciprocal() ** (-n)
        result, base = Jet.constant(1.0, self.n, self.order), self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def conj(self) -> "Jet":
        return Jet(np.conj(self.coeffs), self.order)

    @property
    def real(self) -> "Jet":
        return Jet(np.real(self.coeffs).copy(), self.order)

    @property
    def imag(self) -> "Jet":
        return Jet(np.imag(self.coeffs).copy(), self.order)

    # calculus
    def diff(self, var: Union[str, int]) -> "Jet":
        """Partial derivative, one order lower."""
        index = VARIABLE_INDEX[var] if isinstance(var, str) else var
        if self.order == 0:
            raise ValueError("A jet of order 0 cannot be differentiated.")
        sources, targets, factors = space(self.order).shift(index)
        coeffs = np.zeros((self.n, space(self.order - 1).size), dtype=self.coeffs.dtype)
        coeffs[:, targets] = self.coeffs[:, sources] * factors
        return Jet(coeffs, self.order - 1)

    def gradient(self) -> List["Jet"]:
        return [self.diff(i) for i in range(4)]

    def partial(self, alpha: Sequence[int]) -> np.ndarray:
        """The value of the partial derivative of multi-index alpha at the points."""
        sp = space(self.order)
        i = sp.index[tuple(int(a) for a in alpha)]
        return self.coeffs[:, i] * sp.factorials[i]

    def hessian(self) -> np.ndarray:
        """Real Hessians at the points, shape (n, 4, 4)."""
        if self.order < 2:
            raise ValueError("Hessians need jets of order 2.")
        out = np.empty((self.n, 4, 4), dtype=self.coeffs.dtype)
        for i in range(4):
            for j in range(4):
                alpha = [0, 0, 0, 0]
                alpha[i] += 1
                alpha[j] += 1
                out[:, i, j] = self.partial(alpha)
        return out

    def compose(self, derivatives: Sequence[np.ndarray]) -> "Jet":
        """f(self) given the derivatives f^(k)(value) for k = 0 .. order."""
        shifted = Jet(self.coeffs.copy(), self.order)
        shifted.coeffs[:, 0] = 0
        result = Jet.constant(derivatives[self.order] / math.factorial(self.order), self.n, self.order)
        for k in range(self.order - 1, -1, -1):
            result = shifted * result + derivatives[k] / math.factorial(k)
        return result

    def reciprocal(self) -> "Jet":
        g0 = self.value
        return self.compose([(-1) ** k * math.factorial(k) * g0 ** (-(k + 1)) for k in range(self.order + 1)])

    def __repr__(self):
        return f"Jet(n={self.n}, order={self.order})"


def _product(a: np.ndarray, b: np.ndarray, order: int) -> np.ndarray:
    left, right, scatter = space(order).product
    n = a.shape[0]
    dtype = np.result_type(a, b)
    out = np.zeros((n, space(order).size), dtype=dtype)
    block = max(1, _PRODUCT_BLOCK // max(1, len(left)))
    for start in range(0, n, block):
        rows = slice(start, start + block)
        pairs = a[rows][:, left] * b[rows][:, right]
        out[rows] = (scatter.T @ pairs.T).T
    return out


### FUNCTIONS ###
# region
def _derivative_sequence(op: str, g0: np.ndarray, order: int, payload=None) -> List[np.ndarray]:
    ks = range(order + 1)
    if op == "exp":
        value = np.exp(g0)
        return [value for _ in ks]
    if op == "ln":
        return [np.log(g0)] + [(-1) ** (k + 1) * math.factorial(k - 1) * g0 ** (-k) for k in ks if k > 0]
    if op == "sin":
        cycle = [np.sin(g0), np.cos(g0), -np.sin(g0), -np.cos(g0)]
        return [cycle[k % 4] for k in ks]
    if op == "cos":
        cycle = [np.cos(g0), -np.sin(g0), -np.cos(g0), np.sin(g0)]
        return [cycle[k % 4] for k in ks]
    if op == "sqrt":
        out, coefficient = [], 1.0
        for k in ks:
            out.append(coefficient * g0 ** (0.5 - k))
            coefficient *= 0.5 - k
        return out
    if op == "flat":
        return [flat_value(g0, payload + k) for k in ks]
    raise ValueError(f"No derivative sequence for '{op}'.")


def _check(node, g0: np.ndarray, points: np.ndarray):
    bad, reason = None, None
    if node.op == "ln":
        bad, reason = g0 <= 0, "ln of non-positive value"
    elif node.op == "sqrt":
        bad, reason = g0 < 0, "sqrt of negative value"
    elif node.op in ("div", "pow"):
        bad, reason = g0 == 0, "division by zero"
    elif node.op == "tan":
        bad, reason = np.abs(np.cos(g0)) < 1e-300, "tan at a pole"
    if bad is not None and np.any(bad):
        raise DomainError(node, reason, points[int(np.flatnonzero(bad)[0])])


def taylor(f: ScalarField, points, order: int) -> Jet:
    """Evaluates the Taylor expansion of f up to ``order`` at the given points.

    Args:
        f (ScalarField): The field.
        points: A point (4,) or an array (n, 4).
        order (int): The truncation order.

    Raises:
        DomainError: If a node is expanded at a point outside of its domain.

    Returns:
        Jet: The jets, one row per point.
    """
    pts, _ = as_points(points)
    n = len(pts)
    values: Dict[int, Union[Jet, float]] = {}
    with np.errstate(all="ignore"):
        for node in topological(f.node):
            op = node.op
            if op == "const":
                values[node.uid] = float(node.payload)
                continue
            if op == "var":
                values[node.uid] = Jet.variable(node.payload, pts[:, VARIABLE_INDEX[node.payload]], order)
                continue
            args = [values[a.uid] for a in node.args]
            values[node.uid] = _apply(node, args, pts, n, order)
            result = values[node.uid]
            finite = np.isfinite(result.coeffs).all(axis=1) if isinstance(result, Jet) else np.isfinite(result)
            if not np.all(finite):
                index = int(np.flatnonzero(~np.broadcast_to(finite, (n,)))[0])
                raise DomainError(node, "non-finite value", pts[index])
    result = values[f.node.uid]
    if not isinstance(result, Jet):
        result = Jet.constant(result, n, order)
    return result


def _apply(node, args, pts, n, order):
    op = node.op
    if not any(isinstance(a, Jet) for a in args):
        # constant subexpression
        return float(_scalar(node, args))
    if op == "add":
        return args[0] + args[1]
    if op == "mul":
        return args[0] * args[1]
    a = args[0] if isinstance(args[0], Jet) else Jet.constant(args[0], n, order)
    if op == "neg":
        return -a
    if op == "div":
        denominator = args[1]
        if isinstance(denominator, Jet):
            _check(node, denominator.value, pts)
            return denominator.reciprocal() * args[0]
        return args[0] / denominator
    if op == "pow":
        if node.payload < 0:
            _check(node, a.value, pts)
        return a ** node.payload
    _check(node, a.value, pts)
    if op == "tan":
        return a.compose(_derivative_sequence("sin", a.value, a.order)) / a.compose(
            _derivative_sequence("cos", a.value, a.order)
        )
    return a.compose(_derivative_sequence(op, a.value, a.order, node.payload))


def _scalar(node, args):
    op = node.op
    if op == "add":
        return args[0] + args[1]
    if op == "mul":
        return args[0] * args[1]
    if op == "neg":
        return -args[0]
    if op == "div":
        return args[0] / args[1]
    if op == "pow":
        return args[0] ** node.payload
    if op == "flat":
        return flat_value(np.array([args[0]]), node.payload)[0]
    return getattr(np, {"ln": "log"}.get(op, op))(args[0])


def jet_function(name: str, jet: Jet) -> Jet:
    """Applies exp, ln, sin, cos or sqrt to a jet."""
    return jet.compose(_derivative_sequence(name, jet.value, jet.order))


def directional(coefficients: Sequence[Operand], f: Jet) -> Jet:
    """Applies the vector field sum_i c_i d/dt_i to a jet (coefficients are jets or arrays)."""
    result = None
    for i, c in enumerate(coefficients):
        term = f.diff(i) * c
        result = term if result is None else result + term
    return result


# endregion
