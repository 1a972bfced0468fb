"""Expression graphs of smooth functions on regions of C^2 = R^4.

A :class:`ScalarField` wraps an interned, immutable node graph over the real
coordinates ``x, y, u, v`` (with ``z = x + iy`` and ``w = u + iv``). Equal
subexpressions are represented by the same node, so derivatives of large
fields share their common parts. Constants stay exact :class:`fractions.Fraction`
values as long as the source is rational.

Simplification is restricted to constant folding, the 0/1 identities and the
merging of integer powers of the same base.
"""

import math
import re
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import count
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from . import defaults
from .errors import (
    DomainError,
    DslSyntaxError,
    ExpressionTooLarge,
    OrderLimitError,
    UnboundParameterError,
)

VARIABLES = ("x", "y", "u", "v")
VARIABLE_INDEX = {name: i for i, name in enumerate(VARIABLES)}
FUNCTIONS = ("exp", "ln", "cos", "sin", "tan", "sqrt")

_HALF = Fraction(1, 2)

### NODES ###
# region
@dataclass(frozen=True, eq=False)
class Node:
    """A node of an expression graph.

    Nodes are only created through the builder functions of this module which
    intern them, so two structurally equal nodes are the same object and
    identity comparison is structural comparison.

    Attributes:
        op: One of const, var, add, mul, neg, div, pow, the function names or flat.
        payload: The constant value, the variable name or the integer exponent/order.
        args: The operand nodes.
        uid: Serial number, used for canonical operand order.
    """

    op: str
    payload: Any
    args: Tuple["Node", ...]
    uid: int = field(compare=False)

    def __repr__(self):
        return f"Node({self.op}, {self.payload!r}, #{self.uid})"


_INTERNED: Dict[tuple, Node] = {}
_DERIVATIVES: Dict[Tuple[int, str], Node] = {}
_LOCK = threading.RLock()
_SERIAL = count()


def _payload_key(payload):
    return (type(payload).__name__, payload)


def _intern(op: str, payload: Any, args: Tuple[Node, ...]) -> Node:
    key = (op, _payload_key(payload), tuple(a.uid for a in args))
    with _LOCK:
        node = _INTERNED.get(key)
        if node is None:
            node = Node(op, payload, args, next(_SERIAL))
            _INTERNED[key] = node
        return node


def _exact(value) -> Union[Fraction, float]:
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return Fraction(int(value))
    if isinstance(value, (float, np.floating)):
        return float(value)
    raise TypeError(f"Unsupported constant {value!r}.")


def constant(value) -> Node:
    return _intern("const", _exact(value), ())


def variable(name: str) -> Node:
    if name not in VARIABLE_INDEX:
        raise ValueError(f"Unknown variable '{name}'.")
    return _intern("var", name, ())


ZERO = constant(0)
ONE = constant(1)


def _is_const(node: Node, value=None) -> bool:
    if node.op != "const":
        return False
    return value is None or node.payload == value


def _fold(a, b, operation):
    result = operation(a, b)
    if isinstance(a, Fraction) and isinstance(b, Fraction):
        return result
    return float(result)


def _ordered(a: Node, b: Node) -> Tuple[Node, Node]:
    return (a, b) if a.uid <= b.uid else (b, a)


def add(a: Node, b: Node) -> Node:
    if _is_const(a, 0):
        return b
    if _is_const(b, 0):
        return a
    if _is_const(a) and _is_const(b):
        return constant(_fold(a.payload, b.payload, lambda p, q: p + q))
    return _intern("add", None, _ordered(a, b))


def neg(a: Node) -> Node:
    if a.op == "neg":
        return a.args[0]
    if _is_const(a):
        return constant(-a.payload)
    return _intern("neg", None, (a,))


def sub(a: Node, b: Node) -> Node:
    return add(a, neg(b))


def _base_exponent(node: Node) -> Tuple[Node, int]:
    if node.op == "pow":
        return node.args[0], node.payload
    return node, 1


def mul(a: Node, b: Node) -> Node:
    if _is_const(a, 0) or _is_const(b, 0):
        return ZERO
    if _is_const(a, 1):
        return b
    if _is_const(b, 1):
        return a
    if _is_const(a, -1):
        return neg(b)
    if _is_const(b, -1):
        return neg(a)
    if _is_const(a) and _is_const(b):
        return constant(_fold(a.payload, b.payload, lambda p, q: p * q))
    base_a, exp_a = _base_exponent(a)
    base_b, exp_b = _base_exponent(b)
    if base_a is base_b:
        return power(base_a, exp_a + exp_b)
    return _intern("mul", None, _ordered(a, b))


def div(a: Node, b: Node) -> Node:
    if _is_const(b, 1):
        return a
    if _is_const(b) and b.payload != 0:
        if isinstance(b.payload, Fraction):
            return mul(a, constant(1 / b.payload))
        if _is_const(a):
            return constant(float(a.payload) / b.payload)
    if _is_const(a, 0) and not _is_const(b):
        return ZERO
    return _intern("div", None, (a, b))


def power(a: Node, n: int) -> Node:
    n = int(n)
    if n == 0:
        return ONE
    if n == 1:
        return a
    if _is_const(a):
        if a.payload != 0 or n > 0:
            return constant(_fold(a.payload, Fraction(n), lambda p, q: p ** int(q)))
    if a.op == "pow":
        return power(a.args[0], a.payload * n)
    return _intern("pow", n, (a,))


def _exact_sqrt(value: Fraction) -> Optional[Fraction]:
    if value < 0:
        return None
    num, den = math.isqrt(value.numerator), math.isqrt(value.denominator)
    if num * num == value.numerator and den * den == value.denominator:
        return Fraction(num, den)
    return None


_FLOAT_FUNCTIONS = {
    "exp": math.exp,
    "ln": math.log,
    "cos": math.cos,
    "sin": math.sin,
    "tan": math.tan,
    "sqrt": math.sqrt,
}
_EXACT_VALUES = {
    ("exp", 0): 1,
    ("ln", 1): 0,
    ("cos", 0): 1,
    ("sin", 0): 0,
    ("tan", 0): 0,
}


def function(name: str, a: Node) -> Node:
    """Builds the node ``name(a)`` for one of the elementary functions."""
    if name not in FUNCTIONS:
        raise ValueError(f"Unknown function '{name}'.")
    if _is_const(a):
        value = a.payload
        if (name, value) in _EXACT_VALUES:
            return constant(_EXACT_VALUES[(name, value)])
        if name == "sqrt" and isinstance(value, Fraction):
            root = _exact_sqrt(value)
            if root is not None:
                return constant(root)
        in_domain = not (
            (name == "ln" and value <= 0) or (name == "sqrt" and value < 0)
        )
        if in_domain and not (name, value) in _EXACT_VALUES and not isinstance(value, Fraction):
            return constant(_FLOAT_FUNCTIONS[name](value))
    return _intern(name, None, (a,))


def flat(a: Node, order: int = 0) -> Node:
    """The flat exponential E_n(s), n-th derivative of exp(-1/s) (s > 0), 0 (s <= 0)."""
    return _intern("flat", int(order), (a,))


# endregion

### TRAVERSAL ###
# region
def topological(root: Node) -> List[Node]:
    """Returns all nodes below root, every node after its operands."""
    order, seen, stack = [], set(), [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if node.uid in seen:
            continue
        seen.add(node.uid)
        stack.append((node, True))
        for arg in node.args:
            if arg.uid not in seen:
                stack.append((arg, False))
    return order


def node_count(root: Node) -> int:
    return len(topological(root))


def free_variables(root: Node) -> Tuple[str, ...]:
    names = {n.payload for n in topological(root) if n.op == "var"}
    return tuple(v for v in VARIABLES if v in names)


def rebuild(node: Node, args: Sequence[Node]) -> Node:
    """Builds a node of the same kind with new operands (simplifying again)."""
    op = node.op
    if op in ("const", "var"):
        return node
    if op == "add":
        return add(*args)
    if op == "mul":
        return mul(*args)
    if op == "neg":
        return neg(args[0])
    if op == "div":
        return div(*args)
    if op == "pow":
        return power(args[0], node.payload)
    if op == "flat":
        return flat(args[0], node.payload)
    return function(op, args[0])


def substitute_nodes(root: Node, mapping: Mapping[str, Node]) -> Node:
    new: Dict[int, Node] = {}
    for node in topological(root):
        if node.op == "var" and node.payload in mapping:
            new[node.uid] = mapping[node.payload]
        else:
            new[node.uid] = rebuild(node, [new[a.uid] for a in node.args])
    return new[root.uid]


# endregion

### DIFFERENTIATION ###
# region
def _derivative_rule(node: Node, d: List[Node], var: str) -> Node:
    op, args = node.op, node.args
    if op == "const":
        return ZERO
    if op == "var":
        return ONE if node.payload == var else ZERO
    if op == "add":
        return add(d[0], d[1])
    if op == "neg":
        return neg(d[0])
    if op == "mul":
        return add(mul(d[0], args[1]), mul(args[0], d[1]))
    if op == "div":
        numerator = sub(mul(d[0], args[1]), mul(args[0], d[1]))
        return div(numerator, power(args[1], 2))
    if _is_const(d[0], 0):
        return ZERO
    if op == "pow":
        n = node.payload
        return mul(mul(constant(n), power(args[0], n - 1)), d[0])
    if op == "exp":
        return mul(node, d[0])
    if op == "ln":
        return div(d[0], args[0])
    if op == "sin":
        return mul(function("cos", args[0]), d[0])
    if op == "cos":
        return neg(mul(function("sin", args[0]), d[0]))
    if op == "tan":
        return mul(add(ONE, power(node, 2)), d[0])
    if op == "sqrt":
        return div(d[0], mul(constant(2), node))
    if op == "flat":
        return mul(flat(args[0], node.payload + 1), d[0])
    raise ValueError(f"Unknown node type '{op}'.")


def differentiate(root: Node, var: str) -> Node:
    """Symbolic partial derivative of the graph with respect to a real coordinate."""
    if var not in VARIABLE_INDEX:
        raise ValueError(f"Unknown variable '{var}'.")
    with _LOCK:
        for node in topological(root):
            key = (node.uid, var)
            if key in _DERIVATIVES:
                continue
            d = [_DERIVATIVES[(a.uid, var)] for a in node.args]
            _DERIVATIVES[key] = _derivative_rule(node, d, var)
        return _DERIVATIVES[(root.uid, var)]


# endregion

### NUMERICAL EVALUATION ###
# region
def _flat_polynomials(order: int) -> List[np.poly1d]:
    # E_n(s) = P_n(1/s) exp(-1/s) with P_{n+1}(q) = q^2 (P_n(q) - P_n'(q))
    polys = [np.poly1d([1.0])]
    q2 = np.poly1d([1.0, 0.0, 0.0])
    for _ in range(order):
        p = polys[-1]
        polys.append(q2 * (p - p.deriv()))
    return polys


def flat_value(s: np.ndarray, order: int) -> np.ndarray:
    """Evaluates E_order(s) elementwise."""
    s = np.asarray(s, dtype=float)
    out = np.zeros_like(s)
    positive = s > 0
    if np.any(positive):
        q = 1.0 / s[positive]
        with np.errstate(all="ignore"):
            values = _flat_polynomials(order)[order](q) * np.exp(-q)
        out[positive] = np.nan_to_num(values, nan=0.0, posinf=0.0, neginf=0.0)
    return out


def _apply_float(node: Node, args: List[np.ndarray]) -> np.ndarray:
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
        return np.power(args[0], float(node.payload)) if node.payload < 0 else args[0] ** node.payload
    if op == "exp":
        return np.exp(args[0])
    if op == "ln":
        return np.log(args[0])
    if op == "cos":
        return np.cos(args[0])
    if op == "sin":
        return np.sin(args[0])
    if op == "tan":
        return np.tan(args[0])
    if op == "sqrt":
        return np.sqrt(args[0])
    if op == "flat":
        return flat_value(args[0], node.payload)
    raise ValueError(f"Unknown node type '{op}'.")


_DOMAIN_REASONS = {
    "ln": "ln of non-positive value",
    "sqrt": "sqrt of negative value",
    "div": "division by zero",
    "pow": "division by zero",
    "tan": "tan at a pole",
}


def _check_domain(node: Node, args: List[np.ndarray], points: np.ndarray):
    bad = None
    if node.op == "ln":
        bad = args[0] <= 0
    elif node.op == "sqrt":
        bad = args[0] < 0
    elif node.op == "div":
        bad = args[1] == 0
    elif node.op == "pow" and node.payload < 0:
        bad = args[0] == 0
    elif node.op == "tan":
        bad = np.abs(np.cos(args[0])) < 1e-300
    if bad is not None and np.any(bad):
        index = int(np.flatnonzero(np.broadcast_to(bad, points.shape[:1]))[0])
        raise DomainError(node, _DOMAIN_REASONS[node.op], points[index])


def evaluate_node(root: Node, points: np.ndarray) -> np.ndarray:
    """Evaluates the graph at the rows of an (n, 4) array of points.

    Raises:
        DomainError: If a node is evaluated outside of its domain or overflows.
    """
    values: Dict[int, Any] = {}
    with np.errstate(all="ignore"):
        for node in topological(root):
            if node.op == "const":
                values[node.uid] = float(node.payload)
                continue
            if node.op == "var":
                values[node.uid] = points[:, VARIABLE_INDEX[node.payload]]
                continue
            args = [values[a.uid] for a in node.args]
            _check_domain(node, args, points)
            result = _apply_float(node, args)
            if not np.all(np.isfinite(result)):
                index = int(np.flatnonzero(~np.isfinite(np.broadcast_to(result, points.shape[:1])))[0])
                raise DomainError(node, "non-finite value", points[index])
            values[node.uid] = result
    return np.broadcast_to(values[root.uid], points.shape[:1]).astype(float)


def as_points(points) -> Tuple[np.ndarray, bool]:
    """Returns an (n, 4) float array and whether a single point was passed."""
    array = np.asarray(points, dtype=float)
    if array.ndim == 1:
        if array.shape != (4,):
            raise ValueError("A point needs the four coordinates (x, y, u, v).")
        return array[None, :], True
    if array.ndim != 2 or array.shape[1] != 4:
        raise ValueError("Points must have shape (n, 4).")
    return array, False


# endregion

### FIELDS ###
# region
@dataclass(frozen=True)
class Box:
    """An axis parallel box in (x, y, u, v), bounds may be infinite.

    Attributes:
        lower: The lower bounds.
        upper: The upper bounds.
        closed: Whether the bounds belong to the box.
    """

    lower: Tuple[float, float, float, float] = (-math.inf,) * 4
    upper: Tuple[float, float, float, float] = (math.inf,) * 4
    closed: bool = True

    @classmethod
    def from_intervals(cls, intervals, closed: bool = True) -> "Box":
        return cls(
            tuple(float(lo) for lo, _ in intervals),
            tuple(float(hi) for _, hi in intervals),
            closed,
        )

    def contains(self, points) -> np.ndarray:
        pts, _ = as_points(points)
        lower, upper = np.array(self.lower), np.array(self.upper)
        if self.closed:
            inside = (pts >= lower) & (pts <= upper)
        else:
            inside = (pts > lower) & (pts < upper)
        return np.all(inside, axis=1)

    def intersect(self, other: Optional["Box"]) -> "Box":
        if other is None:
            return self
        return Box(
            tuple(max(a, b) for a, b in zip(self.lower, other.lower)),
            tuple(min(a, b) for a, b in zip(self.upper, other.upper)),
            self.closed and other.closed,
        )

    @property
    def intervals(self):
        return tuple(zip(self.lower, self.upper))


def _merge_regions(a: Optional[Box], b: Optional[Box]) -> Optional[Box]:
    if a is None:
        return b
    return a.intersect(b)


Number = Union[int, float, Fraction]


@dataclass(frozen=True)
class ScalarField:
    """A smooth real-valued function of (x, y, u, v), optionally restricted to a box.

    Fields support the arithmetic operators with other fields and numbers; ``**``
    takes integer exponents only.
    """

    node: Node
    region: Optional[Box] = None

    @staticmethod
    def _lift(other) -> "ScalarField":
        if isinstance(other, ScalarField):
            return other
        return ScalarField(constant(other))

    def _combine(self, other, builder, reverse=False) -> "ScalarField":
        other = self._lift(other)
        a, b = (other, self) if reverse else (self, other)
        return ScalarField(builder(a.node, b.node), _merge_regions(self.region, other.region))

    def __add__(self, other):
        return self._combine(other, add)

    def __radd__(self, other):
        return self._combine(other, add, reverse=True)

    def __sub__(self, other):
        return self._combine(other, sub)

    def __rsub__(self, other):
        return self._combine(other, sub, reverse=True)

    def __mul__(self, other):
        return self._combine(other, mul)

    def __rmul__(self, other):
        return self._combine(other, mul, reverse=True)

    def __truediv__(self, other):
        return self._combine(other, div)

    def __rtruediv__(self, other):
        return self._combine(other, div, reverse=True)

    def __neg__(self):
        return ScalarField(neg(self.node), self.region)

    def __pow__(self, n: int):
        if int(n) != n:
            raise ValueError("Fields can only be raised to integer powers.")
        return ScalarField(power(self.node, int(n)), self.region)

    def with_region(self, region: Optional[Box]) -> "ScalarField":
        return ScalarField(self.node, region)

    def evaluate(self, points) -> Union[float, np.ndarray]:
        return evaluate(self, points)

    def diff(self, var: str) -> "ScalarField":
        return diff(self, var)

    def is_zero(self) -> bool:
        return _is_const(self.node, 0)

    def __repr__(self):
        return f"ScalarField(<{node_count(self.node)} nodes>)"


def var_field(name: str) -> ScalarField:
    return ScalarField(variable(name))


def const_field(value: Number) -> ScalarField:
    return ScalarField(constant(value))


def _unary(name: str, f: ScalarField) -> ScalarField:
    return ScalarField(function(name, f.node), f.region)


def exp(f: ScalarField) -> ScalarField:
    return _unary("exp", ScalarField._lift(f))


def ln(f: ScalarField) -> ScalarField:
    return _unary("ln", ScalarField._lift(f))


def cos(f: ScalarField) -> ScalarField:
    return _unary("cos", ScalarField._lift(f))


def sin(f: ScalarField) -> ScalarField:
    return _unary("sin", ScalarField._lift(f))


def tan(f: ScalarField) -> ScalarField:
    return _unary("tan", ScalarField._lift(f))


def sqrt(f: ScalarField) -> ScalarField:
    return _unary("sqrt", ScalarField._lift(f))


def flat_field(f: ScalarField, order: int = 0) -> ScalarField:
    return ScalarField(flat(f.node, order), f.region)


X, Y, U, V = (var_field(name) for name in VARIABLES)


def evaluate(f: ScalarField, points) -> Union[float, np.ndarray]:
    """Evaluates a field at a point (4,) or at the rows of an (n, 4) array.

    Raises:
        DomainError: For points outside of the region of the field and for nodes
            evaluated outside of their domain.
    """
    pts, single = as_points(points)
    if f.region is not None:
        inside = f.region.contains(pts)
        if not np.all(inside):
            index = int(np.flatnonzero(~inside)[0])
            raise DomainError(f.node, "point outside of the region", pts[index])
    values = evaluate_node(f.node, pts)
    return float(values[0]) if single else values


def diff(f: ScalarField, var: str) -> ScalarField:
    """The symbolic partial derivative of f with respect to x, y, u or v."""
    return ScalarField(differentiate(f.node, var), f.region)


def gradient(f: ScalarField) -> Tuple[ScalarField, ...]:
    return tuple(diff(f, name) for name in VARIABLES)


def substitute(f: ScalarField, mapping: Mapping[str, ScalarField]) -> ScalarField:
    """Replaces coordinates by fields. The region of the result is not restricted."""
    return ScalarField(substitute_nodes(f.node, {k: v.node for k, v in mapping.items()}))


# endregion

### COMPLEX FIELDS ###
# region
def _complex_parts(c) -> Tuple[Node, Node]:
    if isinstance(c, tuple):
        return constant(c[0]), constant(c[1])
    if isinstance(c, complex):
        return constant(c.real), constant(c.imag)
    return constant(c), ZERO


@dataclass(frozen=True)
class ComplexField:
    """A complex-valued field re + i im."""

    re: ScalarField
    im: ScalarField = field(default_factory=lambda: const_field(0))

    @staticmethod
    def _lift(other) -> "ComplexField":
        if isinstance(other, ComplexField):
            return other
        if isinstance(other, ScalarField):
            return ComplexField(other)
        re, im = _complex_parts(other)
        return ComplexField(ScalarField(re), ScalarField(im))

    def __add__(self, other):
        other = self._lift(other)
        return ComplexField(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._lift(other)
        return ComplexField(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        return self._lift(other) - self

    def __neg__(self):
        return ComplexField(-self.re, -self.im)

    def __mul__(self, other):
        other = self._lift(other)
        return ComplexField(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def conj(self) -> "ComplexField":
        return ComplexField(self.re, -self.im)

    def abs2(self) -> ScalarField:
        return self.re * self.re + self.im * self.im

    def diff(self, var: str) -> "ComplexField":
        return ComplexField(diff(self.re, var), diff(self.im, var))

    def _wirtinger(self, real: str, imag: str, conjugate: bool) -> "ComplexField":
        a_r, a_i = self.re.diff(real), self.re.diff(imag)
        b_r, b_i = self.im.diff(real), self.im.diff(imag)
        half = _HALF
        if conjugate:
            return ComplexField(half * (a_r - b_i), half * (b_r + a_i))
        return ComplexField(half * (a_r + b_i), half * (b_r - a_i))

    def dz(self) -> "ComplexField":
        return self._wirtinger("x", "y", False)

    def dzbar(self) -> "ComplexField":
        return self._wirtinger("x", "y", True)

    def dw(self) -> "ComplexField":
        return self._wirtinger("u", "v", False)

    def dwbar(self) -> "ComplexField":
        return self._wirtinger("u", "v", True)

    def evaluate(self, points) -> Union[complex, np.ndarray]:
        re, im = evaluate(self.re, points), evaluate(self.im, points)
        if isinstance(re, float):
            return complex(re, im)
        return re + 1j * im


Z = ComplexField(X, Y)
W = ComplexField(U, V)


def set_max_order(order: int):
    """Sets the process wide maximal derivative order (default 12)."""
    if order < 2:
        raise ValueError("The maximal derivative order must be at least 2.")
    defaults.max_order = int(order)


def wirtinger(
    f: Union[ScalarField, ComplexField],
    a_z: int = 0,
    b_zbar: int = 0,
    a_w: int = 0,
    b_wbar: int = 0,
    max_order: Optional[int] = None,
) -> ComplexField:
    """The iterated Wirtinger derivative d_z^a_z d_zbar^b_zbar d_w^a_w d_wbar^b_wbar f.

    The operators are built from real partials, d_z = (d_x - i d_y)/2 and
    d_zbar = (d_x + i d_y)/2, likewise in w.

    Raises:
        OrderLimitError: If the total order exceeds the maximal order.
    """
    limit = defaults.max_order if max_order is None else max_order
    counts = (a_z, b_zbar, a_w, b_wbar)
    if any(c < 0 for c in counts):
        raise ValueError("Derivative orders must be non-negative.")
    if sum(counts) > limit:
        raise OrderLimitError(f"Derivative order {sum(counts)} exceeds the maximum {limit}.")
    result = ComplexField._lift(f)
    for _ in range(a_z):
        result = result.dz()
    for _ in range(b_zbar):
        result = result.dzbar()
    for _ in range(a_w):
        result = result.dw()
    for _ in range(b_wbar):
        result = result.dwbar()
    return result


# endregion

### HOLOMORPHIC MAPS ###
# region
Coefficient = Union[Number, complex, Tuple[Number, Number]]


def _coefficient_value(c: Coefficient) -> complex:
    if isinstance(c, tuple):
        return complex(float(c[0]), float(c[1]))
    return complex(c)


@dataclass(frozen=True)
class HoloMap:
    """A holomorphic polynomial map (z, w) -> (z', w') of degree at most 2.

    The components are given as mappings from exponent pairs (a, b) to the
    coefficient of z^a w^b. Coefficients are numbers, complex numbers or pairs
    (re, im) of exact numbers.
    """

    z: Mapping[Tuple[int, int], Coefficient]
    w: Mapping[Tuple[int, int], Coefficient]

    def __post_init__(self):
        for component in (self.z, self.w):
            for a, b in component:
                if a < 0 or b < 0 or a + b > 2:
                    raise ValueError("Holomorphic maps are limited to degree 2.")

    @classmethod
    def identity(cls) -> "HoloMap":
        return cls({(1, 0): 1}, {(0, 1): 1})

    def _component_field(self, coefficients) -> ComplexField:
        total = ComplexField(const_field(0))
        for (a, b), c in sorted(coefficients.items()):
            monomial = ComplexField(const_field(1))
            for _ in range(a):
                monomial = monomial * Z
            for _ in range(b):
                monomial = monomial * W
            re, im = _complex_parts(c)
            total = total + monomial * ComplexField(ScalarField(re), ScalarField(im))
        return total

    def fields(self) -> Tuple[ComplexField, ComplexField]:
        return self._component_field(self.z), self._component_field(self.w)

    def apply(self, points) -> np.ndarray:
        """Maps points (x, y, u, v) numerically."""
        pts, single = as_points(points)
        z = pts[:, 0] + 1j * pts[:, 1]
        w = pts[:, 2] + 1j * pts[:, 3]
        out = []
        for coefficients in (self.z, self.w):
            value = np.zeros_like(z)
            for (a, b), c in coefficients.items():
                value = value + _coefficient_value(c) * z**a * w**b
            out.append(value)
        result = np.stack([out[0].real, out[0].imag, out[1].real, out[1].imag], axis=1)
        return result[0] if single else result

    def jacobian(self) -> np.ndarray:
        """The complex Jacobian at the origin, rows (z', w'), columns (d/dz, d/dw)."""
        jac = np.zeros((2, 2), dtype=complex)
        for row, coefficients in enumerate((self.z, self.w)):
            for col, key in enumerate(((1, 0), (0, 1))):
                jac[row, col] = _coefficient_value(coefficients.get(key, 0))
        return jac


def compose_holo(f: ScalarField, phi: HoloMap) -> ScalarField:
    """The field f o phi with real and imaginary parts expanded into x, y, u, v."""
    new_z, new_w = phi.fields()
    return substitute(f, {"x": new_z.re, "y": new_z.im, "u": new_w.re, "v": new_w.im})


# endregion

### DSL ###
# region
_TOKEN_PATTERN = re.compile(
    r"""
    (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
    |(?P<param>\$[A-Za-z_]\w*)
    |(?P<name>[A-Za-z_]\w*)
    |(?P<op>[-+*/^()])
    |(?P<space>\s+)
    """,
    re.VERBOSE,
)

_MACROS = {
    "absz2": lambda: add(power(variable("x"), 2), power(variable("y"), 2)),
    "absw2": lambda: add(power(variable("u"), 2), power(variable("v"), 2)),
    "pi": lambda: constant(math.pi),
}


def _tokenize(source: str) -> List[Tuple[str, str, int]]:
    normalized = source.replace("−", "-").replace("·", "*")
    tokens, position = [], 0
    while position < len(normalized):
        match = _TOKEN_PATTERN.match(normalized, position)
        if match is None:
            raise DslSyntaxError(
                f"Unexpected character '{normalized[position]}'", source, position
            )
        kind = match.lastgroup
        if kind != "space":
            tokens.append((kind, match.group(kind), position))
        position = match.end()
    tokens.append(("end", "", len(normalized)))
    return tokens


class _Parser:
    def __init__(self, source: str, params: Mapping[str, Any]):
        self.source = source
        self.params = params
        self.tokens = _tokenize(source)
        self.index = 0

    @property
    def current(self):
        return self.tokens[self.index]

    def _error(self, message: str):
        raise DslSyntaxError(message, self.source, self.current[2])

    def _advance(self):
        token = self.current
        self.index += 1
        return token

    def _accept(self, text: str) -> bool:
        if self.current[0] == "op" and self.current[1] == text:
            self.index += 1
            return True
        return False

    def _expect(self, text: str):
        if not self._accept(text):
            self._error(f"Expected '{text}'")

    def parse(self) -> Node:
        node = self._expression()
        if self.current[0] != "end":
            self._error(f"Unexpected token '{self.current[1]}'")
        return node

    def _expression(self) -> Node:
        node = self._term()
        while True:
            if self._accept("+"):
                node = add(node, self._term())
            elif self._accept("-"):
                node = sub(node, self._term())
            else:
                return node

    def _term(self) -> Node:
        node = self._unary()
        while True:
            if self._accept("*"):
                node = mul(node, self._unary())
            elif self._accept("/"):
                node = div(node, self._unary())
            else:
                return node

    def _unary(self) -> Node:
        if self._accept("-"):
            return neg(self._unary())
        if self._accept("+"):
            return self._unary()
        return self._power()

    def _power(self) -> Node:
        base = self._atom()
        if self._accept("^"):
            return power(base, self._exponent())
        return base

    def _exponent(self) -> int:
        parenthesized = self._accept("(")
        sign = -1 if self._accept("-") else 1
        if not sign < 0:
            self._accept("+")
        kind, text, _ = self.current
        if kind == "number" and re.fullmatch(r"\d+", text):
            value = int(text)
        elif kind == "param":
            bound = self._param_value(text[1:])
            if Fraction(bound) != int(Fraction(bound)):
                self._error(f"The exponent parameter '{text}' is not an integer")
            value = int(Fraction(bound))
        else:
            self._error("Integer exponent expected")
        self._advance()
        if parenthesized:
            self._expect(")")
        return sign * value

    def _param_value(self, name: str):
        if name not in self.params:
            raise UnboundParameterError(name)
        return self.params[name]

    def _atom(self) -> Node:
        kind, text, _ = self.current
        if kind == "number":
            self._advance()
            return constant(Fraction(text))
        if kind == "param":
            self._advance()
            value = self._param_value(text[1:])
            if isinstance(value, str):
                value = Fraction(value)
            return constant(value)
        if kind == "name":
            self._advance()
            if text in VARIABLE_INDEX:
                return variable(text)
            if text in _MACROS:
                return _MACROS[text]()
            if text in FUNCTIONS:
                self._expect("(")
                argument = self._expression()
                self._expect(")")
                return function(text, argument)
            self.index -= 1
            self._error(f"Unknown name '{text}'")
        if self._accept("("):
            node = self._expression()
            self._expect(")")
            return node
        self._error(f"Unexpected token '{text}'" if text else "Unexpected end of input")
        return None  # unreachable


def parse_field(
    src: str, params: Optional[Mapping[str, Any]] = None, region: Optional[Box] = None
) -> ScalarField:
    """Parses a DSL text into a field.

    The grammar knows the variables x, y, u, v, the operators + - * / and ^ with
    integer exponents, the functions ln, cos, sin, tan, exp, sqrt, parentheses,
    parameters $name and the macros absz2 = x^2+y^2, absw2 = u^2+v^2 and pi.

    Args:
        src (str): The DSL text.
        params (Mapping[str, Any], optional): Values of the parameters. Defaults to None.
        region (Box, optional): The domain of validity. Defaults to None.

    Raises:
        DslSyntaxError: If the text does not conform to the grammar.
        UnboundParameterError: If a parameter has no value.

    Returns:
        ScalarField: The parsed field.
    """
    return ScalarField(_Parser(src, params or {}).parse(), region)


_PRECEDENCE = {"add": 1, "mul": 2, "div": 2, "neg": 3, "pow": 4}


def _format_constant(value) -> Tuple[str, int]:
    if isinstance(value, Fraction):
        if value.denominator == 1:
            text = str(value.numerator)
            return (text, 5) if value >= 0 else (f"({text})", 5)
        return f"({value.numerator}/{value.denominator})", 5
    text = format(value, ".17g")
    return (text, 5) if value >= 0 else (f"({text})", 5)


def to_dsl(f: ScalarField, max_length: int = 200000) -> str:
    """Re-emits a field as DSL text (shared subexpressions are written out).

    Raises:
        ExpressionTooLarge: If the text would exceed max_length characters or the
            field contains nodes the DSL cannot express.
    """
    texts: Dict[int, Tuple[str, int]] = {}

    def wrap(node: Node, level: int) -> str:
        text, precedence = texts[node.uid]
        return text if precedence > level else f"({text})"

    for node in topological(f.node):
        op = node.op
        if op == "const":
            texts[node.uid] = _format_constant(node.payload)
        elif op == "var":
            texts[node.uid] = (node.payload, 5)
        elif op == "add":
            a, b = node.args
            if b.op == "neg":
                texts[node.uid] = (f"{wrap(a, 0)} - {wrap(b.args[0], 1)}", 1)
            elif a.op == "neg":
                texts[node.uid] = (f"{wrap(b, 0)} - {wrap(a.args[0], 1)}", 1)
            else:
                texts[node.uid] = (f"{wrap(a, 0)} + {wrap(b, 0)}", 1)
        elif op == "mul":
            texts[node.uid] = (f"{wrap(node.args[0], 1)}*{wrap(node.args[1], 2)}", 2)
        elif op == "div":
            texts[node.uid] = (f"{wrap(node.args[0], 1)}/{wrap(node.args[1], 2)}", 2)
        elif op == "neg":
            texts[node.uid] = (f"-{wrap(node.args[0], 3)}", 3)
        elif op == "pow":
            n = node.payload
            exponent = str(n) if n >= 0 else f"(-{-n})"
            texts[node.uid] = (f"{wrap(node.args[0], 4)}^{exponent}", 4)
        elif op in FUNCTIONS:
            texts[node.uid] = (f"{op}({texts[node.args[0].uid][0]})", 5)
        else:
            raise ExpressionTooLarge(f"Nodes of type '{op}' have no DSL form.")
        if len(texts[node.uid][0]) > max_length:
            raise ExpressionTooLarge(
                f"The DSL form exceeds {max_length} characters, use the graph form."
            )
    return texts[f.node.uid][0]


def field_to_json(f: ScalarField) -> dict:
    """The lossless node table of a field."""
    order = topological(f.node)
    index = {node.uid: i for i, node in enumerate(order)}
    nodes = []
    for node in order:
        payload = node.payload
        if isinstance(payload, Fraction):
            payload = {"fraction": f"{payload.numerator}/{payload.denominator}"}
        elif isinstance(payload, float):
            payload = {"float": repr(payload)}
        nodes.append([node.op, payload, [index[a.uid] for a in node.args]])
    region = None
    if f.region is not None:
        region = {
            "lower": [repr(c) for c in f.region.lower],
            "upper": [repr(c) for c in f.region.upper],
            "closed": f.region.closed,
        }
    return {"format": "pshlab-graph/1", "nodes": nodes, "root": len(order) - 1, "region": region}


def field_from_json(data: dict) -> ScalarField:
    built: List[Node] = []
    for op, payload, args in data["nodes"]:
        if isinstance(payload, dict) and "fraction" in payload:
            payload = Fraction(payload["fraction"])
        elif isinstance(payload, dict) and "float" in payload:
            payload = float(payload["float"])
        operands = [built[i] for i in args]
        if op == "const":
            built.append(constant(payload))
        elif op == "var":
            built.append(variable(payload))
        else:
            built.append(rebuild(_intern(op, payload, tuple(operands)), operands))
    region = None
    if data.get("region"):
        region = Box(
            tuple(float(c) for c in data["region"]["lower"]),
            tuple(float(c) for c in data["region"]["upper"]),
            bool(data["region"]["closed"]),
        )
    return ScalarField(built[data["root"]], region)


# endregion
