"""Symmetric weights M(x, y) on [0, inf)^2 and a small expression language.

Expression grammar (infix, Python precedence)::

    expr   := expr ('+' | '-' | '*' | '/' | '^' | '**') expr
            | '-' expr | '(' expr ')' | call | 'x' | 'y' | number | 'pi' | 'e'
    call   := ('pow' | 'min' | 'max') '(' expr ',' expr ')'
            | ('sqrt' | 'log' | 'exp' | 'abs') '(' expr ')'

``^`` is exponentiation. Example: ``"max(x, y)^0.5"``.
"""

from __future__ import annotations

import ast
import operator
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import means
from ._util import call_weight, scalar_or_array

_BINOPS = {
    ast.Add: operator.add,
    ast.Sub: operator.sub,
    ast.Mult: operator.mul,
    ast.Div: operator.truediv,
    ast.Pow: np.power,
}
_FUNCS = {
    "pow": (2, np.power),
    "min": (2, np.minimum),
    "max": (2, np.maximum),
    "sqrt": (1, np.sqrt),
    "log": (1, np.log),
    "exp": (1, np.exp),
    "abs": (1, np.abs),
}
_CONSTS = {"pi": np.pi, "e": np.e}


class ExpressionError(ValueError):
    pass


def parse_expression(text: str) -> Callable:
    """Compile a weight expression in ``x`` and ``y`` to a vectorized callable."""
    try:
        tree = ast.parse(text.replace("^", "**"), mode="eval")
    except SyntaxError as exc:
        raise ExpressionError(f"cannot parse {text!r}: {exc.msg}") from None

    def build(node):
        if isinstance(node, ast.Expression):
            return build(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
            v = float(node.value)
            return lambda x, y: v
        if isinstance(node, ast.Name):
            if node.id == "x":
                return lambda x, y: x
            if node.id == "y":
                return lambda x, y: y
            if node.id in _CONSTS:
                v = _CONSTS[node.id]
                return lambda x, y: v
            raise ExpressionError(f"unknown name {node.id!r}")
        if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
            op = _BINOPS[type(node.op)]
            a, b = build(node.left), build(node.right)
            return lambda x, y: op(a(x, y), b(x, y))
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            a = build(node.operand)
            sign = -1.0 if isinstance(node.op, ast.USub) else 1.0
            return lambda x, y: sign * a(x, y)
        if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and not node.keywords:
            name = node.func.id
            if name not in _FUNCS:
                raise ExpressionError(f"unknown function {name!r}")
            arity, fn = _FUNCS[name]
            if len(node.args) != arity:
                raise ExpressionError(f"{name} takes {arity} argument(s)")
            args = [build(a) for a in node.args]
            return lambda x, y: fn(*(g(x, y) for g in args))
        raise ExpressionError(f"unsupported syntax in {text!r}")

    body = build(tree)

    def evaluate(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        with np.errstate(all="ignore"):
            out = np.asarray(body(x, y), dtype=float)
        return np.broadcast_to(out, np.broadcast(x, y).shape).copy()

    return evaluate


@dataclass
class WeightFunction:
    """A symmetric nonnegative weight with optional declared properties.

    Symmetry, and homogeneity when a degree is declared, are spot-checked on
    construction with a fixed sample; a failed check raises ``ValueError``.
    """

    evaluate: Callable
    homogeneity_degree: Optional[float] = None
    quasimean_exponent: Optional[float] = None
    label: str = "M"
    validate: bool = field(default=True, repr=False)

    def __post_init__(self):
        if self.validate:
            self._spot_check()

    def _spot_check(self):
        rng = np.random.default_rng(20240917)
        a = np.exp(rng.uniform(-5, 5, 64))
        b = np.exp(rng.uniform(-5, 5, 64))
        ab, ba = call_weight(self.evaluate, a, b), call_weight(self.evaluate, b, a)
        ok = np.isclose(ab, ba, rtol=1e-12, atol=0) | (np.isnan(ab) & np.isnan(ba))
        if not ok.all():
            i = int(np.argmin(ok))
            raise ValueError(f"{self.label} is not symmetric at ({a[i]:g}, {b[i]:g})")
        if self.homogeneity_degree is not None:
            t = np.exp(rng.uniform(-3, 3, 64))
            lhs = call_weight(self.evaluate, t * a, t * b)
            rhs = t**self.homogeneity_degree * ab
            if not np.allclose(lhs, rhs, rtol=1e-10, atol=0):
                raise ValueError(f"{self.label} is not {self.homogeneity_degree}-homogeneous")

    def __call__(self, x, y):
        return scalar_or_array(call_weight(self.evaluate, x, y))

    # constructors

    @classmethod
    def from_expression(cls, text: str, **kw) -> "WeightFunction":
        kw.setdefault("label", text)
        return cls(parse_expression(text), **kw)

    @classmethod
    def constant(cls, c: float = 1.0) -> "WeightFunction":
        c = float(c)
        return cls(lambda x, y: np.full(np.broadcast(x, y).shape, c), homogeneity_degree=0.0,
                   label=f"{c:g}")

    @classmethod
    def power_mean(cls, p: float) -> "WeightFunction":
        return cls(lambda x, y: means.power_mean(p, x, y), homogeneity_degree=1.0,
                   quasimean_exponent=1.0, label=f"A_{p:g}")

    @classmethod
    def s_quasimean(cls, p: float) -> "WeightFunction":
        return cls(lambda x, y: means.s_quasimean(p, x, y), homogeneity_degree=p,
                   quasimean_exponent=p, label=f"S_{p:g}")

    @classmethod
    def pq(cls, p: float, q: float) -> "WeightFunction":
        """(x^p + y^p)^(q/p); p = inf (or p > 1e6) means max(x, y)^q."""
        return cls(lambda x, y: pq_weight(p, q, x, y), homogeneity_degree=q,
                   label=f"pq({p:g},{q:g})")

    @classmethod
    def product(cls, f: Callable, label: str = "f(x)f(y)") -> "WeightFunction":
        def ev(x, y):
            return _apply1(f, x) * _apply1(f, y)
        return cls(ev, label=label)

    @classmethod
    def spherical(cls) -> "WeightFunction":
        return cls.product(lambda t: np.sqrt(1.0 + t * t), label="sqrt(1+x^2)sqrt(1+y^2)")

    def power(self, e: float) -> "WeightFunction":
        h = None if self.homogeneity_degree is None else self.homogeneity_degree * e
        qm = None if self.quasimean_exponent is None else self.quasimean_exponent * e
        base = self.evaluate
        return WeightFunction(lambda x, y: call_weight(base, x, y) ** e, h, qm,
                              f"({self.label})^{e:g}", validate=False)

    def scaled(self, c: float) -> "WeightFunction":
        base = self.evaluate
        return WeightFunction(lambda x, y: c * call_weight(base, x, y), self.homogeneity_degree,
                              None, f"{c:g}*{self.label}", validate=False)


def _apply1(f, t):
    t = np.asarray(t, dtype=float)
    try:
        with np.errstate(all="ignore"):
            out = np.asarray(f(t), dtype=float)
        if out.shape == t.shape:
            return out
        if out.ndim == 0:
            return np.full(t.shape, float(out))
    except (TypeError, ValueError):
        pass
    return np.vectorize(lambda s: float(f(float(s))), otypes=[float])(t)


# Finite p above this are evaluated through the max branch.
LARGE_P = 1e6


def pq_weight(p: float, q: float, x, y):
    """(x^p + y^p)^(q/p) evaluated without overflow."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if q == 0:
        return np.ones(np.broadcast(x, y).shape)
    hi = np.maximum(x, y)
    lo = np.minimum(x, y)
    if p == np.inf or p > LARGE_P:
        return hi**q
    with np.errstate(all="ignore"):
        ratio = np.where(hi > 0, lo / np.where(hi > 0, hi, 1.0), 0.0)
        return hi**q * (1.0 + ratio**p) ** (q / p)
