"""Charts and parsed expressions evaluated to jets."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from . import jet as J
from .jet import DomainError, Jet2
from .parser import (BinOp, Call, ImagUnit, Neg, Num, Pow, Sym, contains_nonholomorphic,
                     parse_tree, to_text)


@dataclass(frozen=True)
class Chart:
    """A real coordinate chart with derived complex coordinates.

    ``complex_pairs`` holds ``(index_x, index_y, name)`` triples declaring
    ``name = x + i*y``.
    """

    name: str
    coord_names: tuple
    complex_pairs: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "coord_names", tuple(self.coord_names))
        object.__setattr__(self, "complex_pairs", tuple(tuple(p) for p in self.complex_pairs))
        names = self.coord_names
        if len(set(names)) != len(names):
            raise ValueError(f"chart {self.name}: coordinate names must be distinct")
        if "i" in names:
            raise ValueError("'i' is reserved for the imaginary unit")
        for ix, iy, cname in self.complex_pairs:
            if ix == iy or not (0 <= ix < len(names) and 0 <= iy < len(names)):
                raise ValueError(f"chart {self.name}: bad complex pair {cname}")
            if cname in names:
                raise ValueError(f"chart {self.name}: complex name {cname} clashes with a coordinate")

    @property
    def dim(self):
        return len(self.coord_names)

    def index(self, name):
        return self.coord_names.index(name)

    def pair(self, cname):
        for p in self.complex_pairs:
            if p[2] == cname:
                return p
        raise KeyError(f"chart {self.name} has no complex coordinate {cname}")

    @property
    def names(self):
        return set(self.coord_names) | {p[2] for p in self.complex_pairs}

    def seed(self, point, order=2):
        """Variable jets for every coordinate and derived complex coordinate."""
        point = np.asarray(point, dtype=float)
        if point.shape != (self.dim,):
            raise ValueError(f"point must have length {self.dim}")
        env = {n: Jet2.variable(point[k], k, self.dim, order)
               for k, n in enumerate(self.coord_names)}
        for ix, iy, cname in self.complex_pairs:
            env[cname] = env[self.coord_names[ix]] + 1j * env[self.coord_names[iy]]
        return env

    def extended(self, name, position, coord):
        """A new chart with ``coord`` inserted at ``position``."""
        names = list(self.coord_names)
        names.insert(position, coord)
        shift = lambda k: k + 1 if k >= position else k
        pairs = [(shift(ix), shift(iy), c) for ix, iy, c in self.complex_pairs]
        return Chart(name, tuple(names), tuple(pairs))


def _eval(node, env, dim, order):
    if isinstance(node, Num):
        v = node.value
        return v.real if isinstance(v, complex) and v.imag == 0 else v
    if isinstance(node, ImagUnit):
        return 1j
    if isinstance(node, Sym):
        return env[node.name]
    if isinstance(node, BinOp):
        a = _eval(node.left, env, dim, order)
        b = _eval(node.right, env, dim, order)
        try:
            if node.op == "+":
                return a + b
            if node.op == "-":
                return a - b
            if node.op == "*":
                return a * b
            if isinstance(b, Jet2):
                return a * b.reciprocal() if isinstance(a, Jet2) else b.reciprocal() * a
            if b == 0:
                raise DomainError("division by zero")
            return a / b
        except DomainError as err:
            raise DomainError(str(err).split(" in '")[0], to_text(node)) from None
    if isinstance(node, Neg):
        return -_eval(node.operand, env, dim, order)
    if isinstance(node, Pow):
        b = _eval(node.base, env, dim, order)
        try:
            if isinstance(b, Jet2):
                return b ** node.exponent
            result = 1.0
            for _ in range(abs(node.exponent)):
                result = result * b
            if node.exponent < 0:
                if result == 0:
                    raise DomainError("division by zero")
                result = 1.0 / result
            return result
        except DomainError as err:
            raise DomainError(str(err).split(" in '")[0], to_text(node)) from None
    if isinstance(node, Call):
        a = _eval(node.arg, env, dim, order)
        try:
            return J.FUNCTIONS[node.func](a)
        except DomainError as err:
            raise DomainError(str(err).split(" in '")[0], to_text(node)) from None
    raise TypeError(f"not an expression node: {node!r}")


@dataclass(frozen=True)
class Expression:
    """An immutable parsed expression.

    ``names`` lists the identifiers it may reference; ``params`` binds
    parameter identifiers to constants.
    """

    tree: object
    names: frozenset = frozenset()
    params: Mapping = field(default_factory=dict)

    def __str__(self):
        return to_text(self.tree)

    @property
    def holomorphic_form(self):
        """True when no conj/re/im node appears."""
        return not contains_nonholomorphic(self.tree)

    def evaluate(self, env, dim=None, order=2):
        """Evaluate with identifiers bound by ``env`` (jets or numbers)."""
        full = dict(self.params)
        full.update(env)
        if dim is None:
            dim = next((v.dim for v in full.values() if isinstance(v, Jet2)), 0)
        return _eval(self.tree, full, dim, order)

    def jet(self, chart, point, order=2):
        """Value and partial derivatives at ``point`` of ``chart``."""
        out = self.evaluate(chart.seed(point, order), chart.dim, order)
        out = J.lift(out, chart.dim, order)
        if not (np.isfinite(out.value) and np.all(np.isfinite(out.grad))):
            raise DomainError("non-finite value", str(self))
        return out

    def value(self, chart, point):
        point = np.asarray(point, dtype=float)
        env = {n: complex(point[k]) for k, n in enumerate(chart.coord_names)}
        for ix, iy, cname in chart.complex_pairs:
            env[cname] = complex(point[ix], point[iy])
        return complex(self.evaluate(env, 0))

    def __call__(self, chart, point, order=2):
        return self.jet(chart, point, order)


def parse(text, chart=None, params=None, variables=(), definitions=None):
    """Parse ``text``; identifiers may be chart coordinates, declared complex
    coordinates, parameters, extra ``variables`` or named ``definitions``."""
    params = dict(params or {})
    names = set(variables) | set(params)
    if chart is not None:
        names |= chart.names
    defs = {k: (v.tree if isinstance(v, Expression) else v) for k, v in (definitions or {}).items()}
    tree = parse_tree(text, names, defs)
    return Expression(tree, frozenset(names), params)


def constant(value):
    return Expression(Num(complex(value)))


def eval_jet2(expr, chart, point):
    return expr.jet(chart, point, 2)


def wirtinger(expr, chart, point, pair):
    """``(d/dw, d/dwbar)`` of ``expr`` for the complex coordinate ``pair``
    (a name or an ``(ix, iy, name)`` triple)."""
    if isinstance(pair, str):
        pair = chart.pair(pair)
    ix, iy, _ = pair
    g = expr.jet(chart, point, order=1).grad
    return 0.5 * (g[ix] - 1j * g[iy]), 0.5 * (g[ix] + 1j * g[iy])


def finite_difference_jet(expr, chart, point, h=1e-5):
    """Central-difference gradient and Hessian; an independent oracle for
    :func:`eval_jet2`."""
    point = np.asarray(point, dtype=float)
    n = chart.dim
    f = lambda q: expr.value(chart, q)
    grad = np.zeros(n, dtype=complex)
    hess = np.zeros((n, n), dtype=complex)
    f0 = f(point)
    for a in range(n):
        ea = np.zeros(n)
        ea[a] = h
        fp, fm = f(point + ea), f(point - ea)
        grad[a] = (fp - fm) / (2 * h)
        hess[a, a] = (fp - 2 * f0 + fm) / (h * h)
        for b in range(a + 1, n):
            eb = np.zeros(n)
            eb[b] = h
            hess[a, b] = hess[b, a] = (f(point + ea + eb) - f(point + ea - eb)
                                       - f(point - ea + eb) + f(point - ea - eb)) / (4 * h * h)
    return f0, grad, hess
