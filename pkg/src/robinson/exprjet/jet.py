"""Second-order jets over a real coordinate chart.

A :class:`Jet2` carries the value, gradient and Hessian of a complex-valued
function with respect to the real coordinates of a chart.  Arithmetic on jets
applies the sum, product and chain rules, so evaluating an expression tree on
seeded coordinate jets yields exact partial derivatives up to rounding.

A jet may be truncated at order one (``hess is None``); any operation with a
truncated operand returns a truncated result.
"""

from __future__ import annotations

import cmath
from numbers import Number

import numpy as np


class DomainError(ArithmeticError):
    """Raised when an operation is evaluated outside its domain."""

    def __init__(self, message, subexpression=None):
        super().__init__(message if subexpression is None else f"{message} in '{subexpression}'")
        self.subexpression = subexpression


class Jet2:
    __slots__ = ("value", "grad", "hess")

    def __init__(self, value, grad, hess=None):
        self.value = complex(value)
        self.grad = grad
        self.hess = hess

    @classmethod
    def constant(cls, value, dim, order=2):
        grad = np.zeros(dim, dtype=complex)
        hess = np.zeros((dim, dim), dtype=complex) if order >= 2 else None
        return cls(value, grad, hess)

    @classmethod
    def variable(cls, value, index, dim, order=2):
        jet = cls.constant(value, dim, order)
        jet.grad[index] = 1.0
        return jet

    @property
    def dim(self):
        return self.grad.shape[0]

    @property
    def order(self):
        return 1 if self.hess is None else 2

    def truncate(self):
        return Jet2(self.value, self.grad, None)

    # --- arithmetic -----------------------------------------------------

    def __add__(self, other):
        if isinstance(other, Jet2):
            hess = None if self.hess is None or other.hess is None else self.hess + other.hess
            return Jet2(self.value + other.value, self.grad + other.grad, hess)
        if isinstance(other, Number):
            return Jet2(self.value + other, self.grad, self.hess)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet2(-self.value, -self.grad, None if self.hess is None else -self.hess)

    def __sub__(self, other):
        if isinstance(other, (Jet2, Number)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet2):
            a, b = self, other
            grad = a.value * b.grad + b.value * a.grad
            if a.hess is None or b.hess is None:
                hess = None
            else:
                cross = np.multiply.outer(a.grad, b.grad)
                hess = a.value * b.hess + b.value * a.hess + (cross + cross.T)
            return Jet2(a.value * b.value, grad, hess)
        if isinstance(other, Number):
            return Jet2(self.value * other, self.grad * other,
                        None if self.hess is None else self.hess * other)
        return NotImplemented

    __rmul__ = __mul__

    def reciprocal(self):
        v = self.value
        if v == 0:
            raise DomainError("division by zero")
        inv = 1.0 / v
        return self._chain(inv, -inv * inv, 2.0 * inv * inv * inv)

    def __truediv__(self, other):
        if isinstance(other, Jet2):
            return self * other.reciprocal()
        if isinstance(other, Number):
            if other == 0:
                raise DomainError("division by zero")
            return self * (1.0 / other)
        return NotImplemented

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, n):
        if not isinstance(n, (int, np.integer)):
            raise TypeError("jets support integer powers only; use exp/log otherwise")
        if n < 0:
            return (self ** (-n)).reciprocal()
        result = Jet2.constant(1.0, self.dim, self.order)
        for _ in range(n):
            result = result * self
        return result

    def _chain(self, f0, f1, f2):
        grad = f1 * self.grad
        if self.hess is None:
            return Jet2(f0, grad, None)
        return Jet2(f0, grad, f1 * self.hess + f2 * np.multiply.outer(self.grad, self.grad))

    def conj(self):
        return Jet2(self.value.conjugate(), self.grad.conj(),
                    None if self.hess is None else self.hess.conj())

    def __repr__(self):
        return f"Jet2(value={self.value!r}, grad={self.grad!r}, order={self.order})"


def lift(x, dim, order=2):
    """Promote a number to a constant jet; jets pass through."""
    if isinstance(x, Jet2):
        return x
    return Jet2.constant(x, dim, order)


def exp(a):
    if not isinstance(a, Jet2):
        return cmath.exp(a)
    e = cmath.exp(a.value)
    return a._chain(e, e, e)


def log(a):
    if not isinstance(a, Jet2):
        if a == 0:
            raise DomainError("log of zero")
        return cmath.log(a)
    v = a.value
    if v == 0:
        raise DomainError("log of zero")
    inv = 1.0 / v
    return a._chain(cmath.log(v), inv, -inv * inv)


def sqrt(a):
    if not isinstance(a, Jet2):
        return cmath.sqrt(a)
    v = a.value
    if v == 0:
        raise DomainError("sqrt is not differentiable at zero")
    s = cmath.sqrt(v)
    return a._chain(s, 0.5 / s, -0.25 / (s * v))


def sin(a):
    if not isinstance(a, Jet2):
        return cmath.sin(a)
    s, c = cmath.sin(a.value), cmath.cos(a.value)
    return a._chain(s, c, -s)


def cos(a):
    if not isinstance(a, Jet2):
        return cmath.cos(a)
    s, c = cmath.sin(a.value), cmath.cos(a.value)
    return a._chain(c, -s, -c)


def conj(a):
    if isinstance(a, Jet2):
        return a.conj()
    return complex(a).conjugate()


def re(a):
    if isinstance(a, Jet2):
        return Jet2(a.value.real, a.grad.real.astype(complex),
                    None if a.hess is None else a.hess.real.astype(complex))
    return complex(complex(a).real)


def im(a):
    if isinstance(a, Jet2):
        return Jet2(a.value.imag, a.grad.imag.astype(complex),
                    None if a.hess is None else a.hess.imag.astype(complex))
    return complex(complex(a).imag)


FUNCTIONS = {
    "exp": exp,
    "log": log,
    "sqrt": sqrt,
    "sin": sin,
    "cos": cos,
    "conj": conj,
    "re": re,
    "im": im,
}


def compose(outer, inner):
    """Chain rule for jets: ``outer`` is a jet in variables ``q``, ``inner``
    lists jets of ``q_k`` as functions of ``p``.

    The result is a jet in ``p``.  It has order two only when ``outer`` and
    every inner jet carry Hessians.
    """
    jac = np.array([j.grad for j in inner])          # (len q, dim p)
    grad = jac.T @ outer.grad
    if outer.hess is None or any(j.hess is None for j in inner):
        return Jet2(outer.value, grad, None)
    hess = jac.T @ outer.hess @ jac
    for k, j in enumerate(inner):
        hess = hess + outer.grad[k] * j.hess
    return Jet2(outer.value, grad, 0.5 * (hess + hess.T))
