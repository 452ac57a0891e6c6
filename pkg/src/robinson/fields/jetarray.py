"""Jets of whole arrays.

A :class:`JetArray` stores the value of an array-valued function together
with its first and second partial derivatives.  Derivative axes come first:
``g[a, ...]`` is the derivative along coordinate ``a`` and ``h[a, b, ...]``
the second derivative, so ordinary numpy broadcasting over the value axes
works unchanged.  ``order`` is 0, 1 or 2 depending on which parts are present.
"""

from __future__ import annotations

from itertools import combinations

import numpy as np

from ..exprjet import Jet2

_DERIV = "YZ"


class JetArray:
    __slots__ = ("v", "g", "h")

    def __init__(self, v, g=None, h=None):
        self.v = np.asarray(v, dtype=complex)
        self.g = None if g is None else np.asarray(g, dtype=complex)
        self.h = None if h is None or g is None else np.asarray(h, dtype=complex)

    # --- construction ---------------------------------------------------

    @classmethod
    def constant(cls, v, dim, order=2):
        v = np.asarray(v, dtype=complex)
        g = np.zeros((dim,) + v.shape, complex) if order >= 1 else None
        h = np.zeros((dim, dim) + v.shape, complex) if order >= 2 else None
        return cls(v, g, h)

    @classmethod
    def from_jets(cls, items, dim, order=2, shape=None):
        """Stack scalar jets (or plain numbers) into an array jet."""
        items = list(items)
        n = len(items)
        v = np.zeros(n, complex)
        g = np.zeros((dim, n), complex) if order >= 1 else None
        h = np.zeros((dim, dim, n), complex) if order >= 2 else None
        for k, it in enumerate(items):
            if isinstance(it, Jet2):
                v[k] = it.value
                if g is not None:
                    g[:, k] = it.grad
                if h is not None:
                    if it.hess is None:
                        raise ValueError("second-order jet requested from a first-order component")
                    h[:, :, k] = it.hess
            else:
                v[k] = it
        out = cls(v, g, h)
        return out.reshape(shape) if shape is not None else out

    @property
    def order(self):
        return 0 if self.g is None else (1 if self.h is None else 2)

    @property
    def dim(self):
        return None if self.g is None else self.g.shape[0]

    @property
    def shape(self):
        return self.v.shape

    def truncate(self, order):
        return JetArray(self.v, self.g if order >= 1 else None, self.h if order >= 2 else None)

    def reshape(self, shape):
        shape = tuple(shape)
        g = None if self.g is None else self.g.reshape(self.g.shape[:1] + shape)
        h = None if self.h is None else self.h.reshape(self.h.shape[:2] + shape)
        return JetArray(self.v.reshape(shape), g, h)

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        g = None if self.g is None else self.g[(slice(None),) + idx]
        h = None if self.h is None else self.h[(slice(None), slice(None)) + idx]
        return JetArray(self.v[idx], g, h)

    def scatter(self, idx, n):
        """Sum entries along the first value axis into ``n`` bins."""
        v = np.zeros((n,) + self.v.shape[1:], complex)
        np.add.at(v, idx, self.v)
        g = h = None
        if self.g is not None:
            g = np.zeros((self.g.shape[0], n) + self.v.shape[1:], complex)
            np.add.at(g, (slice(None), idx), self.g)
        if self.h is not None:
            h = np.zeros(self.h.shape[:2] + (n,) + self.v.shape[1:], complex)
            np.add.at(h, (slice(None), slice(None), idx), self.h)
        return JetArray(v, g, h)

    def transpose(self, *axes):
        k = len(axes)
        g = None if self.g is None else self.g.transpose((0,) + tuple(a + 1 for a in axes))
        h = None if self.h is None else self.h.transpose((0, 1) + tuple(a + 2 for a in axes))
        return JetArray(self.v.transpose(axes) if k else self.v, g, h)

    @property
    def T(self):
        return self.transpose(*reversed(range(self.v.ndim)))

    # --- arithmetic -----------------------------------------------------

    def _coerce(self, other):
        if isinstance(other, JetArray):
            return other
        return JetArray(other)

    def broadcast_to(self, shape):
        """Broadcast the value axes only; derivative axes stay in front."""
        shape = tuple(shape)
        if self.v.shape == shape:
            return self
        v = np.broadcast_to(self.v, shape)
        pad = (1,) * (len(shape) - self.v.ndim) + self.v.shape
        g = h = None
        if self.g is not None:
            g = np.broadcast_to(self.g.reshape(self.g.shape[:1] + pad), self.g.shape[:1] + shape)
        if self.h is not None:
            h = np.broadcast_to(self.h.reshape(self.h.shape[:2] + pad), self.h.shape[:2] + shape)
        return JetArray(v, g, h)

    def __add__(self, other):
        if isinstance(other, JetArray):
            shape = np.broadcast_shapes(self.v.shape, other.v.shape)
            a, b = self.broadcast_to(shape), other.broadcast_to(shape)
            order = min(a.order, b.order)
            return JetArray(a.v + b.v, a.g + b.g if order >= 1 else None,
                            a.h + b.h if order >= 2 else None)
        c = np.asarray(other)
        a = self.broadcast_to(np.broadcast_shapes(self.v.shape, c.shape))
        return JetArray(a.v + c, a.g, a.h)

    __radd__ = __add__

    def __neg__(self):
        return JetArray(-self.v, None if self.g is None else -self.g,
                        None if self.h is None else -self.h)

    def __sub__(self, other):
        return self + (-other if isinstance(other, JetArray) else -np.asarray(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, JetArray):
            c = np.asarray(other, dtype=complex)
            a = self.broadcast_to(np.broadcast_shapes(self.v.shape, c.shape))
            return JetArray(a.v * c, None if a.g is None else a.g * c,
                            None if a.h is None else a.h * c)
        shape = np.broadcast_shapes(self.v.shape, other.v.shape)
        a, b = self.broadcast_to(shape), other.broadcast_to(shape)
        order = min(a.order, b.order)
        v = a.v * b.v
        g = h = None
        if order >= 1:
            g = a.v * b.g + b.v * a.g
        if order >= 2:
            cross = a.g[:, None] * b.g[None, :]
            h = a.v * b.h + b.v * a.h + cross + np.swapaxes(cross, 0, 1)
        return JetArray(v, g, h)

    __rmul__ = __mul__

    def _chain(self, f0, f1, f2):
        g = None if self.g is None else f1 * self.g
        h = None
        if self.h is not None:
            h = f1 * self.h + f2 * (self.g[:, None] * self.g[None, :])
        return JetArray(f0, g, h)

    def reciprocal(self):
        if np.any(self.v == 0):
            raise ZeroDivisionError("reciprocal of a jet with zero value")
        inv = 1.0 / self.v
        return self._chain(inv, -inv * inv, 2 * inv ** 3)

    def __truediv__(self, other):
        if isinstance(other, JetArray):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other, dtype=complex))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def sqrt(self):
        s = np.sqrt(self.v)
        if np.any(s == 0) and self.order:
            raise ZeroDivisionError("sqrt is not differentiable at zero")
        return self._chain(s, 0.5 / s, -0.25 / (s * self.v))

    def conj(self):
        return JetArray(self.v.conj(), None if self.g is None else self.g.conj(),
                        None if self.h is None else self.h.conj())

    @property
    def real(self):
        return JetArray(self.v.real, None if self.g is None else self.g.real,
                        None if self.h is None else self.h.real)

    @property
    def imag(self):
        return JetArray(self.v.imag, None if self.g is None else self.g.imag,
                        None if self.h is None else self.h.imag)

    def partial(self):
        """Jet of the gradient: the new leading value axis is the derivative
        direction, and the order drops by one."""
        if self.g is None:
            raise ValueError("cannot differentiate an order-0 jet")
        return JetArray(self.g, self.h, None)

    def inv(self):
        """Inverse of a square-matrix-valued jet."""
        Gi = np.linalg.inv(self.v)
        g = h = None
        if self.g is not None:
            g = -np.einsum("ij,Yjk,kl->Yil", Gi, self.g, Gi)
        if self.h is not None:
            t = np.einsum("ij,Yjk,kl,Zlm,mn->YZin", Gi, self.g, Gi, self.g, Gi)
            h = t + np.swapaxes(t, 0, 1) - np.einsum("ij,YZjk,kl->YZil", Gi, self.h, Gi)
        return JetArray(Gi, g, h)

    def __repr__(self):
        return f"JetArray(shape={self.shape}, order={self.order})"


def einsum(subscripts, *ops):
    """``np.einsum`` over jets and constant arrays with the product rule.

    Index letters must be lowercase; ``Y`` and ``Z`` are reserved for the
    derivative axes.
    """
    ins, out = subscripts.replace(" ", "").split("->")
    terms = ins.split(",")
    if len(terms) != len(ops):
        raise ValueError("operand count does not match subscripts")
    jet_idx = [k for k, o in enumerate(ops) if isinstance(o, JetArray)]
    vals = [o.v if isinstance(o, JetArray) else np.asarray(o, dtype=complex) for o in ops]
    opt = len(ops) > 2
    v = np.einsum(subscripts, *vals, optimize=opt)
    if not jet_idx:
        return JetArray(v)
    order = min(ops[k].order for k in jet_idx)
    g = h = None
    if order >= 1:
        g = 0
        for k in jet_idx:
            t = list(terms)
            t[k] = "Y" + t[k]
            args = list(vals)
            args[k] = ops[k].g
            g = g + np.einsum(",".join(t) + "->Y" + out, *args, optimize=opt)
    if order >= 2:
        h = 0
        for k in jet_idx:
            t = list(terms)
            t[k] = "YZ" + t[k]
            args = list(vals)
            args[k] = ops[k].h
            h = h + np.einsum(",".join(t) + "->YZ" + out, *args, optimize=opt)
        for a in jet_idx:
            for b in jet_idx:
                if a == b:
                    continue
                t = list(terms)
                t[a] = "Y" + t[a]
                t[b] = "Z" + t[b]
                args = list(vals)
                args[a] = ops[a].g
                args[b] = ops[b].g
                h = h + np.einsum(",".join(t) + "->YZ" + out, *args, optimize=True)
    return JetArray(v, g, h)


def compose(outer, inner):
    """Chain rule: ``outer`` is a jet over the target coordinates evaluated
    at ``inner.v``; ``inner`` is a vector jet (target coordinates as functions
    of the source coordinates)."""
    order = min(outer.order, inner.order)
    g = h = None
    if order >= 1:
        g = np.tensordot(inner.g, outer.g, axes=(1, 0))
    if order >= 2:
        h = np.tensordot(inner.g, np.tensordot(inner.g, outer.h, axes=(1, 1)), axes=(1, 1))
        h = h + np.tensordot(inner.h, outer.g, axes=(2, 0))
    return JetArray(outer.v, g, h)


def minors(M, k):
    """All k×k minors of a matrix jet: result[I, J] = det M[I, J] over
    increasing index tuples I (rows) and J (columns)."""
    from itertools import permutations
    rows = list(combinations(range(M.shape[0]), k))
    cols = list(combinations(range(M.shape[1]), k))
    R = np.array(rows, int).reshape(len(rows), k)
    C = np.array(cols, int).reshape(len(cols), k)
    total = None
    for perm in permutations(range(k)):
        sign = 1
        for a in range(k):
            for b in range(a + 1, k):
                if perm[a] > perm[b]:
                    sign = -sign
        term = None
        for r in range(k):
            f = M[R[:, r][:, None], C[:, perm[r]][None, :]]
            term = f if term is None else term * f
        term = term * float(sign)
        total = term if total is None else total + term
    return total
