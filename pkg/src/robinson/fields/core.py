"""Metric, form and vector fields over a chart, and the calculus on them.

Every field is a function from a chart point to a :class:`JetArray`.  Fields
built from parsed expressions evaluate their components with jets; derived
fields (exterior derivative, Lie derivative, pullback, ...) are evaluated
lazily by combining the jets of their inputs.  Because jets stop at order
two, a field obtained by ``k`` differentiations of expression components can
be evaluated at most to order ``2 - k``.
"""

from __future__ import annotations

from dataclasses import dataclass
from numbers import Number

import numpy as np

from ..exprjet import DomainError, Expression, Jet2
from ..pointalg import (FormAtPoint, MetricAtPoint, SignatureError, _interior_table,
                        _perm_sign, _position, _wedge_table, basis)
from .jetarray import JetArray, compose, einsum, minors


# --- domains --------------------------------------------------------------

@dataclass(frozen=True)
class Box:
    """Axis-aligned sampling box, one interval per chart coordinate."""

    lo: tuple
    hi: tuple

    def __post_init__(self):
        lo, hi = np.asarray(self.lo, float), np.asarray(self.hi, float)
        if lo.shape != hi.shape or np.any(hi < lo):
            raise ValueError("box bounds must satisfy lo <= hi")
        object.__setattr__(self, "lo", tuple(lo))
        object.__setattr__(self, "hi", tuple(hi))

    @classmethod
    def from_dict(cls, chart, bounds, default=(-1.0, 1.0)):
        lo, hi = [], []
        for n in chart.coord_names:
            a, b = bounds.get(n, default)
            lo.append(float(a))
            hi.append(float(b))
        return cls(tuple(lo), tuple(hi))

    @property
    def dim(self):
        return len(self.lo)

    def sample(self, n, seed=0):
        rng = np.random.default_rng(seed)
        return rng.uniform(self.lo, self.hi, size=(n, self.dim))

    def contains(self, p):
        p = np.asarray(p)
        return bool(np.all(p >= self.lo) and np.all(p <= self.hi))

    def replace(self, chart, overrides):
        bounds = {n: (self.lo[k], self.hi[k]) for k, n in enumerate(chart.coord_names)}
        bounds.update(overrides)
        return Box.from_dict(chart, bounds)


# --- component evaluation ---------------------------------------------------

def _component_jets(chart, comps, p, order):
    """Jets of a flat list of components: numbers, Expressions or callables
    ``f(point, order) -> Jet2 | JetArray | number``."""
    env = None
    out = []
    for c in comps:
        if c is None:
            out.append(0.0)
        elif isinstance(c, Number):
            out.append(complex(c))
        elif isinstance(c, Expression):
            if env is None:
                env = chart.seed(p, order)
            val = c.evaluate(env, chart.dim, order)
            if not isinstance(val, Jet2):
                val = complex(val)
            elif not (np.isfinite(val.value) and np.all(np.isfinite(val.grad))):
                raise DomainError("non-finite value", str(c))
            out.append(val)
        else:
            val = c(p, order)
            if isinstance(val, JetArray):
                val = Jet2(val.v.item(), None if val.g is None else val.g.reshape(-1),
                           None if val.h is None else val.h.reshape(chart.dim, chart.dim))
            out.append(val)
    return JetArray.from_jets(out, chart.dim, order)


class Field:
    """Base class: a chart, a value shape and a jet function."""

    kind = "field"

    def __init__(self, chart, shape, jetfn, domain=None, label=""):
        self.chart = chart
        self.shape = tuple(shape)
        self._jetfn = jetfn
        self.domain = domain
        self.label = label

    @property
    def dim(self):
        return self.chart.dim

    def jet(self, p, order=2):
        if order > 2:
            raise ValueError("jets are truncated at order 2")
        p = np.asarray(p, dtype=float)
        out = self._jetfn(p, order)
        if out.shape != self.shape:
            raise ValueError(f"{self.kind} {self.label!r} produced shape {out.shape}, "
                             f"expected {self.shape}")
        return out

    def value(self, p):
        return self.jet(p, 0).v

    def _derived(self, cls_args, jetfn, label):
        raise NotImplementedError


def _from_components(chart, shape, comps):
    flat = list(np.asarray(comps, dtype=object).reshape(-1))

    def fn(p, order):
        return _component_jets(chart, flat, p, order).reshape(shape)
    return fn


def _from_terms(chart, shape, terms):
    """``sum coeff_k * constant_k`` with constant arrays of the given shape."""
    consts = np.array([np.asarray(c, dtype=complex).reshape(shape) for c, _ in terms])
    coeffs = [t for _, t in terms]
    sub = "k," + "k" + "abcdefgh"[:len(shape)] + "->" + "abcdefgh"[:len(shape)]

    def fn(p, order):
        if not terms:
            return JetArray.constant(np.zeros(shape), chart.dim, order)
        cj = _component_jets(chart, coeffs, p, order)
        return einsum(sub, cj, consts)
    return fn


# --- concrete fields -----------------------------------------------------------

class MetricField(Field):
    kind = "metric"

    def __init__(self, chart, jetfn, domain=None, signature="lorentzian", orientation=1, label=""):
        super().__init__(chart, (chart.dim, chart.dim), jetfn, domain, label)
        if signature not in ("lorentzian", "euclidean", "any"):
            raise ValueError(f"unknown signature {signature!r}")
        self.signature = signature
        self.orientation = orientation

    @classmethod
    def from_components(cls, chart, comps, **kw):
        comps = np.asarray(comps, dtype=object)
        n = chart.dim
        if comps.shape != (n, n):
            raise ValueError(f"metric needs {n}x{n} components")
        for a in range(n):
            for b in range(a):
                if comps[a, b] is None:
                    comps[a, b] = comps[b, a]
                elif comps[b, a] is None:
                    comps[b, a] = comps[a, b]
        return cls(chart, _from_components(chart, (n, n), comps), **kw)

    @classmethod
    def from_terms(cls, chart, terms, **kw):
        """Terms are ``(alpha, beta, coeff)`` with constant covectors; each
        contributes ``coeff * alpha beta`` in the symmetrized product
        ``2 alpha beta = alpha (x) beta + beta (x) alpha``."""
        mats = []
        for a, b, c in terms:
            a, b = np.asarray(a, complex), np.asarray(b, complex)
            mats.append((0.5 * (np.outer(a, b) + np.outer(b, a)), c))
        return cls(chart, _from_terms(chart, (chart.dim, chart.dim), mats), **kw)

    @classmethod
    def from_products(cls, chart, products, **kw):
        """Sum of symmetrized products ``alpha beta`` of 1-form fields."""
        products = list(products)

        def fn(p, order):
            total = JetArray.constant(np.zeros((chart.dim, chart.dim)), chart.dim, order)
            for a, b in products:
                t = einsum("a,b->ab", a.jet(p, order), b.jet(p, order))
                total = total + (t + t.T) * 0.5
            return total
        return cls(chart, fn, **kw)

    def jet(self, p, order=2):
        out = super().jet(p, order)
        return JetArray(0.5 * (out.v + out.v.T),
                        None if out.g is None else 0.5 * (out.g + np.swapaxes(out.g, 1, 2)),
                        None if out.h is None else 0.5 * (out.h + np.swapaxes(out.h, 2, 3)))

    def at(self, p, check=True):
        g = MetricAtPoint(self.value(p))
        if check and self.signature != "any" and g.is_real:
            pos, neg = g.signature()
            want = (self.dim - 1, 1) if self.signature == "lorentzian" else (self.dim, 0)
            if (pos, neg) != want:
                raise SignatureError(f"{self.label or 'metric'} has signature {(pos, neg)} "
                                     f"at {np.round(p, 6).tolist()}")
        return g

    def scaled(self, factor, label=""):
        """Conformal rescaling by a scalar field (0-form)."""
        def fn(p, order):
            return self.jet(p, order) * factor.jet(p, order)[0]
        return MetricField(self.chart, fn, self.domain, self.signature, self.orientation,
                           label or self.label)


class FormField(Field):
    kind = "form"

    def __init__(self, chart, degree, jetfn, domain=None, label=""):
        if not 0 <= degree <= chart.dim:
            raise ValueError("degree out of range")
        super().__init__(chart, (len(basis(chart.dim, degree)),), jetfn, domain, label)
        self.degree = degree

    @classmethod
    def from_components(cls, chart, degree, comps, **kw):
        """``comps`` maps multi-indices (coordinate indices or names, any
        order) to components."""
        n = len(basis(chart.dim, degree))
        terms = []
        for idx, c in comps.items():
            idx = tuple(chart.index(i) if isinstance(i, str) else i for i in
                        ((idx,) if isinstance(idx, (str, int)) else idx))
            e = FormAtPoint.from_dict(degree, chart.dim, {idx: 1.0}).comps
            terms.append((e, c))
        return cls(chart, degree, _from_terms(chart, (n,), terms), **kw)

    @classmethod
    def from_terms(cls, chart, degree, terms, **kw):
        n = len(basis(chart.dim, degree))
        terms = [((t.comps if isinstance(t, FormAtPoint) else t), c) for t, c in terms]
        return cls(chart, degree, _from_terms(chart, (n,), terms), **kw)

    @classmethod
    def scalar(cls, chart, expr, **kw):
        return cls(chart, 0, _from_components(chart, (1,), [expr]), **kw)

    def at(self, p):
        return FormAtPoint(self.degree, self.dim, self.value(p))

    def conj(self):
        return FormField(self.chart, self.degree, lambda p, o: self.jet(p, o).conj(),
                         self.domain, f"conj({self.label})")

    def __add__(self, other):
        _same(self, other)
        return FormField(self.chart, self.degree, lambda p, o: self.jet(p, o) + other.jet(p, o),
                         self.domain, self.label)

    def __sub__(self, other):
        _same(self, other)
        return FormField(self.chart, self.degree, lambda p, o: self.jet(p, o) - other.jet(p, o),
                         self.domain, self.label)

    def __mul__(self, c):
        if isinstance(c, FormField):
            if c.degree != 0:
                raise TypeError("use wedge for forms of positive degree")
            return FormField(self.chart, self.degree,
                             lambda p, o: self.jet(p, o) * c.jet(p, o)[0], self.domain, self.label)
        return FormField(self.chart, self.degree, lambda p, o: self.jet(p, o) * c,
                         self.domain, self.label)

    __rmul__ = __mul__

    def __xor__(self, other):
        return wedge(self, other)


class VectorField(Field):
    kind = "vector"

    def __init__(self, chart, jetfn, domain=None, label=""):
        super().__init__(chart, (chart.dim,), jetfn, domain, label)

    @classmethod
    def from_components(cls, chart, comps, **kw):
        if len(comps) != chart.dim:
            raise ValueError(f"vector needs {chart.dim} components")
        return cls(chart, _from_components(chart, (chart.dim,), list(comps)), **kw)

    @classmethod
    def from_terms(cls, chart, terms, **kw):
        return cls(chart, _from_terms(chart, (chart.dim,), terms), **kw)

    def at(self, p):
        return self.value(p)

    def scaled(self, f):
        """Multiply by a scalar field (a 0-form)."""
        return VectorField(self.chart, lambda p, o: self.jet(p, o) * f.jet(p, o)[0],
                           self.domain, self.label)

    def conj(self):
        return VectorField(self.chart, lambda p, o: self.jet(p, o).conj(), self.domain, self.label)


class ChartMap:
    """A smooth map between charts given by target-coordinate jets."""

    def __init__(self, source, target, jetfn, label="", linear=None):
        self.source = source
        self.target = target
        self._jetfn = jetfn
        self.label = label
        # constant Jacobian (source, target) of an affine map, if known
        self.linear = None if linear is None else np.asarray(linear, float)

    @classmethod
    def from_components(cls, source, target, comps, label=""):
        """``comps`` maps each target coordinate, or a declared complex
        coordinate of the target, to a component on the source chart."""
        slots = [None] * target.dim
        for name, c in comps.items():
            if name in target.coord_names:
                slots[target.index(name)] = ("re", c)
            else:
                ix, iy, _ = target.pair(name)
                slots[ix] = ("re", c)
                slots[iy] = ("im", c)
        if any(s is None for s in slots):
            missing = [target.coord_names[k] for k, s in enumerate(slots) if s is None]
            raise ValueError(f"map {label!r} leaves target coordinates {missing} undefined")
        uniq = []
        for _, c in slots:
            if all(c is not u for u in uniq):
                uniq.append(c)
        pos = [next(k for k, u in enumerate(uniq) if u is c) for _, c in slots]
        parts = [s for s, _ in slots]

        def fn(p, order):
            vals = _component_jets(source, uniq, p, order)[np.array(pos)]
            re, im = vals.real, vals.imag
            mask = np.array([s == "re" for s in parts])
            return JetArray(np.where(mask, re.v, im.v),
                            None if vals.g is None else np.where(mask, re.g, im.g),
                            None if vals.h is None else np.where(mask, re.h, im.h))
        return cls(source, target, fn, label)

    def jet(self, p, order=2):
        return self._jetfn(np.asarray(p, float), order)

    def __call__(self, p):
        v = self.jet(p, 0).v
        if np.max(np.abs(v.imag)) > 1e-12 * (1 + np.max(np.abs(v))):
            raise ValueError(f"map {self.label!r} is not real at {p}")
        return v.real

    def then(self, other):
        """``other`` after ``self``."""
        if other.source is not self.target and other.source != self.target:
            raise ValueError("charts do not match for composition")

        def fn(p, order):
            inner = self.jet(p, order)
            return compose(other.jet(inner.v.real, order), inner)
        return ChartMap(self.source, other.target, fn, f"{other.label}∘{self.label}")


def _same(a, b):
    if a.chart != b.chart:
        raise ValueError("fields live on different charts")
    if getattr(a, "degree", None) != getattr(b, "degree", None):
        raise ValueError("forms of different degree")


# --- jet-level form algebra ------------------------------------------------------

def jet_wedge(a, b, dim, p, q):
    ia, ib, ic, sg = _wedge_table(dim, p, q)
    n = len(basis(dim, p + q))
    if len(ia) == 0:
        return JetArray.constant(np.zeros(n), a.dim or dim, min(a.order, b.order))
    return (a[ia] * b[ib] * sg).scatter(ic, n)


def jet_interior(v, a, dim, degree):
    it, iv, isrc, sg = _interior_table(dim, degree)
    return (v[iv] * a[isrc] * sg).scatter(it, len(basis(dim, degree - 1)))


def jet_d(a, dim, degree):
    """Exterior derivative of a form jet; the order drops by one."""
    it, iv, isrc, sg = _interior_table(dim, degree + 1)
    da = a.partial()                           # value axes (direction, component)
    return (da[iv, it] * sg).scatter(isrc, len(basis(dim, degree + 1)))


def jet_hodge(a, G, degree, orientation=1):
    """Hodge star of a form jet in dimension four, calibrated like
    :func:`robinson.pointalg.hodge`; ``G`` is the metric jet."""
    if G.shape != (4, 4):
        raise ValueError("the Hodge star is implemented in dimension 4 only")
    gi = G.inv()
    raised = a if degree == 0 else einsum("ij,j->i", minors(gi, degree), a)
    det = minors(G, 4)[0, 0]
    sgn = -1.0 if np.real(det.v) < 0 else 1.0
    vol = (det * sgn).sqrt() * float(-orientation)
    pos = _position(4, 4 - degree)
    src, dst, sg = [], [], []
    for n, I in enumerate(basis(4, degree)):
        comp = tuple(j for j in range(4) if j not in I)
        src.append(n)
        dst.append(pos[comp])
        sg.append(_perm_sign(I + comp))
    src, dst = np.array(src), np.array(dst)
    out = (raised[src] * np.array(sg, float)).scatter(dst, len(basis(4, 4 - degree)))
    return out * vol


# --- field operations ----------------------------------------------------------

def wedge(a, b):
    _same_chart(a, b)
    dim = a.dim
    return FormField(a.chart, a.degree + b.degree,
                     lambda p, o: jet_wedge(a.jet(p, o), b.jet(p, o), dim, a.degree, b.degree),
                     a.domain, f"{a.label}^{b.label}")


def hodge_field(a, g, orientation=None):
    _same_chart(a, g)
    o = g.orientation if orientation is None else orientation
    return FormField(a.chart, 4 - a.degree,
                     lambda p, order: jet_hodge(a.jet(p, order), g.jet(p, order), a.degree, o),
                     a.domain, f"*{a.label}")


def exterior_derivative(a):
    def fn(p, order):
        if order >= 2:
            raise ValueError("the exterior derivative of a field is available to order 1")
        return jet_d(a.jet(p, order + 1), a.dim, a.degree)
    return FormField(a.chart, a.degree + 1, fn, a.domain, f"d{a.label}")


def interior(k, a):
    _same_chart(k, a)
    return FormField(a.chart, a.degree - 1,
                     lambda p, o: jet_interior(k.jet(p, o), a.jet(p, o), a.dim, a.degree),
                     a.domain, f"{k.label}⌟{a.label}")


def lower(g, k):
    """The 1-form ``g(k, .)``."""
    _same_chart(g, k)
    return FormField(g.chart, 1, lambda p, o: einsum("ab,b->a", g.jet(p, o), k.jet(p, o)),
                     g.domain, f"g({k.label})")


def inner(g, a, b):
    """``g(a, b)`` as a 0-form."""
    return FormField(g.chart, 0, lambda p, o: einsum("ab,a,b->", g.jet(p, o), a.jet(p, o),
                                                      b.jet(p, o)).reshape((1,)),
                     g.domain, "")


def lie_form_field(k, a):
    if a.degree == 0:
        return FormField(a.chart, 0, lambda p, o: einsum("a,ai->i", k.jet(p, o),
                                                         a.jet(p, o + 1).partial()),
                         a.domain, f"L({k.label}){a.label}")
    first = interior(k, exterior_derivative(a))
    second = exterior_derivative(interior(k, a))
    return first + second


def lie_metric_field(k, g):
    """(L_k g)_{mn} = k^a d_a g_mn + g_an d_m k^a + g_ma d_n k^a."""
    def fn(p, order):
        G = g.jet(p, order + 1)
        K = k.jet(p, order + 1)
        dG, dK = G.partial(), K.partial()
        G, K = G.truncate(order), K.truncate(order)
        t = einsum("ma,an->mn", dK, G)
        return einsum("a,amn->mn", K, dG) + t + t.T
    return MetricField(g.chart, fn, g.domain, "any", g.orientation, f"L({k.label})g")


def pullback_field(f, a):
    """``f^* a`` for a form field ``a`` on ``f.target``."""
    if a.chart != f.target:
        raise ValueError("form does not live on the map's target chart")
    k = a.degree

    def fn(p, order):
        if f.linear is not None:
            F = f.jet(p, order)
            A = compose(a.jet(F.v.real, order), F)
            if k == 0:
                return A
            return einsum("j,ij->i", A, minors(JetArray(f.linear.astype(complex)), k).v)
        if k > 0 and order > 1:
            raise ValueError("pullbacks of forms along non-affine maps are available to order 1")
        F = f.jet(p, order + 1)
        q = F.v.real
        A = compose(a.jet(q, order), F.truncate(order))
        if k == 0:
            return A
        jac = F.partial()                          # (source, target)
        M = minors(jac, k)                         # (source multi-index, target multi-index)
        return einsum("j,ij->i", A, M)
    return FormField(f.source, k, fn, None, f"{f.label}^*{a.label}")


def d(a, p):
    return exterior_derivative(a).at(p)


def lie_metric(k, g, p):
    return lie_metric_field(k, g).jet(p, 0).v


def lie_form(k, a, p):
    return lie_form_field(k, a).at(p)


def pullback(f, a, p):
    return pullback_field(f, a).at(p)


def divergence(k, g, p):
    """``(1/sqrt|det g|) d_m (sqrt|det g| k^m)``."""
    G = g.jet(p, 1)
    K = k.jet(p, 1)
    gi = np.linalg.inv(G.v)
    if not np.all(np.isfinite(gi)):
        raise SignatureError("singular metric")
    dlog = 0.5 * np.einsum("mn,anm->a", gi, G.g)
    return complex(np.trace(K.g) + K.v @ dlog)


def _same_chart(a, b):
    if a.chart != b.chart:
        raise ValueError("fields live on different charts")


# --- basis helpers ------------------------------------------------------------------

def covector_basis(chart, key):
    """Real-basis components of ``d<key>``; complex names and ``<name>bar``
    give ``dx + i dy`` and ``dx - i dy``."""
    e = np.zeros(chart.dim, complex)
    if key in chart.coord_names:
        e[chart.index(key)] = 1
        return e
    conj = key.endswith("bar") and key[:-3] not in chart.coord_names
    name = key[:-3] if conj else key
    ix, iy, _ = chart.pair(name)
    e[ix] = 1
    e[iy] = -1j if conj else 1j
    return e


def vector_basis(chart, key):
    """Components of the coordinate vector ``d/d<key>`` in the real basis;
    ``d/dw = (d_x - i d_y)/2`` and ``d/dwbar = (d_x + i d_y)/2``."""
    e = np.zeros(chart.dim, complex)
    if key in chart.coord_names:
        e[chart.index(key)] = 1
        return e
    conj = key.endswith("bar") and key[:-3] not in chart.coord_names
    name = key[:-3] if conj else key
    ix, iy, _ = chart.pair(name)
    e[ix] = 0.5
    e[iy] = 0.5j if conj else -0.5j
    return e


def form_basis(chart, keys):
    """Constant form ``d<k1> ^ d<k2> ^ ...``."""
    out = FormAtPoint(0, chart.dim, [1.0])
    from ..pointalg import wedge as pwedge
    for key in keys:
        out = pwedge(out, FormAtPoint.covector(covector_basis(chart, key)))
    return out


def constant_form(chart, form, label=""):
    return FormField(chart, form.degree,
                     lambda p, o: JetArray.constant(form.comps, chart.dim, o), None, label)


def constant_vector(chart, v, label=""):
    v = np.asarray(v, complex)
    return VectorField(chart, lambda p, o: JetArray.constant(v, chart.dim, o), None, label)


