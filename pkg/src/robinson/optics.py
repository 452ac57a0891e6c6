"""Null congruences and Robinson structures.

A congruence is given by a null vector field ``k`` with ``kappa = g(k, .)``.
All checks are pointwise residuals:

* geodesic:   kappa ^ L(k) kappa = 0
* shear-free: L(k) g = rho g + kappa (x) xi + xi (x) kappa, fitted by least squares
* twist:      d kappa ^ kappa
* N-structure integrability: d kappa ^ omega = 0 and d mu ^ omega = 0,
  omega = kappa ^ mu^1 ^ ... ^ mu^n
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .exprjet import parse
from .fields import (FormField, JetArray, MetricField, einsum, exterior_derivative,
                     jet_hodge, jet_interior, jet_wedge, lie_form_field, lie_metric,
                     lower, wedge)
from .pointalg import FormAtPoint, hodge, levi_civita
from .pointalg import wedge as pwedge
from .report import CheckReport

NULL_TOL = 1e-9


def _norm(x):
    return float(np.linalg.norm(np.asarray(x).ravel()))


def null_residual(k, g, p):
    G = g.value(p)
    K = k.value(p)
    return abs(K @ G @ K) / (1 + _norm(G) * _norm(K) ** 2)


def _require_null(k, g, p):
    r = null_residual(k, g, p)
    if r > NULL_TOL:
        raise ValueError(f"vector field {k.label or ''} is not null at {np.round(p, 6).tolist()} "
                         f"(g(k,k) residual {r:.2e})")


def kappa_of(k, g):
    f = lower(g, k)
    f.label = f"g({k.label})" if k.label else "kappa"
    return f


def geodesic_residual(k, g, p):
    """``|kappa ^ L(k) kappa|``; zero iff the integral curves of ``k`` are
    (pre-)geodesics."""
    _require_null(k, g, p)
    kap = kappa_of(k, g)
    a = kap.at(p)
    lk = lie_form_field(k, kap).at(p)
    return _norm(pwedge(a, lk).comps) / (1 + _norm(a.comps) * _norm(lk.comps))


@dataclass
class ShearFit:
    residual: float
    rho: complex
    xi: np.ndarray


def shear_residual(k, g, p):
    """Least-squares fit of ``L(k) g = rho g + kappa xi + xi kappa``.

    The fit has five unknowns and ten equations (the independent entries of
    a symmetric 4x4 matrix, or n(n+1)/2 in general); the minimum-norm
    solution is returned.
    """
    _require_null(k, g, p)
    A = lie_metric(k, g, p)
    G = g.value(p)
    kap = G @ k.value(p)
    n = len(kap)
    rows, rhs = [], []
    for a in range(n):
        for b in range(a, n):
            row = np.zeros(n + 1, complex)
            row[0] = G[a, b]
            row[1 + b] += kap[a]
            row[1 + a] += kap[b]
            rows.append(row)
            rhs.append(A[a, b])
    M = np.array(rows)
    x = np.linalg.lstsq(M, np.array(rhs), rcond=None)[0]
    fit = x[0] * G + np.outer(kap, x[1:]) + np.outer(x[1:], kap)
    res = _norm(A - fit) / (1 + _norm(A))
    return ShearFit(res, complex(x[0]), x[1:])


def twist(k, g, p):
    """``|d kappa ^ kappa|``, the obstruction to ``kappa`` being surface-forming."""
    _require_null(k, g, p)
    kap = kappa_of(k, g)
    a = kap.at(p)
    da = exterior_derivative(kap).at(p)
    return _norm(pwedge(da, a).comps) / (1 + _norm(da.comps) * _norm(a.comps))


def expansion(k, g, p):
    """Half the divergence of ``k``; only its vanishing is meaningful for a
    non-affinely parametrized congruence."""
    from .fields import divergence
    return 0.5 * divergence(k, g, p).real


@dataclass
class CongruenceReport:
    label: str
    points: list
    geodesic: list = field(default_factory=list)
    shear: list = field(default_factory=list)
    twist: list = field(default_factory=list)
    expansion: list = field(default_factory=list)
    rho: list = field(default_factory=list)
    xi: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def check(self, which, tol, expect_zero=True):
        res = getattr(self, which)
        return CheckReport(f"{which}({self.label})", list(res), tol, expect_zero,
                           list(self.points), errors=list(self.errors))

    def sng(self, tol=1e-8):
        """Both geodesic and shear-free at every sample."""
        return self.check("geodesic", tol).verdict and self.check("shear", tol).verdict

    @property
    def flagged(self):
        # shear residuals are meaningless where the geodesic check fails
        return [i for i, r in enumerate(self.geodesic) if r > 1e-8]


def analyze_congruence(k, g, points, label=""):
    rep = CongruenceReport(label or k.label, [])
    for p in points:
        try:
            geo = geodesic_residual(k, g, p)
            sh = shear_residual(k, g, p)
            tw = twist(k, g, p)
            ex = expansion(k, g, p)
        except (ArithmeticError, ValueError) as err:
            rep.errors.append(f"{type(err).__name__}: {err}")
            continue
        rep.points.append(list(map(float, p)))
        rep.geodesic.append(geo)
        rep.shear.append(sh.residual)
        rep.twist.append(tw)
        rep.expansion.append(abs(ex))
        rep.rho.append(sh.rho)
        rep.xi.append(sh.xi)
    return rep


# --- N-structures ----------------------------------------------------------------

@dataclass
class NStructureSpec:
    """Annihilator ``N^0 = span{kappa, mu^1, ..., mu^n}`` of an N-structure."""

    kappa: FormField
    mus: list
    label: str = ""

    def omega(self):
        out = self.kappa
        for m in self.mus:
            out = wedge(out, m)
        return out

    def frame_residual(self, p):
        """Size of kappa ^ mu ^ mubar, normalized; must not vanish."""
        a = self.kappa.at(p)
        parts = [a]
        for m in self.mus:
            parts.append(m.at(p))
        for m in self.mus:
            parts.append(m.at(p).conj())
        out = parts[0]
        for q in parts[1:]:
            out = pwedge(out, q)
        scale = np.prod([1 + _norm(q.comps) for q in parts])
        return _norm(out.comps) / scale


def nstructure_integrability(ns, p, frame_tol=1e-12):
    """Residuals ``[|d kappa ^ omega|, |d mu^1 ^ omega|, ...]``."""
    if ns.frame_residual(p) < frame_tol:
        raise ValueError(f"frame condition violated at {np.round(p, 6).tolist()}")
    om = ns.omega().at(p)
    out = []
    for f in [ns.kappa] + list(ns.mus):
        df = exterior_derivative(f).at(p)
        out.append(_norm(pwedge(df, om).comps) / (1 + _norm(df.comps) * _norm(om.comps)))
    return np.array(out)


def screen_nstructure(k, g, orientation=None):
    """The N-structure of the screen complex structure of a null ``k``.

    For a covector ``alpha`` orthogonal to ``kappa`` and independent of it,
    ``F = kappa ^ alpha - i *(kappa ^ alpha)`` is a null self-dual 2-form
    with ``F = kappa ^ mu``; ``mu`` is read off as ``e _| F`` for a
    coordinate vector ``e`` with ``kappa(e) != 0``.  Orthogonality is
    imposed as ``alpha = a - (<kappa, a> / <kappa, b>) b`` with constant
    ``a`` and ``b`` picked per evaluation point; every residual only uses
    jets at that point, so the choice is harmless.
    """
    kap = kappa_of(k, g)
    o = g.orientation if orientation is None else orientation
    n = g.dim
    if n != 4:
        raise ValueError("screen N-structures are built in dimension 4")

    def orth(K, gi, a, b):
        ka = einsum("ab,a,b->", gi, K, a)
        kb = einsum("ab,a,b->", gi, K, b)
        return (ka / kb) * (-b) + a

    def choose(p):
        K = kap.value(p)
        gi = np.linalg.inv(g.value(p))
        eye = np.eye(n)
        b = eye[int(np.argmax(np.abs(gi @ K)))]
        best = None
        for j in range(n):
            a = eye[j]
            alpha = a - (K @ gi @ a) / (K @ gi @ b) * b
            size = _norm(pwedge(FormAtPoint.covector(K), FormAtPoint.covector(alpha)).comps)
            if best is None or size > best[0]:
                best = (size, a)
        e = np.zeros(n)
        e[int(np.argmax(np.abs(K)))] = 1
        return best[1], b, e

    def mu_jet(p, order):
        a, b, e = choose(p)
        K = kap.jet(p, order)
        G = g.jet(p, order)
        alpha = orth(K, G.inv(), a, b)
        two = jet_wedge(K, alpha, n, 1, 1)
        F = two - jet_hodge(two, G, 2, o) * 1j
        E = JetArray.constant(e.astype(complex), n, order)
        return jet_interior(E, F, n, 2)

    mu = FormField(g.chart, 1, mu_jet, g.domain, "mu_screen")
    return NStructureSpec(kap, [mu], f"screen({k.label})")


@dataclass
class ScreenStructure:
    basis: np.ndarray      # 4x2, representatives of K-perp / K
    metric: np.ndarray     # induced 2x2 quadratic form
    J: np.ndarray          # 2x2 complex structure in that basis


def screen_structure(k, g, p, orientation=None):
    """Induced metric and complex structure on ``K-perp / K``.

    The representatives are orthonormal for the induced form; ``J e1 = s e2``
    with ``s`` the sign of ``eps(k, n, e1, e2)`` for a null ``n`` with
    ``g(k, n) = 1``.
    """
    _require_null(k, g, p)
    G = np.real_if_close(g.value(p))
    if np.iscomplexobj(G):
        raise ValueError("screen structure needs a real metric")
    K = np.real(k.value(p))
    o = g.orientation if orientation is None else orientation
    kap = G @ K
    _, _, vh = np.linalg.svd(kap[None, :])
    perp = vh[1:].T                               # basis of k-perp
    Q = perp.T @ G @ perp
    w, v = np.linalg.eigh(Q)
    keep = np.argsort(np.abs(w))[1:]              # drop the null direction k
    if np.any(w[keep] <= 0):
        raise ValueError("induced screen form is not positive definite")
    E = perp @ v[:, keep] / np.sqrt(w[keep])
    # an auxiliary null vector n with g(k, n) = 1
    t = np.linalg.lstsq(kap[None, :], [1.0], rcond=None)[0]
    nvec = t - 0.5 * (t @ G @ t) * K
    eps = levi_civita(g.at(p, check=False), o)
    s = np.sign(np.einsum("abcd,a,b,c,d->", eps, K, nvec, E[:, 0], E[:, 1]))
    J = np.array([[0.0, -s], [s, 0.0]])
    return ScreenStructure(E, E.T @ G @ E, J)


# --- Maxwell fields ----------------------------------------------------------------

def verify_null_maxwell(F, kappa, g, orientation=None, p=None):
    """``(r_sd, r_closed, r_null)`` for ``*F = iF``, ``dF = 0`` and
    ``kappa ^ F = 0``."""
    o = g.orientation if orientation is None else orientation
    f = F.at(p)
    star = hodge(f, g.at(p), o)
    r_sd = _norm(star.comps - 1j * f.comps) / (1 + _norm(f.comps))
    dF = exterior_derivative(F).at(p)
    r_closed = _norm(dF.comps) / (1 + _norm(F.jet(p, 1).g))
    a = kappa.at(p)
    r_null = _norm(pwedge(a, f).comps) / (1 + _norm(a.comps) * _norm(f.comps))
    return r_sd, r_closed, r_null


# --- constructions ---------------------------------------------------------------

def bateman_transform(g, kappa, rho, xi, k=None, lam=None, points=()):
    """``g' = rho (g + kappa xi)`` with the symmetric product.

    When ``k`` and ``lam`` are given, the condition ``k _| (lam + xi) != 0``
    is checked at ``points``.
    """
    if k is not None and lam is not None:
        for p in points:
            val = (lam.value(p) + xi.value(p)) @ k.value(p)
            if abs(val) < 1e-12:
                raise ValueError(f"k _| (lambda + xi) vanishes at {np.round(p, 6).tolist()}")
    rho_f = rho if isinstance(rho, FormField) else FormField.scalar(g.chart, rho)

    def fn(p, order):
        G = g.jet(p, order)
        K = kappa.jet(p, order)
        X = xi.jet(p, order)
        t = einsum("a,b->ab", K, X)
        return (G + (t + t.T) * 0.5) * rho_f.jet(p, order)[0]
    return MetricField(g.chart, fn, g.domain, g.signature, g.orientation, "bateman")


def lift_cr(cr, lam=None, coeffs=None, v_name="v", position=1, orientation=1):
    """Metric ``g = kappa lambda + g_ab mu^a mubar^b`` on ``cr.chart x R``.

    The new coordinate ``v_name`` is inserted at ``position``; ``lam``
    defaults to ``dv`` and ``coeffs`` to the identity.  Coefficients may be
    expressions or strings parsed on the product chart.
    """
    from .cr import product_chart, pull_to_product
    chart, proj = product_chart(cr.chart, v_name, position)
    kap = pull_to_product(cr.kappa, chart, proj)
    mus = [pull_to_product(m, chart, proj) for m in cr.mus]
    if lam is None:
        lam = FormField.from_components(chart, 1, {v_name: 1})
    nmu = len(mus)
    if coeffs is None:
        coeffs = np.eye(nmu).tolist()
    def scalar(c):
        if isinstance(c, FormField):
            return c
        return FormField.scalar(chart, parse(c, chart) if isinstance(c, str) else c)
    cfields = [[scalar(c) for c in row] for row in coeffs]

    def fn(p, order):
        K = kap.jet(p, order)
        L = lam.jet(p, order)
        t = einsum("a,b->ab", K, L)
        out = (t + t.T) * 0.5
        for a in range(nmu):
            Ma = mus[a].jet(p, order)
            for b in range(nmu):
                Mb = mus[b].jet(p, order).conj()
                s = einsum("a,b->ab", Ma, Mb)
                out = out + (s + s.T) * 0.5 * cfields[a][b].jet(p, order)[0]
        return out
    g = MetricField(chart, fn, None, "lorentzian", orientation, f"lift({cr.label})")
    return g, NStructureSpec(kap, mus, f"lift({cr.label})")


__all__ = [
    "CongruenceReport", "NStructureSpec", "ScreenStructure", "ShearFit", "analyze_congruence",
    "bateman_transform", "expansion", "geodesic_residual", "kappa_of", "lift_cr",
    "nstructure_integrability", "null_residual", "screen_nstructure", "screen_structure",
    "shear_residual", "twist", "verify_null_maxwell",
]
