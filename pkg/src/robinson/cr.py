"""CR charts: Levi form, equivalence, embeddings and CR submanifolds.

A CR chart on a (2n+1)-dimensional chart is a real 1-form ``kappa`` and n
complex 1-forms ``mu^a`` with ``kappa ^ mu ^ mubar != 0``.  The Levi form is
read off from ``d kappa = i h_ab mu^a ^ mubar^b`` modulo ``kappa``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .exprjet import Chart
from .exprjet.jet import DomainError
from .fields import (ChartMap, FormField, JetArray, exterior_derivative, pullback_field, wedge)
from .fields.core import _component_jets
from .pointalg import FormAtPoint, wedge_all

FRAME_TOL = 1e-12
REAL_TOL = 1e-12


def _norm(x):
    return float(np.linalg.norm(np.asarray(x).ravel()))


def _where(p):
    return np.round(np.asarray(p, float), 6).tolist()


@dataclass
class CRChart:
    chart: Chart
    kappa: FormField
    mus: list
    label: str = ""

    def __post_init__(self):
        if self.chart.dim != 2 * len(self.mus) + 1:
            raise ValueError(f"CR chart {self.label!r}: dimension {self.chart.dim} needs "
                             f"{(self.chart.dim - 1) // 2} forms mu, got {len(self.mus)}")

    @property
    def n(self):
        return len(self.mus)

    def omega(self):
        out = self.kappa
        for m in self.mus:
            out = wedge(out, m)
        return out

    def coframe(self, p):
        """Rows ``kappa, mu^1..mu^n, mubar^1..mubar^n`` at ``p``."""
        mus = [m.value(p) for m in self.mus]
        return np.array([self.kappa.value(p)] + mus + [m.conj() for m in mus])

    def frame_residual(self, p):
        B = self.coframe(p)
        scale = np.prod([1 + _norm(r) for r in B])
        return abs(np.linalg.det(B)) / scale

    def reality_residual(self, p):
        k = self.kappa.value(p)
        return _norm(k.imag) / (1 + _norm(k))

    def validate(self, points):
        for p in points:
            if self.reality_residual(p) > REAL_TOL:
                raise ValueError(f"{self.label}: kappa is not real at {_where(p)}")
            if self.frame_residual(p) < FRAME_TOL:
                raise ValueError(f"{self.label}: frame condition violated at {_where(p)}")
        return self

    def pullback(self, f, label=""):
        """The chart pulled back along a local diffeomorphism ``f``."""
        return CRChart(f.source, pullback_field(f, self.kappa),
                       [pullback_field(f, m) for m in self.mus], label or self.label)

    def transformed(self, a, b, B, label=""):
        """``kappa' = a kappa``, ``mu'^i = b^i kappa + B^i_j mu^j`` with scalar
        fields (0-forms) or constants as coefficients."""
        kap = self.kappa * a
        mus = []
        for i in range(self.n):
            m = self.kappa * b[i]
            for j in range(self.n):
                m = m + self.mus[j] * B[i][j]
            mus.append(m)
        return CRChart(self.chart, kap, mus, label or f"{self.label}'")


# --- chart products ------------------------------------------------------------

def product_chart(base, v_name="v", position=1):
    """``base x R`` with the new coordinate inserted at ``position`` and the
    projection back to ``base``."""
    chart = base.extended(f"{base.name}x{v_name}", position, v_name)
    keep = [k for k in range(chart.dim) if k != position]
    n, m = chart.dim, base.dim

    def fn(p, order):
        g = np.zeros((n, m), complex)
        g[keep, np.arange(m)] = 1
        return JetArray(np.asarray(p)[keep].astype(complex), g if order >= 1 else None,
                        np.zeros((n, n, m), complex) if order >= 2 else None)
    return chart, ChartMap(chart, base, fn, "proj", linear=np.eye(n)[:, keep])


def pull_to_product(form, chart, proj):
    out = pullback_field(proj, form)
    out.label = form.label
    return out


# --- Levi form -------------------------------------------------------------------

@dataclass
class LeviEntry:
    point: list
    h: np.ndarray
    eigenvalues: np.ndarray
    twist: float              # normalized |kappa ^ d kappa|

    @property
    def hermitian_residual(self):
        return _norm(self.h - self.h.conj().T) / (1 + _norm(self.h))


def levi_form(c, p):
    """Hermitian Levi matrix at ``p``: expand ``d kappa`` in the wedge basis of
    the coframe and take the ``mu^a ^ mubar^b`` block divided by ``i``."""
    if c.frame_residual(p) < FRAME_TOL:
        raise ValueError(f"{c.label}: frame condition violated at {_where(p)}")
    B = c.coframe(p)
    dk = exterior_derivative(c.kappa).at(p)
    Bi = np.linalg.inv(B)
    C = Bi.T @ dk.to_full() @ Bi
    n = c.n
    h = C[1:n + 1, n + 1:] / 1j
    k = FormAtPoint.covector(B[0])
    tw = _norm(wedge_all([k, dk]).comps) / (1 + _norm(B[0]) * _norm(dk.comps))
    ev = np.linalg.eigvalsh(0.5 * (h + h.conj().T))
    return LeviEntry(list(map(float, p)), h, ev, tw)


def _verdict(entry, tol):
    if entry.twist < tol:
        return "trivial"
    ev = entry.eigenvalues
    scale = 1 + np.max(np.abs(ev))
    if np.all(ev > tol * scale) or np.all(ev < -tol * scale):
        return "pseudoconvex"
    if np.all(np.abs(ev) > tol * scale):
        return "nondegenerate"
    return "degenerate"


@dataclass
class LeviReport:
    label: str
    entries: list = field(default_factory=list)
    verdicts: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    @property
    def verdict(self):
        kinds = set(self.verdicts)
        if not kinds:
            return "undetermined"
        if len(kinds) == 1:
            return kinds.pop()
        return "indefinite over domain"

    @property
    def witnesses(self):
        """First sample point for each verdict seen."""
        out = {}
        for e, v in zip(self.entries, self.verdicts):
            out.setdefault(v, e.point)
        return out

    @property
    def signature(self):
        """(positive, negative) eigenvalue counts at the first sample."""
        if not self.entries:
            return None
        ev = self.entries[0].eigenvalues
        return int(np.sum(ev > 0)), int(np.sum(ev < 0))

    @property
    def hermitian_residual(self):
        return max((e.hermitian_residual for e in self.entries), default=0.0)

    def summary(self):
        line = f"{self.label}: {self.verdict} over {len(self.entries)} samples"
        if self.verdict == "indefinite over domain":
            line += " " + ", ".join(f"{k} at {v}" for k, v in self.witnesses.items())
        if self.errors:
            line += f" ({len(self.errors)} errors)"
        return line


def classify(c, samples, tol=1e-10):
    rep = LeviReport(c.label)
    for p in samples:
        try:
            e = levi_form(c, p)
        except (ArithmeticError, ValueError, np.linalg.LinAlgError) as err:
            rep.errors.append(f"{type(err).__name__}: {err}")
            continue
        rep.entries.append(e)
        rep.verdicts.append(_verdict(e, tol))
    return rep


# --- integrability --------------------------------------------------------------

def integrability_residual(c, p):
    """``[|d kappa ^ omega|, |d mu^a ^ omega|, ...]``, normalized.  For
    ``n = 1`` the 3-forms ``d f ^ omega`` exceed the dimension and vanish."""
    if c.n + 3 > c.chart.dim:
        return np.zeros(c.n + 1)
    om = c.omega().at(p)
    out = []
    for f in [c.kappa] + list(c.mus):
        df = exterior_derivative(f).at(p)
        out.append(_norm(wedge_all([df, om]).comps) / (1 + _norm(df.comps) * _norm(om.comps)))
    return np.array(out)


# --- equivalence ----------------------------------------------------------------

@dataclass
class Equivalence:
    equivalent: bool
    a: complex
    b: np.ndarray             # coefficients of kappa in mu'
    B: np.ndarray             # n x n block acting on mu
    residual: float
    reason: str = ""


def cr_equivalent(first, second, p, tol=1e-8):
    """Fit ``kappa2 = a kappa1`` and ``mu2 = b kappa1 + B mu1`` at ``p``."""
    if first.chart != second.chart:
        raise ValueError("CR charts live on different base charts")
    k1, k2 = first.kappa.value(p), second.kappa.value(p)
    M = np.array([k1] + [m.value(p) for m in first.mus])            # (n+1, N)
    if np.linalg.matrix_rank(M, tol=1e-12 * (1 + _norm(M))) < M.shape[0]:
        raise np.linalg.LinAlgError(f"{first.label}: singular coframe at {_where(p)}")
    j = int(np.flatnonzero(np.abs(k1) > 1e-12 * (1 + _norm(k1)))[0])
    a = k2[j] / k1[j]
    res = _norm(k2 - a * k1) / (1 + _norm(k2))
    rows = []
    for m in second.mus:
        x, *_ = np.linalg.lstsq(M.T, m.value(p), rcond=None)
        res = max(res, _norm(M.T @ x - m.value(p)) / (1 + _norm(m.value(p))))
        rows.append(x)
    X = np.array(rows)
    b, B = X[:, 0], X[:, 1:]
    reason = ""
    if res >= tol:
        reason = f"spans differ (residual {res:.2e})"
    elif abs(a.imag) >= tol * (1 + abs(a)):
        reason = f"kappa rescaled by a non-real factor {a:.6g}"
    elif abs(np.linalg.det(B)) <= tol:
        reason = "mu block is singular"
    return Equivalence(not reason, complex(a), b, B, res, reason)


# --- embeddings -------------------------------------------------------------------

def _wirtinger(G, target):
    """Jets of ``dG/dz_k`` for each complex pair of ``target``, computed from
    one order higher jets of ``G``."""
    pairs = target.complex_pairs

    def fn(q, order):
        if order + 1 > 2:
            raise ValueError("embedded CR charts carry jets up to order 1")
        J = _component_jets(target, [G], q, order + 1)[0]
        P = J.partial()
        return [(P[ix] - P[iy] * 1j) * 0.5 for ix, iy, _ in pairs]
    return fn


def embed_from_defining(G, target, param, points=(), tol=1e-10, label="embedded"):
    """CR chart on ``param.source`` induced on ``{G = 0}`` in ``C^2``.

    ``target`` is a chart with two declared complex coordinates and ``param``
    maps the base chart onto the hypersurface.  Its forms are
    ``kappa = i(G_1 dz_1 + G_2 dz_2)`` and
    ``mu = conj(G_2) dz_1 - conj(G_1) dz_2``, pulled back.
    """
    if len(target.complex_pairs) != 2 or target.dim != 4:
        raise ValueError("the ambient chart must be C^2 with two complex coordinates")
    dz = []
    for ix, iy, _ in target.complex_pairs:
        e = np.zeros(4, complex)
        e[ix], e[iy] = 1, 1j
        dz.append(e)
    partials = _wirtinger(G, target)

    def kap(q, order):
        g1, g2 = partials(q, order)
        return (g1 * dz[0] + g2 * dz[1]) * 1j

    def mu(q, order):
        g1, g2 = partials(q, order)
        return g2.conj() * dz[0] - g1.conj() * dz[1]

    kf = FormField(target, 1, kap, None, "kappa")
    mf = FormField(target, 1, mu, None, "mu")
    for p in points:
        q = param(p)
        val = _component_jets(target, [G], q, 1)[0]
        if abs(val.v) > tol:
            msg = "im G" if abs(val.v.imag) > tol else "G"
            raise ValueError(f"{msg} = {complex(val.v):.3g} does not vanish at {_where(p)}")
        if _norm(val.g) < tol:
            raise DomainError(f"dG = 0 at {_where(p)}")
    c = CRChart(param.source, pullback_field(param, kf), [pullback_field(param, mf)], label)
    for p in points:
        if c.reality_residual(p) > 1e-9:
            raise ValueError(f"{label}: induced kappa is not real at {_where(p)}")
    return c


# --- tangential equations -----------------------------------------------------------

def tangential_cr_residual(z, c, p):
    """``|dz ^ omega|`` at ``p``; zero iff ``z`` solves the tangential CR
    equations."""
    f = z if isinstance(z, FormField) else FormField.scalar(c.chart, z)
    dz = exterior_derivative(f).at(p)
    om = c.omega().at(p)
    return _norm(wedge_all([dz, om]).comps) / (1 + _norm(dz.comps) * _norm(om.comps))


# --- CR submanifolds --------------------------------------------------------------------

@dataclass
class SubmanifoldResult:
    residual: float
    chart: CRChart | None
    selection: tuple = ()
    message: str = ""

    @property
    def ok(self):
        return self.chart is not None


def cr_submanifold_check(f, c, p, tol=1e-9):
    """Is ``f: N -> M`` a CR submanifold at ``p``?

    With ``dim N = 2m+1`` and ``m <= n``, the pulled-back coframe must have
    rank ``m+1``: every ``f^*(kappa ^ mu^I)`` with ``|I| = m+1`` vanishes
    (for ``m = n-1`` this is ``f^* omega = 0``) and some selection ``J`` of
    ``m`` forms has ``f^*(kappa ^ mu^J) != 0``.  By multilinearity it is
    enough to search subsets of the given ``mu``.
    """
    if f.target != c.chart:
        raise ValueError("map does not land in the CR chart")
    dim = f.source.dim
    if dim % 2 == 0 or dim < 3:
        raise ValueError("a CR submanifold needs odd dimension at least 3 (n >= 1 downstairs)")
    m = (dim - 1) // 2
    if m > c.n:
        raise ValueError("source dimension exceeds the CR manifold")
    J = f.jet(p, 1).g
    if np.linalg.matrix_rank(J, tol=1e-10 * (1 + _norm(J))) < dim:
        raise ValueError(f"map is not an immersion at {_where(p)}")
    K = pullback_field(f, c.kappa).at(p)
    M = [pullback_field(f, mu).at(p) for mu in c.mus]
    scale = 1 + _norm(K.comps) * np.prod([1 + _norm(x.comps) for x in M])
    residual = 0.0
    for I in combinations(range(c.n), m + 1):
        residual = max(residual, _norm(wedge_all([K] + [M[i] for i in I]).comps) / scale)
    if residual > tol:
        return SubmanifoldResult(residual, None, (), "pulled-back coframe has too large rank")
    best = None
    for I in combinations(range(c.n), m):
        forms = [K] + [M[i] for i in I]
        forms += [x.conj() for x in forms[1:]]
        size = _norm(wedge_all(forms).comps) / scale
        if best is None or size > best[0]:
            best = (size, I)
    if best is None or best[0] < tol:
        return SubmanifoldResult(residual, None, (), "no non-vanishing selection of mu found")
    sel = best[1]
    sub = CRChart(f.source, pullback_field(f, c.kappa), [pullback_field(f, c.mus[i]) for i in sel],
                  f"{c.label}|{f.label}")
    return SubmanifoldResult(residual, sub, sel)


__all__ = [
    "CRChart", "Equivalence", "LeviEntry", "LeviReport", "SubmanifoldResult", "classify",
    "cr_equivalent", "cr_submanifold_check", "embed_from_defining", "integrability_residual",
    "levi_form", "product_chart", "pull_to_product", "tangential_cr_residual",
]
