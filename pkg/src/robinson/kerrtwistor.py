"""The Kerr construction in Minkowski space and the twistor correspondence.

Minkowski space uses the chart ``(u, v, x, y)`` with ``w = x + i y`` and
``g = du dv + dw dwbar``.  A complex function ``z`` picks the null direction

    k_z     = d_v - z d_w - zbar d_wbar - z zbar d_u
    kappa_z = du - z dwbar - zbar dw - z zbar dv
    mu_z    = dw + z dv,   lambda_z = dv

and Kerr functions ``H(z1, z2, z3)`` are evaluated at
``(u - z wbar, w + z v, z)``.  The twistor correspondence labels points of
the quadric as ``(z, w + z v, u - z wbar)`` so that the line formula reads
``l(t) = (Re z3 + Re(z1 conj z2) - |z1|^2 t, t, z2 - z1 t)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cr import CRChart, cr_submanifold_check
from .exprjet import Chart, Jet2, parse
from .exprjet import jet as J
from .fields import (ChartMap, FormField, JetArray, MetricField, VectorField, covector_basis,
                     pullback_field, vector_basis)
from .optics import NStructureSpec, geodesic_residual, shear_residual

KERR_NAMES = ("z1", "z2", "z3")
SOLVE_TOL = 1e-12
DERIV_TOL = 1e-10


def minkowski_chart():
    return Chart("mink", ("u", "v", "x", "y"), ((2, 3, "w"),))


def minkowski_metric(chart=None):
    c = chart or minkowski_chart()
    return MetricField.from_components(c, [[0, .5, 0, 0], [.5, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]],
                                       label="minkowski")


class SolverError(ArithmeticError):
    def __init__(self, message, last=None):
        super().__init__(message)
        self.last = last


# --- Kerr functions ----------------------------------------------------------------

@dataclass
class KerrFunction:
    H: object
    text: str = ""

    def __post_init__(self):
        if not self.H.holomorphic_form:
            raise ValueError(f"Kerr function {self.text!r} must be holomorphic (no conj/re/im)")

    @classmethod
    def parse(cls, text, params=None):
        return cls(parse(text, params=params, variables=KERR_NAMES), text)

    def evaluate(self, args, dim=None, order=2):
        return self.H.evaluate(dict(zip(KERR_NAMES, args)), dim, order)

    def value(self, args):
        return complex(self.evaluate([complex(a) for a in args], 0))

    def partials(self, args):
        """Holomorphic partials ``(H1, H2, H3)``."""
        env = [Jet2.variable(complex(a), k, 3, 1) for k, a in enumerate(args)]
        out = self.evaluate(env, 3, 1)
        if not isinstance(out, Jet2):
            return np.zeros(3, complex)
        return np.asarray(out.grad, complex)


def kerr_arguments(p, z):
    u, v, x, y = p
    w = complex(x, y)
    return [u - z * np.conj(w), w + z * v, z]


def kerr_residual(H, p, z):
    """``F(z) = H(u - z wbar, w + z v, z)`` and ``F'(z) = H3 - wbar H1 + v H2``."""
    u, v, x, y = p
    args = kerr_arguments(p, z)
    h1, h2, h3 = H.partials(args)
    return H.value(args), h3 - complex(x, -y) * h1 + v * h2


def kerr_solve(H, p, seed=0j, tol=SOLVE_TOL, maxiter=50):
    """Newton iteration for ``F(z) = 0`` started at ``seed``."""
    p = np.asarray(p, float)
    z = complex(seed)
    for _ in range(maxiter):
        F, dF = kerr_residual(H, p, z)
        if abs(dF) < DERIV_TOL:
            raise SolverError(f"F'(z) collapsed ({abs(dF):.2e}) at z = {z:.6g}", z)
        if abs(F) < tol:
            return z
        z = z - F / dF
        if not np.isfinite(z):
            raise SolverError("Newton iterate is not finite", z)
    F, dF = kerr_residual(H, p, z)
    if abs(F) < tol and abs(dF) >= DERIV_TOL:
        return z
    raise SolverError(f"no convergence after {maxiter} iterations (|F| = {abs(F):.2e})", z)


def branch_report(H, p, z, n=16):
    """For polynomial ``F``: all roots (from sampled coefficients) and the
    index of the one closest to ``z``."""
    r = 1 + abs(z)
    t = r * np.exp(2j * np.pi * np.arange(n) / n)
    vals = np.array([kerr_residual(H, p, s)[0] for s in t])
    coef = np.fft.fft(vals) / n / r ** np.arange(n)
    scale = np.max(np.abs(coef))
    keep = np.flatnonzero(np.abs(coef) > 1e-10 * scale)
    deg = int(keep[-1]) if keep.size else 0
    roots = np.roots(coef[:deg + 1][::-1]) if deg > 0 else np.array([])
    if not roots.size:
        return roots, None
    return roots, int(np.argmin(np.abs(roots - z)))


# --- Kerr fields -------------------------------------------------------------------

def _morton(points, bits=10):
    pts = np.asarray(points, float)
    lo, hi = pts.min(0), pts.max(0)
    q = ((pts - lo) / np.where(hi > lo, hi - lo, 1) * (2 ** bits - 1)).astype(np.int64)
    codes = np.zeros(len(pts), np.int64)
    for b in range(bits):
        for d in range(pts.shape[1]):
            codes |= ((q[:, d] >> b) & 1) << (b * pts.shape[1] + d)
    return np.argsort(codes, kind="stable")


class KerrField:
    """A direction field ``z`` on Minkowski space with the derived forms."""

    def __init__(self, chart, zjet, label="", H=None):
        self.chart = chart
        self._zjet = zjet
        self.label = label
        self.H = H
        self.failures = []
        self.solved = []

    # z as a jet over the real chart coordinates
    def zjet(self, p, order=2):
        return self._zjet(np.asarray(p, float), order)

    def z(self, p):
        return self.zjet(p, 0).value

    @property
    def kappa(self):
        c = self.chart
        Z = lambda p, o: -self.zjet(p, o)
        Zb = lambda p, o: -J.conj(self.zjet(p, o))
        ZZ = lambda p, o: -(self.zjet(p, o) * J.conj(self.zjet(p, o)))
        return FormField.from_terms(c, 1, [(covector_basis(c, "u"), 1), (covector_basis(c, "wbar"), Z),
                                           (covector_basis(c, "w"), Zb), (covector_basis(c, "v"), ZZ)],
                                    label=f"kappa[{self.label}]")

    @property
    def mu(self):
        c = self.chart
        return FormField.from_terms(c, 1, [(covector_basis(c, "w"), 1),
                                           (covector_basis(c, "v"), lambda p, o: self.zjet(p, o))],
                                    label=f"mu[{self.label}]")

    @property
    def lam(self):
        return FormField.from_components(self.chart, 1, {"v": 1}, label="lambda")

    @property
    def k(self):
        c = self.chart
        return VectorField.from_terms(c, [
            (vector_basis(c, "v"), 1), (vector_basis(c, "w"), lambda p, o: -self.zjet(p, o)),
            (vector_basis(c, "wbar"), lambda p, o: -J.conj(self.zjet(p, o))),
            (vector_basis(c, "u"), lambda p, o: -(self.zjet(p, o) * J.conj(self.zjet(p, o))))],
            label=f"k[{self.label}]")

    def nstructure(self):
        return NStructureSpec(self.kappa, [self.mu], f"N[{self.label}]")

    @classmethod
    def from_expression(cls, expr, chart=None, label=""):
        """A raw assignment of ``z`` (not necessarily from any ``H``)."""
        chart = chart or minkowski_chart()
        if isinstance(expr, str):
            label = label or expr
            expr = parse(expr, chart)

        def zjet(p, order):
            return J.lift(expr.evaluate(chart.seed(p, max(order, 1)), chart.dim, max(order, 1)),
                          chart.dim, max(order, 1))
        return cls(chart, zjet, label or str(expr))


def _implicit_jet(H, chart, p, z0, order):
    """Jet of the implicit solution through ``z0`` by two chord-Newton steps
    in jet arithmetic; each step gains one order."""
    env = chart.seed(p, max(order, 1))
    _, dF = kerr_residual(H, p, z0)
    Z = Jet2.constant(z0, chart.dim, max(order, 1))
    for _ in range(2):
        args = [env["u"] - Z * J.conj(env["w"]), env["w"] + Z * env["v"], Z]
        F = J.lift(H.evaluate(args, chart.dim, max(order, 1)), chart.dim, max(order, 1))
        Z = Z - F * (1 / dF)
    return Z


def kerr_congruence(H, points, seed=0j, label=""):
    """Solve for ``z`` on ``points`` by continuation and wrap the result.

    Points are visited in Morton order; each solve is seeded from the
    nearest point solved so far.  Later evaluations off the sample set seed
    from the nearest solved point as well.
    """
    if isinstance(H, str):
        H = KerrFunction.parse(H)
    chart = minkowski_chart()
    cache = {}

    def nearest_seed(p):
        if not cache:
            return seed
        keys = np.array(list(cache))
        return cache[tuple(keys[np.argmin(np.linalg.norm(keys - p, axis=1))])]

    def solve(p):
        key = tuple(np.asarray(p, float))
        if key not in cache:
            cache[key] = kerr_solve(H, p, nearest_seed(np.asarray(p, float)))
        return cache[key]

    def zjet(p, order):
        return _implicit_jet(H, chart, p, solve(p), order)

    field_ = KerrField(chart, zjet, label or H.text, H)
    pts = np.asarray(points, float)
    if len(pts):
        for i in _morton(pts):
            try:
                solve(pts[i])
                field_.solved.append(pts[i])
            except SolverError as err:
                field_.failures.append((pts[i].tolist(), str(err), err.last))
    return field_


def trivial_kerr_field(c):
    """Constant ``z = c``, i.e. ``H = z3 - c``."""
    return kerr_congruence(KerrFunction.parse(f"z3 - ({complex(c).real!r} + {complex(c).imag!r}*i)"),
                           [], seed=c, label=f"z={c}")


# --- descent and the CR equation -----------------------------------------------------

def descend(p, z):
    """``(u_z, w_z)`` at ``p`` for the value ``z``."""
    u, v, x, y = p
    w = complex(x, y)
    return (u - z * np.conj(w) - np.conj(z) * w - z * np.conj(z) * v).real, w + z * v


def descended_fields(kf):
    """``u_z`` and ``w_z`` as scalar fields for a Kerr field."""
    c = kf.chart

    def uz(p, o):
        env = c.seed(p, max(o, 1))
        Z = kf.zjet(p, o)
        return env["u"] - Z * J.conj(env["w"]) - J.conj(Z) * env["w"] - Z * J.conj(Z) * env["v"]

    def wz(p, o):
        env = c.seed(p, max(o, 1))
        return env["w"] + kf.zjet(p, o) * env["v"]
    return (FormField.scalar(c, uz, label="u_z"), FormField.scalar(c, wz, label="w_z"))


def creq_residual(w, chart, points):
    """``|d_zbar w - w d_u w|`` at each point; ``chart`` has coordinate ``u``
    and complex coordinate ``z``."""
    ix, iy, _ = chart.pair("z")
    iu = chart.index("u")
    out = []
    for p in points:
        jt = w.jet(chart, p, 1)
        dzb = 0.5 * (jt.grad[ix] + 1j * jt.grad[iy])
        out.append(abs(dzb - jt.value * jt.grad[iu]))
    return np.array(out)


def flat_kerr_chart():
    return Chart("kerrflat", ("u", "v", "x", "y"), ((2, 3, "z"),))


def flat_kerr_metric(w, partials, points=(), tol=1e-10, chart=None):
    """``g = kappa dv + mu mubar`` with ``kappa = du + wbar dz + w dzbar`` and
    ``mu = dw - v dz``.

    ``partials`` maps ``"u"``, ``"z"`` and ``"zbar"`` to expressions for the
    corresponding derivatives of ``w``; jets stop at order two, so ``dw``
    cannot be differentiated twice internally.  They are checked against
    the jets of ``w`` at ``points``, together with the CR equation.  A custom
    ``chart`` must have coordinates ``u``, ``v`` and a complex ``z``.
    """
    c = chart or flat_kerr_chart()
    try:
        c.index("u"), c.index("v"), c.pair("z")
    except (KeyError, ValueError):
        raise ValueError(f"chart {c.name!r} needs coordinates u, v and a complex z") from None
    def P(e):
        if isinstance(e, (int, float, complex)):
            e = f"({complex(e).real!r} + {complex(e).imag!r}*i)"
        return parse(e, c) if isinstance(e, str) else e
    w = P(w)
    parts = {k: P(v) for k, v in partials.items()}
    if set(parts) != {"u", "z", "zbar"}:
        raise ValueError("partials must be given for u, z and zbar")
    ix, iy, _ = c.pair("z")
    for p in points:
        jt = w.jet(c, p, 1)
        want = {"u": jt.grad[c.index("u")], "z": 0.5 * (jt.grad[ix] - 1j * jt.grad[iy]),
                "zbar": 0.5 * (jt.grad[ix] + 1j * jt.grad[iy])}
        for k, e in parts.items():
            if abs(e.value(c, p) - want[k]) > tol * (1 + abs(want[k])):
                raise ValueError(f"supplied partial d{k} w does not match at {np.round(p, 6).tolist()}")
        if creq_residual(w, c, [p])[0] > tol:
            raise ValueError(f"w violates the CR equation at {np.round(p, 6).tolist()}")
    dz, dzb = covector_basis(c, "z"), covector_basis(c, "zbar")
    kappa = FormField.from_terms(c, 1, [(covector_basis(c, "u"), 1), (dz, P(f"conj({w})")),
                                        (dzb, w)], label="kappa")
    mu = FormField.from_terms(c, 1, [(covector_basis(c, "u"), parts["u"]),
                                     (dz, P(f"({parts['z']}) - v")), (dzb, parts["zbar"])],
                              label="mu")
    dv = FormField.from_components(c, 1, {"v": 1})
    return MetricField.from_products(c, [(kappa, dv), (mu, mu.conj())], label=f"kerrflat[{w}]")


# --- identities ----------------------------------------------------------------------

def volume_identity_residual(kf, p):
    """``|(|Zbar _| dw_z - v|^2 det D(u_z, v, z) - 1)|`` at ``p``."""
    uz, wz = descended_fields(kf)
    Z = kf.zjet(p, 1)
    D = np.array([uz.jet(p, 1).g[:, 0].real, [0, 1, 0, 0], Z.grad.real, Z.grad.imag])
    q = np.linalg.solve(D.T, wz.jet(p, 1).g[:, 0])        # d/du_z, d/dv, d/dRe z, d/dIm z
    wval = wz.value(p)[0]
    zbar_dw = 0.5 * (q[2] - 1j * q[3]) - np.conj(wval) * q[0]
    return abs(abs(zbar_dw - p[1]) ** 2 * np.linalg.det(D) - 1)


def lorentz_family_residual(z):
    """For constant ``z``: ``|kappa_z lambda_z + mu_z mubar_z - g|`` and the
    determinant of the coframe change."""
    c = minkowski_chart()
    du, dv, dw, dwb = (covector_basis(c, k) for k in ("u", "v", "w", "wbar"))
    kz = du - z * dwb - np.conj(z) * dw - z * np.conj(z) * dv
    mz = dw + z * dv
    sym = lambda a, b: 0.5 * (np.outer(a, b) + np.outer(b, a))
    g = sym(kz, dv) + sym(mz, mz.conj())
    g0 = minkowski_metric(c).value(np.zeros(4))
    M = np.array([kz, dv, mz.real, mz.imag]).real
    M0 = np.array([du, dv, dw.real, dw.imag]).real
    return float(np.max(np.abs(g - g0))), float(np.linalg.det(M @ np.linalg.inv(M0)))


# --- shear-free congruences and CR submanifolds ----------------------------------------

def twistor_cr_chart():
    """The 5-dimensional CR space with coordinates ``(U, W, Z)``:
    ``kappa = dU + W dZbar + Wbar dZ``, ``mu = (dW, dZ)``."""
    c = Chart("cr5", ("U", "a", "b", "c", "d"), ((1, 2, "W"), (3, 4, "Z")))
    P = lambda s: parse(s, c)
    kappa = FormField.from_terms(c, 1, [(covector_basis(c, "U"), 1), (covector_basis(c, "Zbar"), P("W")),
                                        (covector_basis(c, "Z"), P("conj(W)"))], label="kappa")
    mus = [FormField.from_terms(c, 1, [(covector_basis(c, k), 1)], label=f"d{k}") for k in ("W", "Z")]
    return CRChart(c, kappa, mus, "twistor CR space")


def _real_parts(jets, parts, dim, order):
    vals = JetArray.from_jets(jets, dim, order)
    mask = np.array([s == "re" for s in parts])
    re, im = vals.real, vals.imag
    return JetArray(np.where(mask, re.v, im.v), None if vals.g is None else np.where(mask, re.g, im.g),
                    None if vals.h is None else np.where(mask, re.h, im.h))


def leaf_map(kf, target):
    """``f o pi: (u, v, w) -> (u_z, w_z, z)`` as a chart map."""
    uz, wz = descended_fields(kf)

    def fn(p, order):
        U = uz.jet(p, order)[0]
        W = wz.jet(p, order)[0]
        Z = kf.zjet(p, order)
        items = [_scalar(U, order), _scalar(W, order), _scalar(W, order), Z, Z]
        return _real_parts([_trunc(j, order) for j in items], ["re", "re", "im", "re", "im"],
                           kf.chart.dim, order)
    return ChartMap(kf.chart, target, fn, f"leaf[{kf.label}]")


def _scalar(ja, order):
    return Jet2(ja.v.item(), None if ja.g is None else ja.g.reshape(-1),
                None if ja.h is None else ja.h.reshape(ja.g.shape[0], ja.g.shape[0]))


def _trunc(j, order):
    if order == 0:
        return j.value
    return j if order == 2 else Jet2(j.value, j.grad, None)


@dataclass
class CRSubEntry:
    point: list
    crsub: float
    slice_ok: bool
    shear: float
    geodesic: float

    def agree(self, tol=1e-8):
        return (self.crsub < tol) == (self.shear < tol)


@dataclass
class CRSubReport:
    label: str
    entries: list = field(default_factory=list)
    errors: list = field(default_factory=list)

    def agree(self, tol=1e-8):
        return all(e.agree(tol) for e in self.entries) and not self.errors

    @property
    def max_crsub(self):
        return max(e.crsub for e in self.entries)

    @property
    def max_shear(self):
        return max(e.shear for e in self.entries)

    @property
    def min_crsub(self):
        return min(e.crsub for e in self.entries)

    @property
    def min_shear(self):
        return min(e.shear for e in self.entries)


def shearfree_iff_crsub(kf, points, tol=1e-8):
    """Pair ``|(f o pi)^* omega|`` on the twistor CR space with the shear
    residual of ``k_z`` at each point.

    The slice ``v = const`` through each point is also run through
    :func:`robinson.cr.cr_submanifold_check`, which requires ``f`` to be an
    immersion of the leaf space.
    """
    cr5 = twistor_cr_chart()
    F = leaf_map(kf, cr5.chart)
    om = pullback_field(F, cr5.omega())
    pulled = [pullback_field(F, f) for f in [cr5.kappa] + cr5.mus]
    g = minkowski_metric(kf.chart)
    leaf = Chart("leaf", ("u", "x", "y"), ((1, 2, "w"),))
    rep = CRSubReport(kf.label)
    for p in points:
        p = np.asarray(p, float)
        try:
            Jac = F.jet(p, 1).g
            if np.linalg.matrix_rank(Jac, tol=1e-10 * (1 + np.abs(Jac).max())) < 3:
                raise ValueError(f"leaf map has rank < 3 at {np.round(p, 6).tolist()}")
            scale = 1 + np.prod([np.linalg.norm(f.value(p)) for f in pulled])
            r = float(np.linalg.norm(om.value(p))) / scale
            v0 = p[1]
            S = ChartMap(leaf, kf.chart, lambda q, o, v0=v0: _slice_jet(q, v0, o), "slice")
            sub = cr_submanifold_check(S.then(F), cr5, p[[0, 2, 3]], tol)
            rep.entries.append(CRSubEntry(p.tolist(), r, sub.ok, shear_residual(kf.k, g, p).residual,
                                          geodesic_residual(kf.k, g, p)))
        except (ArithmeticError, ValueError) as err:
            rep.errors.append(f"{type(err).__name__}: {err}")
    return rep


def _slice_jet(q, v0, order):
    v = np.array([q[0], v0, q[1], q[2]], complex)
    g = np.zeros((3, 4), complex)
    g[0, 0] = g[1, 2] = g[2, 3] = 1
    return JetArray(v, g if order >= 1 else None, np.zeros((3, 3, 4), complex) if order >= 2 else None)


# --- the twistor bundle ---------------------------------------------------------------------

@dataclass
class TwistorBundle:
    chart: Chart
    metric: MetricField
    nstructure: NStructureSpec
    k: VectorField


def twistor_bundle_minkowski():
    """Metric ``du dv + dw dwbar + (1 + z zbar/4)^-2 dz dzbar`` on
    ``(u, v, w, z)`` with ``N_P^0 = span{kappa_z, mu_z, dz}``."""
    c = Chart("twistorP", ("u", "v", "x", "y", "a", "b"), ((2, 3, "w"), (4, 5, "z")))
    P = lambda s: parse(s, c)
    T = lambda *terms: FormField.from_terms(c, 1, [(covector_basis(c, k), P(e) if isinstance(e, str) else e)
                                                   for k, e in terms])
    du, dv = T(("u", 1)), T(("v", 1))
    dw, dz = T(("w", 1)), T(("z", 1))
    g = MetricField.from_products(c, [(du, dv), (dw, dw.conj()),
                                      (dz * FormField.scalar(c, P("(1+z*conj(z)/4)^-2")), dz.conj())],
                                  label="twistor bundle")
    kappa = T(("u", 1), ("wbar", "-z"), ("w", "-conj(z)"), ("v", "-z*conj(z)"))
    mu = T(("w", 1), ("v", "z"))
    k = VectorField.from_terms(c, [(vector_basis(c, "v"), 1), (vector_basis(c, "w"), P("-z")),
                                   (vector_basis(c, "wbar"), P("-conj(z)")),
                                   (vector_basis(c, "u"), P("-z*conj(z)"))], label="k_z")
    return TwistorBundle(c, g, NStructureSpec(kappa, [mu, dz], "N_P"), k)


def quadric_residual(z1, z2, z3):
    """``z3 - conj(z3) + z1 conj(z2) - conj(z1) z2``; purely imaginary."""
    return z3 - np.conj(z3) + z1 * np.conj(z2) - np.conj(z1) * z2


@dataclass
class TwistorPoint:
    comps: np.ndarray

    def __post_init__(self):
        self.comps = np.asarray(self.comps, complex)
        if self.comps.shape != (4,) or not np.any(self.comps):
            raise ValueError("a twistor direction needs four components, not all zero")

    def same_direction(self, other, tol=1e-12):
        a = self.comps / np.linalg.norm(self.comps)
        b = other.comps / np.linalg.norm(other.comps)
        return 1 - abs(np.vdot(a, b)) < tol


def to_projective_twistor(z1, z2, z3):
    return TwistorPoint([1 + 1j * z3, z1 - 1j * z2, 1 - 1j * z3, z1 + 1j * z2])


def null_norm(t):
    """``|w1|^2 + |w2|^2 - |w3|^2 - |w4|^2``; equals ``2i`` times the
    quadric residual on the image of ``C^3``."""
    w = t.comps
    return float(abs(w[0]) ** 2 + abs(w[1]) ** 2 - abs(w[2]) ** 2 - abs(w[3]) ** 2)


@dataclass
class NullLine:
    z1: complex
    z2: complex
    z3: complex

    def __call__(self, t):
        u = (0.5 * (self.z3 + np.conj(self.z3) + self.z1 * np.conj(self.z2) + np.conj(self.z1) * self.z2)
             - self.z1 * np.conj(self.z1) * t)
        w = self.z2 - self.z1 * t
        return np.array([u.real, t, w.real, w.imag])

    @property
    def tangent(self):
        """``dl/dt`` in ``(u, v, x, y)``; equal to ``k_z`` with ``z = z1``."""
        z = self.z1
        return np.array([-abs(z) ** 2, 1.0, -z.real, -z.imag])


def line_from_twistor(z1, z2, z3, tol=1e-10):
    z1, z2, z3 = complex(z1), complex(z2), complex(z3)
    q = quadric_residual(z1, z2, z3)
    if abs(q) > tol * (1 + abs(z1) * abs(z2) + abs(z3)):
        raise ValueError(f"point is off the quadric (residual {abs(q):.2e})")
    return NullLine(z1, z2, z3)


def twistor_from_line(p, z):
    """Quadric point of the null line through ``p`` with direction ``k_z``."""
    if z is None or not np.isfinite(z):
        raise ValueError("lines parallel to d_u have no point on the quadric chart")
    u, v, x, y = p
    w = complex(x, y)
    return complex(z), w + z * v, u - z * np.conj(w)


__all__ = [
    "CRSubReport", "KerrField", "KerrFunction", "NullLine", "SolverError", "TwistorBundle",
    "TwistorPoint", "branch_report", "creq_residual", "descend", "descended_fields",
    "flat_kerr_chart", "flat_kerr_metric", "kerr_congruence", "kerr_residual", "kerr_solve",
    "line_from_twistor", "lorentz_family_residual", "minkowski_chart", "minkowski_metric",
    "null_norm", "quadric_residual", "shearfree_iff_crsub", "to_projective_twistor",
    "trivial_kerr_field", "twistor_bundle_minkowski", "twistor_cr_chart", "twistor_from_line",
    "volume_identity_residual",
]
