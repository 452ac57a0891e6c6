"""Named checks run against loaded models, and the reports they produce."""

from __future__ import annotations

import time
from collections import Counter
from dataclasses import dataclass, field
from numbers import Number

import numpy as np

from .. import cr as CR
from .. import kerrtwistor as KT
from ..algclass import petrov_at
from ..curvature import curvature_at
from ..exprjet import DomainError
from ..fields import exterior_derivative
from ..optics import (expansion, geodesic_residual, null_residual, nstructure_integrability,
                      screen_nstructure, shear_residual, twist, verify_null_maxwell)
from ..report import CheckReport, _plain
from .loader import ModelError

DEFAULT_POINTS = 100
DEFAULT_TOL = 1e-8
PETROV_TOL = 1e-6
_ERRORS = (ArithmeticError, ValueError, np.linalg.LinAlgError)


@dataclass
class Config:
    points: int = None        # None: each check's own sample count, else DEFAULT_POINTS
    seed: int = 0
    tol: float = DEFAULT_TOL
    timing: bool = False
    only: tuple = ()

    def __post_init__(self):
        if self.points is not None and self.points < 1:
            raise ValueError("points must be at least 1")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass
class Outcome:
    model: str
    check: str
    kind: str
    expected: object
    observed: object
    report: CheckReport
    basis: str = ""
    note: str = ""
    seconds: float = 0.0

    @property
    def passed(self):
        return bool(self.report.verdict)

    def record(self, seed, timing=False):
        r = self.report.record()
        out = {"model": self.model, "check": self.check, "kind": self.kind,
               "expected": _plain(self.expected), "observed": _plain(self.observed),
               "verdict": "pass" if self.passed else "fail", "tol": r["tol"],
               "max_residual": r["max_residual"], "min_residual": r["min_residual"],
               "samples": r["n_points"], "seed": seed, "worst_point": r["worst_point"]}
        if "errors" in r:
            out["errors"] = r["errors"]
        if "details" in r:
            out["details"] = r["details"]
        if self.basis:
            out["basis"] = self.basis
        if timing:
            out["wall_time"] = round(self.seconds, 4)
        return out

    def line(self, timing=False):
        flag = "PASS" if self.passed else "FAIL"
        rep = self.report
        stat = rep.max_residual if rep.expect_zero else rep.min_residual
        s = (f"{flag}  {self.check:<34} expected {_short(self.expected):<14} "
             f"observed {_short(self.observed):<14} "
             f"{'max' if rep.expect_zero else 'min'} {stat:9.2e}  tol {rep.tol:.0e}  "
             f"n={len(rep.residuals)}")
        if rep.errors:
            s += f"  errors={len(rep.errors)} ({rep.errors[0]})"
        if timing:
            s += f"  {self.seconds:.2f}s"
        return s


def _short(x):
    if isinstance(x, float):
        return f"{x:.3g}"
    return str(x)


@dataclass
class Report:
    model: str
    seed: int
    outcomes: list = field(default_factory=list)
    error: str = ""

    @property
    def passed(self):
        return not self.error and all(o.passed for o in self.outcomes)

    def records(self, timing=False):
        if self.error:
            return [{"model": self.model, "check": "load", "verdict": "error", "error": self.error}]
        out = [o.record(self.seed, timing) for o in self.outcomes]
        out.append({"model": self.model, "check": "overall",
                    "verdict": "pass" if self.passed else "fail",
                    "passed": sum(o.passed for o in self.outcomes), "total": len(self.outcomes),
                    "seed": self.seed})
        return out

    def text(self, timing=False):
        lines = [f"== {self.model} (seed {self.seed})"]
        if self.error:
            lines.append(f"ERROR  {self.error}")
            return "\n".join(lines)
        lines += ["  " + o.line(timing) for o in self.outcomes]
        n = sum(o.passed for o in self.outcomes)
        lines.append(f"  {'PASS' if self.passed else 'FAIL'}  {n}/{len(self.outcomes)} checks")
        return "\n".join(lines)


# --- context ---------------------------------------------------------------------------

class Context:
    def __init__(self, model, cfg):
        self.model = model
        self.cfg = cfg
        self._kerr = {}

    def count(self, spec):
        if self.cfg.points is not None:
            return self.cfg.points
        return int(spec.get("samples", DEFAULT_POINTS))

    def points(self, box, spec):
        return box.sample(self.count(spec), self.cfg.seed)

    def tol(self, spec):
        return float(spec.get("tol", self.cfg.tol))

    def kerr(self, points):
        key = (len(points), points.tobytes())
        if key not in self._kerr:
            self._kerr[key] = self.model.kerr_field(points)
        return self._kerr[key]


def _bool_expect(spec):
    e = spec.get("expect", True)
    if isinstance(e, str):
        e = {"zero": True, "true": True, "nonzero": False, "false": False}.get(e.lower())
    if not isinstance(e, bool):
        raise ModelError(f"check {spec['check']!r}: expect must be true/false or zero/nonzero")
    return e


def _pointwise(name, fn, points, tol, expect_zero):
    res, pts, errs = [], [], []
    for p in points:
        try:
            r = float(fn(p))
        except _ERRORS as err:
            errs.append(f"{type(err).__name__}: {err}")
            continue
        res.append(r)
        pts.append([float(x) for x in p])
    return CheckReport(name, res, tol, expect_zero, pts, errors=errs)


def _zero_word(rep):
    if not rep.residuals:
        return "error"
    if rep.max_residual <= rep.tol:
        return "zero"
    if rep.min_residual > rep.tol:
        return "nonzero"
    return "mixed"


def _boolean(ctx, spec, fn, box):
    expect = _bool_expect(spec)
    rep = _pointwise(spec["check"], fn, ctx.points(box, spec), ctx.tol(spec), expect)
    return rep, "zero" if expect else "nonzero", _zero_word(rep)


# --- metric checks ------------------------------------------------------------------------

def _metric(ctx, spec):
    entry = ctx.model.metric(spec.get("metric"))
    return entry.field, entry.box


def _field(ctx, spec, g):
    if "field" not in spec:
        raise ModelError(f"check {spec['check']!r} needs a field")
    return ctx.model.vector(spec["field"], g.chart, f"field of {spec['check']}")


def check_flat(ctx, spec):
    g, box = _metric(ctx, spec)
    return _boolean(ctx, spec, lambda p: curvature_at(g, p).flatness_residual(), box)


def check_ricci_flat(ctx, spec):
    g, box = _metric(ctx, spec)
    return _boolean(ctx, spec, lambda p: curvature_at(g, p).ricci_residual(), box)


def check_petrov(ctx, spec):
    g, box = _metric(ctx, spec)
    want = str(spec.get("expect"))
    tol = float(spec.get("classify_tol", PETROV_TOL))
    seen = Counter()

    def fn(p):
        t = petrov_at(curvature_at(g, p), seed=ctx.cfg.seed, tol=tol).type
        seen[t] += 1
        return 0.0 if t == want else 1.0
    rep = _pointwise("petrov", fn, ctx.points(box, spec), 0.0, True)
    rep.details = {"types": dict(sorted(seen.items())), "classify_tol": tol}
    return rep, want, _mode(seen)


def _mode(counter):
    if not counter:
        return "error"
    if len(counter) == 1:
        return next(iter(counter))
    return "mixed " + ",".join(f"{k}x{v}" for k, v in sorted(counter.items()))


def check_null(ctx, spec):
    g, box = _metric(ctx, spec)
    k = _field(ctx, spec, g)
    return _boolean(ctx, spec, lambda p: null_residual(k, g, p), box)


def check_geodesic(ctx, spec):
    g, box = _metric(ctx, spec)
    k = _field(ctx, spec, g)
    return _boolean(ctx, spec, lambda p: geodesic_residual(k, g, p), box)


def check_shear(ctx, spec):
    g, box = _metric(ctx, spec)
    k = _field(ctx, spec, g)
    return _boolean(ctx, spec, lambda p: shear_residual(k, g, p).residual, box)


def check_sng(ctx, spec):
    g, box = _metric(ctx, spec)
    k = _field(ctx, spec, g)
    return _boolean(ctx, spec, lambda p: max(geodesic_residual(k, g, p),
                                             shear_residual(k, g, p).residual), box)


def check_twist(ctx, spec):
    g, box = _metric(ctx, spec)
    k = _field(ctx, spec, g)
    return _boolean(ctx, spec, lambda p: twist(k, g, p), box)


def check_expansion(ctx, spec):
    g, box = _metric(ctx, spec)
    k = _field(ctx, spec, g)
    return _boolean(ctx, spec, lambda p: abs(expansion(k, g, p)), box)


def check_screen_integrable(ctx, spec):
    g, box = _metric(ctx, spec)
    ns = screen_nstructure(_field(ctx, spec, g), g)
    return _boolean(ctx, spec, lambda p: max(nstructure_integrability(ns, p)), box)


def check_nstructure(ctx, spec):
    name = spec.get("nstructure")
    if name not in ctx.model.nstructures:
        raise ModelError(f"unknown N-structure {name!r}")
    ns = ctx.model.nstructures[name]
    box = ctx.model.metrics[name].box if name in ctx.model.metrics else ctx.model.domain
    return _boolean(ctx, spec, lambda p: max(nstructure_integrability(ns, p)), box)


def check_null_maxwell(ctx, spec):
    g, box = _metric(ctx, spec)
    F = ctx.model.form(spec["form"], g.chart, "Maxwell field")
    kap = ctx.model.form(spec["kappa"], g.chart, "Maxwell kappa")
    parts = []

    def fn(p):
        r = verify_null_maxwell(F, kap, g, p=p)
        parts.append(r)
        return max(r)
    rep, exp, obs = _boolean(ctx, spec, fn, box)
    if parts:
        rep.details = {"max_self_dual": max(r[0] for r in parts),
                       "max_closed": max(r[1] for r in parts),
                       "max_aligned": max(r[2] for r in parts)}
    return rep, exp, obs


def check_matches(ctx, spec):
    g, box = _metric(ctx, spec)
    ref = ctx.model.metric(spec["reference"]).field

    def fn(p):
        a, b = g.value(p), ref.value(p)
        return np.max(np.abs(a - b)) / (1 + np.max(np.abs(b)))
    return _boolean(ctx, spec, fn, box)


def check_creq(ctx, spec):
    m = ctx.model
    w = m.expr(spec["w"], what="CR-equation w")
    if isinstance(w, Number):
        w = m.expr(str(w))
    return _boolean(ctx, spec, lambda p: KT.creq_residual(w, m.chart, [p])[0], m.domain)


# --- CR checks ----------------------------------------------------------------------------

def check_levi(ctx, spec):
    m = ctx.model
    c = m.crchart(spec["chart"])
    want = str(spec.get("expect"))
    h_exp = spec.get("h")
    tol = ctx.tol(spec)
    classify_tol = float(spec.get("classify_tol", 1e-10))
    seen = Counter()

    def fn(p):
        rep = CR.classify(c, [p], classify_tol)
        if rep.errors:
            raise ValueError(rep.errors[0])
        v = rep.verdicts[0]
        seen[v] += 1
        if v != want:
            return 1.0
        if h_exp is None:
            return 0.0
        h = rep.entries[0].h
        he = np.array([[complex(str(x).replace("i", "j")) for x in row] for row in h_exp])
        return float(np.max(np.abs(h - he)) / (1 + np.max(np.abs(he))))
    rep = _pointwise("levi", fn, ctx.points(m.domain, spec), tol, True)
    rep.details = {"verdicts": dict(sorted(seen.items()))}
    return rep, want, _mode(seen)


def check_cr_integrable(ctx, spec):
    c = ctx.model.crchart(spec["chart"])
    return _boolean(ctx, spec, lambda p: max(CR.integrability_residual(c, p)), ctx.model.domain)


def check_tangential(ctx, spec):
    m = ctx.model
    c = m.crchart(spec["chart"])
    z = m.expr(spec["function"], what="CR function")
    if isinstance(z, Number):
        z = m.expr(str(z))
    return _boolean(ctx, spec, lambda p: CR.tangential_cr_residual(z, c, p), m.domain)


def check_equivalent(ctx, spec):
    m = ctx.model
    first, second = m.crchart(spec["first"]), m.crchart(spec["second"])
    fits = {k: spec[k] for k in ("a", "b", "B") if k in spec}
    fitted = []

    def fn(p):
        e = CR.cr_equivalent(first, second, p)
        fitted.append(e.a)
        if not e.equivalent:
            return max(e.residual, 1.0 if "spans" not in e.reason else e.residual)
        err = e.residual
        got = {"a": e.a, "b": e.b, "B": e.B}
        for k, v in fits.items():
            want = np.array([_value(m, x, p) for x in np.ravel(np.asarray(v, dtype=object))])
            err = max(err, float(np.max(np.abs(np.ravel(got[k]) - want)) / (1 + np.max(np.abs(want)))))
        return err
    rep, exp, obs = _boolean(ctx, spec, fn, m.domain)
    exp, obs = ("equivalent" if exp else "inequivalent",
                {"zero": "equivalent", "nonzero": "inequivalent"}.get(obs, obs))
    if fitted:
        rep.details = {"a_first": fitted[0]}
    return rep, exp, obs


def _value(m, x, p):
    e = m.expr(x, what="fitted coefficient")
    return complex(e) if isinstance(e, Number) else e.value(m.chart, p)


# --- Kerr checks ----------------------------------------------------------------------------

def _kerr(ctx, spec):
    pts = ctx.points(ctx.model.domain, spec)
    kf = ctx.kerr(pts)
    bad = {tuple(f[0]) for f in kf.failures}
    return kf, pts, bad


def _kerr_boolean(ctx, spec, fn):
    kf, pts, bad = _kerr(ctx, spec)
    expect = _bool_expect(spec)

    def guarded(p):
        if tuple(float(x) for x in p) in bad:
            raise KT.SolverError("no solution of the Kerr equation at this point")
        return fn(kf, p)
    rep = _pointwise(spec["check"], guarded, pts, ctx.tol(spec), expect)
    return rep, "zero" if expect else "nonzero", _zero_word(rep)


def check_solver(ctx, spec):
    m = ctx.model
    if "H" not in m.kerr:
        raise ModelError("the solver check needs a Kerr function H")
    H = m.kerr["H"]
    kf, pts, bad = _kerr(ctx, spec)

    def fn(p):
        if tuple(float(x) for x in p) in bad:
            return 1.0          # unsolved: the residual is reported as order one
        return abs(KT.kerr_residual(H, p, kf.z(p))[0])
    expect = _bool_expect(spec)
    rep = _pointwise("solver", fn, pts, float(spec.get("tol", 1e-12)), expect)
    rep.details = {"unsolved": len(bad)}
    return rep, "zero" if expect else "nonzero", _zero_word(rep)


def check_kerr_integrable(ctx, spec):
    ns = {}

    def fn(kf, p):
        if "ns" not in ns:
            ns["ns"] = kf.nstructure()
        return max(nstructure_integrability(ns["ns"], p))
    return _kerr_boolean(ctx, spec, fn)


_MINK = {}


def _mink():
    if "g" not in _MINK:
        _MINK["g"] = KT.minkowski_metric()
    return _MINK["g"]


def check_kerr_shear(ctx, spec):
    return _kerr_boolean(ctx, spec, lambda kf, p: shear_residual(kf.k, _mink(), p).residual)


def check_kerr_geodesic(ctx, spec):
    return _kerr_boolean(ctx, spec, lambda kf, p: geodesic_residual(kf.k, _mink(), p))


def check_kerr_twist(ctx, spec):
    return _kerr_boolean(ctx, spec, lambda kf, p: twist(kf.k, _mink(), p))


def check_volume_identity(ctx, spec):
    return _kerr_boolean(ctx, spec, KT.volume_identity_residual)


def check_descent(ctx, spec):
    def fn(kf, p):
        k = kf.k.value(p)
        return max(abs(k @ exterior_derivative(f).value(p)) for f in KT.descended_fields(kf))
    return _kerr_boolean(ctx, spec, fn)


def _crsub(ctx, spec):
    kf, pts, bad = _kerr(ctx, spec)
    pts = [p for p in pts if tuple(float(x) for x in p) not in bad]
    return KT.shearfree_iff_crsub(kf, pts, ctx.tol(spec))


def check_crsub(ctx, spec):
    sub = _crsub(ctx, spec)
    expect = _bool_expect(spec)
    rep = CheckReport("crsub", [e.crsub for e in sub.entries], ctx.tol(spec), expect,
                      [e.point for e in sub.entries], errors=sub.errors)
    return rep, "zero" if expect else "nonzero", _zero_word(rep)


def check_crsub_agree(ctx, spec):
    sub = _crsub(ctx, spec)
    tol = ctx.tol(spec)
    rep = CheckReport("crsub_agree", [0.0 if e.agree(tol) else 1.0 for e in sub.entries], 0.0, True,
                      [e.point for e in sub.entries], errors=sub.errors)
    if sub.entries:
        rep.details = {"max_crsub": sub.max_crsub, "max_shear": sub.max_shear,
                       "min_crsub": sub.min_crsub, "min_shear": sub.min_shear,
                       "slices_ok": sum(e.slice_ok for e in sub.entries)}
    ok = rep.verdict
    return rep, "agree", "agree" if ok else "disagree"


# --- twistor checks ---------------------------------------------------------------------------

def _rng(ctx, spec):
    return np.random.default_rng(ctx.cfg.seed), ctx.count(spec)


def check_quadric_identity(ctx, spec):
    """``null_norm(f(z)) = 2i q(z)`` on points both on and off the quadric."""
    rng, n = _rng(ctx, spec)
    z = rng.normal(size=(n, 3)) + 1j * rng.normal(size=(n, 3))
    on = np.arange(n) % 2 == 0
    # project half the points onto the quadric by fixing Im z3
    q = KT.quadric_residual(z[:, 0], z[:, 1], z[:, 2])
    z[on, 2] -= 0.5 * q[on]
    res, pts = [], []
    for row in z:
        nn = KT.null_norm(KT.to_projective_twistor(*row))
        qq = KT.quadric_residual(*row)
        res.append(abs(nn - (2j * qq).real) / (1 + np.sum(np.abs(row) ** 2)) + abs((2j * qq).imag))
        pts.append(np.concatenate([row.real, row.imag]).tolist())
    rep = CheckReport("quadric_identity", res, ctx.tol(spec), True, pts)
    offq = [abs(KT.quadric_residual(*r)) for r in z[~on]]
    rep.details = {"on_quadric": int(on.sum()), "min_off_quadric_residual": min(offq) if offq else None}
    return rep, "zero", _zero_word(rep)


def check_line_roundtrip(ctx, spec):
    """Point and direction -> quadric point -> null line through the point."""
    box = ctx.model.domain
    rng, n = _rng(ctx, spec)
    P = ctx.points(box, spec)[:, :4]          # (u, v, x, y) of the bundle chart
    zs = rng.normal(size=len(P)) + 1j * rng.normal(size=len(P))

    def fn(i):
        p, z = P[int(i)], zs[int(i)]
        t = KT.twistor_from_line(p, z)
        line = KT.line_from_twistor(*t)
        kz = np.array([-abs(z) ** 2, 1.0, -z.real, -z.imag])
        return max(np.max(np.abs(line(p[1]) - p)), np.max(np.abs(line.tangent - kz)))
    rep = _pointwise("line_roundtrip", lambda i: fn(i[0]), [[i] for i in range(len(P))],
                     ctx.tol(spec), True)
    rep.points = [P[int(i[0])].tolist() for i in rep.points]
    return rep, "zero", _zero_word(rep)


def check_bundle_integrable(ctx, spec):
    tb = KT.twistor_bundle_minkowski()
    return _boolean(ctx, spec, lambda p: max(nstructure_integrability(tb.nstructure, p)),
                    ctx.model.domain)


def check_bundle_null(ctx, spec):
    tb = KT.twistor_bundle_minkowski()
    return _boolean(ctx, spec, lambda p: null_residual(tb.k, tb.metric, p), ctx.model.domain)


def check_lorentz_family(ctx, spec):
    rng, n = _rng(ctx, spec)
    zs = rng.normal(size=n) + 1j * rng.normal(size=n)

    def fn(z):
        r, det = KT.lorentz_family_residual(complex(z[0], z[1]))
        return max(r, abs(det - 1))
    rep = _pointwise("lorentz_family", fn, [[z.real, z.imag] for z in zs], ctx.tol(spec), True)
    return rep, "zero", _zero_word(rep)


CHECKS = {
    "metric": {
        "flat": check_flat, "ricci_flat": check_ricci_flat, "petrov": check_petrov,
        "null": check_null, "geodesic": check_geodesic, "shear": check_shear, "sng": check_sng,
        "twist": check_twist, "expansion": check_expansion,
        "screen_integrable": check_screen_integrable, "nstructure": check_nstructure,
        "null_maxwell": check_null_maxwell, "matches": check_matches, "creq": check_creq,
    },
    "cr": {
        "levi": check_levi, "integrable": check_cr_integrable, "tangential": check_tangential,
        "equivalent": check_equivalent,
    },
    "kerr": {
        "solver": check_solver, "integrable": check_kerr_integrable, "shear": check_kerr_shear,
        "geodesic": check_kerr_geodesic, "twist": check_kerr_twist,
        "volume_identity": check_volume_identity, "descent": check_descent,
        "crsub": check_crsub, "crsub_agree": check_crsub_agree,
    },
    "twistor": {
        "quadric_identity": check_quadric_identity, "line_roundtrip": check_line_roundtrip,
        "bundle_integrable": check_bundle_integrable, "bundle_null": check_bundle_null,
        "lorentz_family": check_lorentz_family,
    },
}
# CR models may also carry lifted metrics
CHECKS["cr"].update({k: v for k, v in CHECKS["metric"].items() if k not in CHECKS["cr"]})


def check_id(spec):
    if "id" in spec:
        return str(spec["id"])
    from .loader import _target
    t = _target(spec)
    out = spec["check"] + (f"({t})" if t and t != spec.get("metric") else "")
    if "metric" in spec:
        out += f"[{spec['metric']}]"
    return out


def run_checks(model, cfg=None):
    """Run every declared check of ``model``; failures are recorded per check."""
    cfg = cfg or Config()
    table = CHECKS[model.kind]
    ctx = Context(model, cfg)
    report = Report(model.name, cfg.seed)
    ids = Counter()
    for spec in model.checks:
        name = spec["check"]
        cid = check_id(spec)
        ids[cid] += 1
        if ids[cid] > 1:
            cid = f"{cid}#{ids[cid]}"
        if cfg.only and name not in cfg.only and cid not in cfg.only:
            continue
        t0 = time.perf_counter()
        if name not in table:
            rep = CheckReport(name, [], ctx.tol(spec), errors=[f"unknown check for a {model.kind} model"])
            exp, obs = spec.get("expect", True), "error"
        else:
            try:
                rep, exp, obs = table[name](ctx, spec)
            except (ModelError, KeyError, DomainError, *_ERRORS) as err:
                msg = f"{type(err).__name__}: {err}"
                rep = CheckReport(name, [], ctx.tol(spec), errors=[msg])
                exp, obs = spec.get("expect", True), "error"
        report.outcomes.append(Outcome(model.name, cid, name, exp, obs, rep, spec.get("basis", ""),
                                       spec.get("note", ""), time.perf_counter() - t0))
    return report


__all__ = ["CHECKS", "Config", "DEFAULT_POINTS", "DEFAULT_TOL", "Outcome", "Report", "check_id",
           "run_checks"]
