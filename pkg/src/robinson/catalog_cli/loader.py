"""Model files: YAML documents describing charts, fields and expected checks.

A model is turned into live objects (charts, form/vector/metric fields, CR
charts, Kerr fields) by :func:`load_model`.  The grammar is documented in the
README; every malformed input raises :class:`ModelError` with the model name
and the offending key.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from numbers import Number
from pathlib import Path

import yaml

from ..cr import CRChart, embed_from_defining
from ..exprjet import Chart, ExpressionError, parse
from ..fields import (Box, ChartMap, FormField, MetricField, VectorField, covector_basis,
                      form_basis, vector_basis)
from ..kerrtwistor import (KerrField, KerrFunction, flat_kerr_metric, minkowski_chart,
                           twistor_bundle_minkowski)
from ..optics import NStructureSpec, bateman_transform, lift_cr

KINDS = ("metric", "cr", "kerr", "twistor")
TOP_KEYS = {"name", "kind", "title", "chart", "params", "define", "domain", "forms", "vectors",
            "metric", "metrics", "nstructures", "cr", "H", "z", "seed", "checks", "signature",
            "orientation"}


class ModelError(ValueError):
    """A model file that cannot be loaded."""


@dataclass
class MetricEntry:
    field: MetricField
    box: Box


@dataclass
class Model:
    name: str
    kind: str
    title: str = ""
    path: str = ""
    chart: Chart = None
    params: dict = field(default_factory=dict)
    definitions: dict = field(default_factory=dict)
    domain: Box = None
    forms: dict = field(default_factory=dict)
    vectors: dict = field(default_factory=dict)
    metrics: dict = field(default_factory=dict)
    nstructures: dict = field(default_factory=dict)
    crcharts: dict = field(default_factory=dict)
    kerr: dict = field(default_factory=dict)
    checks: list = field(default_factory=list)
    raw: dict = field(default_factory=dict)

    # --- expression helpers ---------------------------------------------------

    def expr(self, value, chart=None, what="expression"):
        """A number stays a number; strings are parsed on ``chart``."""
        chart = chart or self.chart
        if isinstance(value, bool) or value is None:
            raise ModelError(f"{self.name}: {what} must be a number or a string, got {value!r}")
        if isinstance(value, Number):
            return complex(value) if isinstance(value, complex) else float(value)
        try:
            return parse(str(value), chart, self.params, definitions=self.definitions)
        except ExpressionError as err:
            raise ModelError(f"{self.name}: bad {what} {value!r}: {err}") from None

    def form(self, spec, chart=None, what="form"):
        """A named form, ``conj(name)``, or a mapping basis-key -> coefficient.
        Keys joined by ``^`` give higher-degree basis forms."""
        chart = chart or self.chart
        if isinstance(spec, str):
            name, conj = spec.strip(), False
            if name.startswith("conj(") and name.endswith(")"):
                name, conj = name[5:-1].strip(), True
            if name not in self.forms:
                raise ModelError(f"{self.name}: unknown form {name!r} in {what}")
            out = self.forms[name]
            if out.chart != chart:
                raise ModelError(f"{self.name}: form {name!r} lives on chart {out.chart.name}, "
                                 f"not {chart.name}")
            return out.conj() if conj else out
        if not isinstance(spec, dict) or not spec:
            raise ModelError(f"{self.name}: {what} must be a form name or a non-empty mapping")
        degrees = {len(str(k).split("^")) for k in spec}
        if len(degrees) != 1:
            raise ModelError(f"{self.name}: {what} mixes degrees")
        deg = degrees.pop()
        terms = []
        for key, coeff in spec.items():
            keys = [s.strip() for s in str(key).split("^")]
            try:
                basis = form_basis(chart, keys) if deg > 1 else covector_basis(chart, keys[0])
            except (KeyError, ValueError):
                raise ModelError(f"{self.name}: unknown basis key {key!r} in {what}") from None
            terms.append((basis, self.expr(coeff, chart, f"coefficient of {key} in {what}")))
        return FormField.from_terms(chart, deg, terms, label=what)

    def vector(self, spec, chart=None, what="vector"):
        """A named vector, a full component list, or basis-key -> coefficient."""
        chart = chart or self.chart
        if isinstance(spec, str):
            if spec not in self.vectors:
                raise ModelError(f"{self.name}: unknown vector field {spec!r}")
            out = self.vectors[spec]
            if out.chart != chart:
                raise ModelError(f"{self.name}: vector {spec!r} lives on chart {out.chart.name}, "
                                 f"not {chart.name}")
            return out
        if isinstance(spec, list):
            if len(spec) != chart.dim:
                raise ModelError(f"{self.name}: {what} needs {chart.dim} components")
            return VectorField.from_components(chart, [self.expr(c, chart, what) for c in spec],
                                               label=what)
        if isinstance(spec, dict) and spec:
            terms = []
            for key, coeff in spec.items():
                try:
                    e = vector_basis(chart, str(key))
                except (KeyError, ValueError):
                    raise ModelError(f"{self.name}: unknown basis key {key!r} in {what}") from None
                terms.append((e, self.expr(coeff, chart, what)))
            return VectorField.from_terms(chart, terms, label=what)
        raise ModelError(f"{self.name}: cannot read {what} from {spec!r}")

    def metric(self, name=None):
        if not self.metrics:
            raise ModelError(f"{self.name}: model declares no metric")
        name = name or next(iter(self.metrics))
        if name not in self.metrics:
            raise ModelError(f"{self.name}: unknown metric {name!r}")
        return self.metrics[name]

    def crchart(self, name):
        if name not in self.crcharts:
            raise ModelError(f"{self.name}: unknown CR chart {name!r}")
        return self.crcharts[name]

    def kerr_field(self, points=()):
        """The Kerr field of a ``kind: kerr`` model, solved on ``points``."""
        from ..kerrtwistor import kerr_congruence
        k = self.kerr
        if "z" in k:
            return KerrField.from_expression(self.expr(k["z"], what="z"), label=f"z={k['z']}")
        return kerr_congruence(k["H"], points, seed=k["seed"], label=f"H={k['H'].text}")

    def expressions(self):
        """Every parsed expression in the model with its chart."""
        out = []

        def walk(spec, chart):
            if isinstance(spec, str):
                try:
                    out.append((parse(spec, chart, self.params, definitions=self.definitions), chart))
                except ExpressionError:
                    pass
            elif isinstance(spec, dict):
                for v in spec.values():
                    walk(v, chart)
            elif isinstance(spec, list):
                for v in spec:
                    walk(v, chart)
        if self.chart is not None:
            for key in ("forms", "vectors"):
                walk(self.raw.get(key, {}), self.chart)
            for m in _metric_specs(self.raw).values():
                if isinstance(m, dict) and ("components" in m or "products" in m or "factor" in m):
                    walk({k: m[k] for k in ("components", "factor") if k in m}, self.chart)
            for name, spec in (self.raw.get("define") or {}).items():
                walk(spec, self.chart)
        if self.kind == "kerr" and "z" in self.kerr:
            walk(self.kerr["z"], self.chart)
        return out


# --- loading --------------------------------------------------------------------

def _chart(spec, name, model):
    if not isinstance(spec, dict) or "coords" not in spec:
        raise ModelError(f"{model}: chart needs a 'coords' list")
    coords = [str(c) for c in spec["coords"]]
    pairs = []
    for cname, xy in (spec.get("complex") or {}).items():
        if not isinstance(xy, list) or len(xy) != 2 or any(c not in coords for c in xy):
            raise ModelError(f"{model}: complex coordinate {cname} needs two chart coordinates")
        pairs.append((coords.index(xy[0]), coords.index(xy[1]), str(cname)))
    try:
        return Chart(spec.get("name", name), tuple(coords), tuple(pairs))
    except ValueError as err:
        raise ModelError(f"{model}: {err}") from None


def _box(chart, spec, model):
    bounds = {}
    for k, v in (spec or {}).items():
        if k not in chart.coord_names:
            raise ModelError(f"{model}: domain names unknown coordinate {k!r}")
        if not isinstance(v, list) or len(v) != 2:
            raise ModelError(f"{model}: domain for {k} must be [lo, hi]")
        bounds[k] = (float(v[0]), float(v[1]))
    try:
        return Box.from_dict(chart, bounds)
    except ValueError as err:
        raise ModelError(f"{model}: {err}") from None


def _metric_specs(raw):
    if "metric" in raw and "metrics" in raw:
        raise ModelError(f"{raw.get('name')}: use either 'metric' or 'metrics', not both")
    if "metric" in raw:
        return {"g": raw["metric"]}
    return dict(raw.get("metrics") or {})


def _build_metric(m, name, spec, kw):
    if not isinstance(spec, dict):
        raise ModelError(f"{m.name}: metric {name!r} must be a mapping")
    sig = spec.get("signature", kw["signature"])
    orient = spec.get("orientation", kw["orientation"])
    opts = dict(signature=sig, orientation=orient, label=name)
    box = m.domain
    if "components" in spec:
        rows = spec["components"]
        comps = [[None if c is None else m.expr(c, what=f"metric {name}") for c in row] for row in rows]
        try:
            g = MetricField.from_components(m.chart, comps, **opts)
        except ValueError as err:
            raise ModelError(f"{m.name}: metric {name!r}: {err}") from None
    elif "products" in spec:
        prods = []
        for item in spec["products"]:
            if not isinstance(item, list) or len(item) not in (2, 3):
                raise ModelError(f"{m.name}: metric {name!r} products are [alpha, beta] or "
                                 f"[alpha, beta, coefficient]")
            a = m.form(item[0], what=f"product in {name}")
            b = m.form(item[1], what=f"product in {name}")
            if len(item) == 3:
                c = m.expr(item[2], what=f"product coefficient in {name}")
                a = a * (c if isinstance(c, Number) else FormField.scalar(m.chart, c))
            prods.append((a, b))
        g = MetricField.from_products(m.chart, prods, **opts)
    elif "bateman" in spec:
        b = spec["bateman"]
        base = m.metric(b.get("base")).field
        g = bateman_transform(base, m.form(b["kappa"], what="bateman kappa"),
                              m.expr(b["rho"], what="bateman rho"),
                              m.form(b["xi"], what="bateman xi"))
        g.label = name
    elif "lift" in spec:
        li = spec["lift"]
        cr = m.crchart(li["cr"])
        v = str(li.get("v_name", "v"))
        pos = int(li.get("position", 1))
        from ..cr import product_chart
        pchart, _ = product_chart(cr.chart, v, pos)
        coeffs = li.get("coeffs")
        if coeffs is not None:
            coeffs = [[m.expr(c, pchart, f"lift coefficient in {name}") for c in row]
                      for row in coeffs]
        g, ns = lift_cr(cr, coeffs=coeffs, v_name=v, position=pos, orientation=orient)
        g.label = name
        m.nstructures[name] = ns
        lo, hi = li.get("v", [-1.0, 1.0])
        bounds = {n: (box.lo[k], box.hi[k]) for k, n in enumerate(cr.chart.coord_names)}
        bounds[v] = (float(lo), float(hi))
        box = Box.from_dict(g.chart, bounds)
    elif "flat_kerr" in spec:
        fk = spec["flat_kerr"]
        try:
            g = flat_kerr_metric(m.expr(fk["w"], what="flat_kerr w"),
                                 {k: m.expr(v, what=f"partial {k}") if not isinstance(v, Number)
                                  else m.expr(str(v)) for k, v in fk["partials"].items()},
                                 m.domain.sample(5, 0), chart=m.chart)
        except (KeyError, ValueError) as err:
            raise ModelError(f"{m.name}: metric {name!r}: {err}") from None
        g.label = name
    else:
        raise ModelError(f"{m.name}: metric {name!r} needs one of components, products, "
                         f"bateman, lift, flat_kerr")
    if "factor" in spec:
        g = g.scaled(FormField.scalar(g.chart, m.expr(spec["factor"], g.chart, "conformal factor")),
                     label=name)
    return MetricEntry(g, box)


def _build_cr(m, name, spec):
    if not isinstance(spec, dict):
        raise ModelError(f"{m.name}: CR chart {name!r} must be a mapping")
    if "defining" in spec:
        target = _chart(spec.get("target"), f"{name}_ambient", m.name)
        G = m.expr(spec["defining"], target, "defining function")
        param = ChartMap.from_components(
            m.chart, target, {k: m.expr(v, what=f"embedding map {k}") for k, v in spec["map"].items()},
            f"{name}_param")
        try:
            return embed_from_defining(G, target, param, m.domain.sample(5, 0), label=name)
        except (ArithmeticError, ValueError) as err:
            raise ModelError(f"{m.name}: embedding {name!r}: {err}") from None
    if "kappa" not in spec or "mus" not in spec:
        raise ModelError(f"{m.name}: CR chart {name!r} needs kappa and mus")
    own = _chart(spec["chart"], f"{name}_chart", m.name) if "chart" in spec else m.chart
    kappa = m.form(spec["kappa"], own, f"kappa of {name}")
    mus = [m.form(s, own, f"mu of {name}") for s in spec["mus"]]
    try:
        cr = CRChart(own, kappa, mus, name)
    except ValueError as err:
        raise ModelError(f"{m.name}: {err}") from None
    if "map" in spec:
        f = ChartMap.from_components(
            m.chart, own, {k: m.expr(v, what=f"map {k}") for k, v in spec["map"].items()},
            f"{name}_map")
        cr = cr.pullback(f, name)
    elif own != m.chart:
        raise ModelError(f"{m.name}: CR chart {name!r} on its own chart needs a 'map'")
    return cr


def build_model(raw, path="", overrides=None):
    """Construct a :class:`Model` from a parsed YAML mapping.

    ``overrides`` may hold ``define`` (name -> expression text), ``params``
    and ``box`` (coordinate -> (lo, hi)).
    """
    overrides = overrides or {}
    if not isinstance(raw, dict):
        raise ModelError(f"{path or 'model'}: top level must be a mapping")
    name = str(raw.get("name") or Path(path).stem or "model")
    unknown = set(raw) - TOP_KEYS
    if unknown:
        raise ModelError(f"{name}: unknown keys {sorted(unknown)}")
    kind = raw.get("kind", "metric")
    if kind not in KINDS:
        raise ModelError(f"{name}: kind must be one of {KINDS}")
    m = Model(name, kind, str(raw.get("title", "")), str(path), raw=raw)
    m.params = {str(k): float(v) for k, v in (raw.get("params") or {}).items()}
    m.params.update(overrides.get("params") or {})

    if kind in ("kerr", "twistor"):
        if "chart" in raw:
            raise ModelError(f"{name}: {kind} models use a fixed chart")
        m.chart = minkowski_chart() if kind == "kerr" else twistor_bundle_minkowski().chart
    else:
        m.chart = _chart(raw.get("chart"), name, name)

    defs = dict(raw.get("define") or {})
    for k in (overrides.get("define") or {}):
        if k not in defs:
            raise ModelError(f"{name}: cannot override undeclared definition {k!r}")
    defs.update(overrides.get("define") or {})
    for k, v in defs.items():
        m.definitions[str(k)] = m.expr(v, what=f"definition {k}")

    m.domain = _box(m.chart, raw.get("domain"), name)
    if overrides.get("box"):
        bad = set(overrides["box"]) - set(m.chart.coord_names)
        if bad:
            raise ModelError(f"{name}: box override names unknown coordinates {sorted(bad)}")
        m.domain = m.domain.replace(m.chart, overrides["box"])

    for k, spec in (raw.get("forms") or {}).items():
        m.forms[str(k)] = m.form(spec, what=f"form {k}")
        m.forms[str(k)].label = str(k)
    for k, spec in (raw.get("vectors") or {}).items():
        m.vectors[str(k)] = m.vector(spec, what=f"vector {k}")
        m.vectors[str(k)].label = str(k)

    for k, spec in (raw.get("cr") or {}).items():
        m.crcharts[str(k)] = _build_cr(m, str(k), spec)

    kw = {"signature": raw.get("signature", "lorentzian"), "orientation": raw.get("orientation", 1)}
    for k, spec in _metric_specs(raw).items():
        m.metrics[str(k)] = _build_metric(m, str(k), spec, kw)

    for k, spec in (raw.get("nstructures") or {}).items():
        if not isinstance(spec, dict) or "kappa" not in spec or "mus" not in spec:
            raise ModelError(f"{name}: N-structure {k!r} needs kappa and mus")
        m.nstructures[str(k)] = NStructureSpec(m.form(spec["kappa"], what=f"kappa of {k}"),
                                               [m.form(s, what=f"mu of {k}") for s in spec["mus"]],
                                               str(k))

    if kind == "kerr":
        if ("H" in raw) == ("z" in raw):
            raise ModelError(f"{name}: a Kerr model gives exactly one of H and z")
        if "H" in raw:
            try:
                m.kerr["H"] = KerrFunction.parse(str(overrides.get("H") or raw["H"]), m.params)
            except (ExpressionError, ValueError) as err:
                raise ModelError(f"{name}: bad Kerr function: {err}") from None
            m.kerr["seed"] = complex(str(overrides.get("seed", raw.get("seed", 0))).replace("i", "j")
                                     .replace(" ", ""))
        else:
            m.kerr["z"] = str(raw["z"])
    elif "H" in raw or "z" in raw:
        raise ModelError(f"{name}: H and z belong to kerr models")

    checks = raw.get("checks") or []
    if not isinstance(checks, list) or not all(isinstance(c, dict) and isinstance(c.get("check"), str)
                                               for c in checks):
        raise ModelError(f"{name}: checks must be a list of mappings with a string 'check' key "
                         f"(quote names YAML would read as constants, such as \"null\")")
    from .checks import CHECKS          # the registry imports this module
    unknown = sorted({c["check"] for c in checks} - set(CHECKS[m.kind]))
    if unknown:
        raise ModelError(f"{name}: unknown check(s) {', '.join(unknown)} for a {m.kind} model; "
                         f"known: {', '.join(sorted(CHECKS[m.kind]))}")
    m.checks = checks
    return m


def read_model(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as err:
        raise ModelError(f"cannot read {path}: {err.strerror}") from None
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as err:
        raise ModelError(f"{path.name}: invalid YAML: {err}") from None


def load_model(path, overrides=None):
    return build_model(read_model(path), str(path), overrides)


def models_dir():
    return Path(__file__).with_name("models")


@dataclass
class ExpectedVerdict:
    check: str
    target: str
    expect: object
    basis: str
    note: str = ""


@dataclass
class CatalogEntry:
    name: str
    path: Path
    kind: str
    title: str
    expected: list

    def load(self, overrides=None):
        return load_model(self.path, overrides)


BASES = ("published", "trivial", "derived")


def catalog_entries():
    """Every shipped model, sorted by name."""
    out = []
    for path in sorted(models_dir().glob("*.yaml")):
        raw = read_model(path)
        name = str(raw.get("name") or path.stem)
        exp = []
        for c in raw.get("checks") or []:
            basis = c.get("basis")
            if basis not in BASES:
                raise ModelError(f"{name}: check {c.get('check')!r} needs basis in {BASES}")
            exp.append(ExpectedVerdict(c["check"], _target(c), c.get("expect", True), basis,
                                       c.get("note", "")))
        out.append(CatalogEntry(name, path, raw.get("kind", "metric"), raw.get("title", ""), exp))
    return sorted(out, key=lambda e: e.name)


def find_model(name_or_path):
    """Catalog name or a path to a model file."""
    p = Path(name_or_path)
    if p.suffix in (".yaml", ".yml") or p.exists():
        if not p.exists():
            raise ModelError(f"no such model file {p}")
        return p
    for e in catalog_entries():
        if e.name == name_or_path:
            return e.path
    raise ModelError(f"unknown model {name_or_path!r}; see 'catalog list'")


def _target(c):
    for key in ("field", "metric", "chart", "form", "nstructure", "function", "first"):
        if key in c and isinstance(c[key], str):
            return c[key]
    return ""


__all__ = ["CatalogEntry", "ExpectedVerdict", "MetricEntry", "Model", "ModelError",
           "build_model", "catalog_entries", "find_model", "load_model", "models_dir", "read_model"]
