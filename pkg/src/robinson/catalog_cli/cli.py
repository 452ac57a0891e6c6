"""``robinson`` command line.

Exit codes: 0 when every check passes, 1 when a check fails, 2 for load or
configuration errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from collections import Counter

import numpy as np

from .. import kerrtwistor as KT
from ..algclass import petrov_at
from ..cr import classify
from ..curvature import curvature_at
from ..optics import analyze_congruence
from .checks import DEFAULT_POINTS, Config, run_checks
from .loader import ModelError, catalog_entries, find_model, load_model

EXIT_OK, EXIT_FAIL, EXIT_ERROR = 0, 1, 2


def _box_override(text):
    try:
        name, rng = text.split("=", 1)
        lo, hi = rng.split(":", 1)
        return name.strip(), (float(lo), float(hi))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected name=lo:hi, got {text!r}") from None


def _define(text):
    if "=" not in text:
        raise argparse.ArgumentTypeError(f"expected name=expression, got {text!r}")
    name, expr = text.split("=", 1)
    return name.strip(), expr.strip()


def _common(p, seed_flag="--seed"):
    p.add_argument("--points", type=int, default=None, help=f"sample points (default {DEFAULT_POINTS})")
    p.add_argument(seed_flag, dest="seed", type=int, default=0, help="sampling seed")
    p.add_argument("--tol", type=float, default=None, help="default residual tolerance (1e-8)")
    p.add_argument("--box", type=_box_override, action="append", default=[],
                   metavar="NAME=LO:HI", help="override one domain interval")
    p.add_argument("--define", type=_define, action="append", default=[],
                   metavar="NAME=EXPR", help="override a model definition")
    p.add_argument("--format", choices=("text", "records"), default="text")
    p.add_argument("--timing", action="store_true", help="include wall times (not deterministic)")


def build_parser():
    ap = argparse.ArgumentParser(prog="robinson", description="Robinson manifold verification engine")
    sub = ap.add_subparsers(dest="command", required=True)

    cat = sub.add_parser("catalog", help="inspect the shipped models")
    cat.add_argument("action", choices=("list",))
    cat.add_argument("--format", choices=("text", "records"), default="text")

    chk = sub.add_parser("check", help="run the declared checks of a model (or 'all')")
    chk.add_argument("model")
    chk.add_argument("--checks", nargs="+", default=(), help="only these check kinds or ids")
    _common(chk)

    pet = sub.add_parser("petrov", help="Petrov type at sample points")
    pet.add_argument("model")
    pet.add_argument("--metric", default=None)
    _common(pet)

    con = sub.add_parser("congruence", help="optical scalars of a vector field")
    con.add_argument("model")
    con.add_argument("field")
    con.add_argument("--metric", default=None)
    _common(con)

    ker = sub.add_parser("kerr", help="run Kerr checks with an alternative H")
    ker.add_argument("model")
    ker.add_argument("--H", dest="H", default=None, help="Kerr function of z1, z2, z3")
    ker.add_argument("--seed", dest="seed_z", default=None, metavar="C",
                     help="Newton seed for z, e.g. 0.1+0.2i")
    _common(ker, "--sample-seed")

    crp = sub.add_parser("cr", help="Levi form and classification of a CR chart")
    crp.add_argument("model")
    crp.add_argument("chart")
    _common(crp)

    tw = sub.add_parser("twistor", help="twistor identities on random samples")
    tw.add_argument("what", choices=("quadric", "line", "roundtrip"))
    _common(tw)
    return ap


def _config(args, only=()):
    return Config(points=args.points, seed=args.seed,
                  tol=args.tol if args.tol is not None else Config.tol,
                  timing=args.timing, only=tuple(only))


def _overrides(args, extra=None):
    out = {"box": dict(args.box), "define": dict(args.define)}
    out.update(extra or {})
    return out


def _emit(args, records, text):
    if args.format == "records":
        for r in records:
            print(json.dumps(r, sort_keys=True))
    else:
        print(text)


def cmd_catalog(args):
    entries = catalog_entries()
    if args.format == "records":
        for e in entries:
            print(json.dumps({"name": e.name, "kind": e.kind, "title": e.title,
                              "checks": len(e.expected)}, sort_keys=True))
    else:
        for e in entries:
            print(f"{e.name:<24} {e.kind:<8} {len(e.expected):>3} checks  {e.title}")
    return EXIT_OK


def cmd_check(args):
    names = [e.name for e in catalog_entries()] if args.model == "all" else [args.model]
    cfg = _config(args, args.checks)
    status = EXIT_OK
    for name in names:
        try:
            model = load_model(find_model(name), _overrides(args))
        except ModelError as err:
            _emit(args, [{"model": name, "check": "load", "verdict": "error", "error": str(err)}],
                  f"== {name}\nERROR  {err}")
            status = EXIT_ERROR
            continue
        rep = run_checks(model, cfg)
        _emit(args, rep.records(cfg.timing), rep.text(cfg.timing))
        if not rep.passed and status == EXIT_OK:
            status = EXIT_FAIL
    return status


def cmd_petrov(args):
    model = load_model(find_model(args.model), _overrides(args))
    entry = model.metric(args.metric)
    pts = entry.box.sample(args.points or DEFAULT_POINTS, args.seed)
    records, seen = [], Counter()
    for i, p in enumerate(pts):
        try:
            r = petrov_at(curvature_at(entry.field, p), seed=args.seed)
            rec = {"point": p.tolist(), "index": i, **r.record()}
        except (ArithmeticError, ValueError) as err:
            rec = {"point": p.tolist(), "index": i, "type": "error", "error": str(err)}
        seen[rec["type"]] += 1
        records.append({"model": model.name, "metric": entry.field.label, **rec})
    summary = ", ".join(f"{k}: {v}" for k, v in sorted(seen.items()))
    _emit(args, records, f"{model.name} [{entry.field.label}] Petrov types over {len(pts)} points: {summary}")
    return EXIT_OK if "error" not in seen else EXIT_FAIL


def cmd_congruence(args):
    model = load_model(find_model(args.model), _overrides(args))
    entry = model.metric(args.metric)
    k = model.vector(args.field, entry.field.chart)
    pts = entry.box.sample(args.points or DEFAULT_POINTS, args.seed)
    rep = analyze_congruence(k, entry.field, pts, args.field)
    tol = args.tol or Config.tol
    rows = []
    for which in ("geodesic", "shear", "twist", "expansion"):
        vals = getattr(rep, which)
        rows.append({"model": model.name, "field": args.field, "quantity": which,
                     "max": max(vals) if vals else None, "min": min(vals) if vals else None,
                     "zero": bool(vals) and max(vals) <= tol, "samples": len(vals)})
    text = [f"{model.name}: congruence {args.field} over {len(rep.points)} points"
            f" ({len(rep.errors)} errors)"]
    for r in rows:
        if r["samples"]:
            text.append(f"  {r['quantity']:<10} max {r['max']:.3e}  min {r['min']:.3e}  "
                        f"{'vanishes' if r['zero'] else 'nonzero'}")
    text.append(f"  sng: {rep.sng(tol)}")
    if rep.errors:
        text.append(f"  first error: {rep.errors[0]}")
    rows.append({"model": model.name, "field": args.field, "quantity": "sng", "value": rep.sng(tol),
                 "errors": rep.errors[:5]})
    _emit(args, rows, "\n".join(text))
    return EXIT_OK if not rep.errors else EXIT_FAIL


def cmd_kerr(args):
    extra = {}
    if args.H is not None:
        extra["H"] = args.H
    if args.seed_z is not None:
        extra["seed"] = args.seed_z
    model = load_model(find_model(args.model), _overrides(args, extra))
    if model.kind != "kerr":
        raise ModelError(f"{model.name} is not a Kerr model")
    if args.H is not None and "H" not in model.kerr:
        raise ModelError(f"{model.name} prescribes z directly; --H does not apply")
    rep = run_checks(model, _config(args))
    _emit(args, rep.records(args.timing), rep.text(args.timing))
    return EXIT_OK if rep.passed else EXIT_FAIL


def cmd_cr(args):
    model = load_model(find_model(args.model), _overrides(args))
    c = model.crchart(args.chart)
    pts = model.domain.sample(args.points or DEFAULT_POINTS, args.seed)
    rep = classify(c, pts, args.tol or 1e-10)
    records = [{"model": model.name, "chart": args.chart, "point": e.point,
                "h": e.h, "eigenvalues": e.eigenvalues, "verdict": v}
               for e, v in zip(rep.entries, rep.verdicts)]
    from ..report import _plain
    records = [_plain(r) for r in records]
    records.append({"model": model.name, "chart": args.chart, "verdict": rep.verdict,
                    "errors": rep.errors[:5]})
    _emit(args, records, rep.summary())
    return EXIT_OK if not rep.errors else EXIT_FAIL


def cmd_twistor(args):
    rng = np.random.default_rng(args.seed)
    n = args.points or DEFAULT_POINTS
    tol = args.tol or 1e-10
    records = []
    if args.what == "quadric":
        for _ in range(n):
            z = rng.normal(size=3) + 1j * rng.normal(size=3)
            t = KT.to_projective_twistor(*z)
            q = KT.quadric_residual(*z)
            records.append({"z": [[c.real, c.imag] for c in z],
                            "twistor": [[c.real, c.imag] for c in t.comps],
                            "null_norm": KT.null_norm(t), "quadric_imag": float(q.imag),
                            "identity_residual": abs(KT.null_norm(t) - (2j * q).real)})
        worst = max(r["identity_residual"] for r in records)
        text = f"null_norm = 2i q(z) over {n} points: max residual {worst:.3e}"
    else:
        worst = 0.0
        for _ in range(n):
            p = rng.uniform(-1, 1, 4)
            z = complex(*rng.normal(size=2))
            t = KT.twistor_from_line(p, z)
            line = KT.line_from_twistor(*t)
            err = float(np.max(np.abs(line(p[1]) - p)))
            if args.what == "roundtrip":
                kz = np.array([-abs(z) ** 2, 1.0, -z.real, -z.imag])
                err = max(err, float(np.max(np.abs(line.tangent - kz))))
            worst = max(worst, err)
            records.append({"point": p.tolist(), "z": [z.real, z.imag],
                            "twistor": [[c.real, c.imag] for c in t], "residual": err})
        text = f"{args.what}: {n} null lines, max residual {worst:.3e}"
    ok = worst <= tol
    _emit(args, records, f"{'PASS' if ok else 'FAIL'}  {text} (tol {tol:.0e})")
    return EXIT_OK if ok else EXIT_FAIL


COMMANDS = {"catalog": cmd_catalog, "check": cmd_check, "petrov": cmd_petrov,
            "congruence": cmd_congruence, "kerr": cmd_kerr, "cr": cmd_cr, "twistor": cmd_twistor}


def main(argv=None):
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        if getattr(args, "points", None) is not None and args.points < 1:
            raise ModelError("--points must be at least 1")
        if getattr(args, "tol", None) is not None and not args.tol > 0:
            raise ModelError("--tol must be positive")
        return COMMANDS[args.command](args)
    except ModelError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
