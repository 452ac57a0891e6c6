"""Result records shared by the checks and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field

import numpy as np


@dataclass
class CheckReport:
    """Outcome of a residual check over sample points.

    ``expect_zero`` says whether the claim is that the residual vanishes
    (verdict: max residual below tol) or that it does not (verdict: min
    residual above tol).
    """

    name: str
    residuals: list
    tol: float
    expect_zero: bool = True
    points: list = field(default_factory=list)
    details: dict = field(default_factory=dict)
    errors: list = field(default_factory=list)

    @property
    def max_residual(self):
        return float(max(self.residuals)) if self.residuals else float("nan")

    @property
    def min_residual(self):
        return float(min(self.residuals)) if self.residuals else float("nan")

    @property
    def verdict(self):
        if self.errors or not self.residuals:
            return False
        if self.expect_zero:
            return self.max_residual <= self.tol
        return self.min_residual > self.tol

    @property
    def worst_point(self):
        if not self.residuals:
            return None
        k = int(np.argmax(self.residuals) if self.expect_zero else np.argmin(self.residuals))
        return [float(x) for x in self.points[k]] if self.points else None

    def record(self):
        out = {
            "check": self.name,
            "verdict": bool(self.verdict),
            "claim": "zero" if self.expect_zero else "nonzero",
            "tol": self.tol,
            "n_points": len(self.residuals),
            "max_residual": _num(self.max_residual),
            "min_residual": _num(self.min_residual),
            "worst_point": self.worst_point,
        }
        if self.errors:
            out["errors"] = self.errors[:5]
        if self.details:
            out["details"] = _plain(self.details)
        return out

    def summary(self):
        flag = "PASS" if self.verdict else "FAIL"
        rel = "<=" if self.expect_zero else ">"
        stat = self.max_residual if self.expect_zero else self.min_residual
        line = f"{flag}  {self.name}: {'max' if self.expect_zero else 'min'} residual {stat:.3e} {rel} {self.tol:.1e} over {len(self.residuals)} points"
        if self.errors:
            line += f" ({len(self.errors)} errors, first: {self.errors[0]})"
        return line


def _num(x):
    return None if x != x else float(x)


def _plain(obj):
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _plain(obj.tolist())
    if isinstance(obj, (complex, np.complexfloating)):
        z = complex(obj)
        return float(z.real) if z.imag == 0 else [float(z.real), float(z.imag)]
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def run_pointwise(name, fn, points, tol, expect_zero=True, errors_fatal=False):
    """Evaluate ``fn(p) -> residual`` at every point; domain errors are
    recorded rather than raised."""
    res, pts, errs = [], [], []
    for p in points:
        try:
            r = float(fn(p))
        except (ArithmeticError, ValueError) as err:
            if errors_fatal:
                raise
            errs.append(f"{type(err).__name__}: {err}")
            continue
        res.append(r)
        pts.append(p)
    return CheckReport(name, res, tol, expect_zero, pts, errors=errs)


__all__ = ["CheckReport", "asdict", "run_pointwise"]
