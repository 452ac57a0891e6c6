"""Christoffel symbols, Riemann, Ricci, Einstein and Weyl tensors at a point.

Conventions::

    Gamma^r_mn = 1/2 g^rs (d_m g_sn + d_n g_sm - d_s g_mn)
    R^r_smn    = d_m Gamma^r_ns - d_n Gamma^r_ms + Gamma^r_ml Gamma^l_ns - Gamma^r_nl Gamma^l_ms
    R_sn       = R^r_srn
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pointalg import MetricAtPoint, levi_civita
from .report import CheckReport, run_pointwise


@dataclass
class CurvatureAtPoint:
    metric: MetricAtPoint
    christoffel: np.ndarray
    riemann: np.ndarray          # R^r_smn
    riemann_lower: np.ndarray    # R_rsmn
    ricci: np.ndarray
    scalar: complex
    einstein: np.ndarray
    weyl: np.ndarray             # C_rsmn
    scale: float                 # size of the terms that cancel in a flat metric

    @property
    def dim(self):
        return self.metric.dim

    def flatness_residual(self):
        return float(np.max(np.abs(self.riemann_lower)) / (1 + self.scale))

    def ricci_residual(self):
        return float(np.max(np.abs(self.ricci)) / (1 + self.scale))

    def symmetry_residual(self):
        R = self.riemann_lower
        norm = 1 + np.max(np.abs(R))
        errs = [
            R + R.transpose(1, 0, 2, 3),
            R + R.transpose(0, 1, 3, 2),
            R - R.transpose(2, 3, 0, 1),
            R + R.transpose(0, 2, 3, 1) + R.transpose(0, 3, 1, 2),
        ]
        return float(max(np.max(np.abs(e)) for e in errs) / norm)

    def weyl_trace_residual(self):
        C = self.weyl
        tr = np.einsum("ac,abcd->bd", self.metric.g_inv, C)
        return float(np.max(np.abs(tr)) / (1 + np.max(np.abs(C))))


def curvature_at(g, p):
    """All curvature tensors of the metric field ``g`` at ``p``."""
    G = g.jet(p, 2)
    met = MetricAtPoint(G.v)
    gi = met.g_inv
    dg = G.g                                # d_a g_mn
    ddg = G.h                               # d_a d_b g_mn
    # inverse-metric derivative
    dgi = -np.einsum("rs,asn,nt->art", gi, dg, gi)
    low = 0.5 * (np.einsum("msn->smn", dg) + np.einsum("nsm->smn", dg) - dg)
    gam = np.einsum("rs,smn->rmn", gi, low)
    # derivative of the lowered symbols, then of Gamma
    dlow = 0.5 * (np.einsum("amsn->asmn", ddg) + np.einsum("ansm->asmn", ddg)
                  - np.einsum("asmn->asmn", ddg))
    dgam = np.einsum("ars,smn->armn", dgi, low) + np.einsum("rs,asmn->armn", gi, dlow)
    dterm = np.einsum("mrns->rsmn", dgam) - np.einsum("nrms->rsmn", dgam)
    qterm = np.einsum("rml,lns->rsmn", gam, gam) - np.einsum("rnl,lms->rsmn", gam, gam)
    riem = dterm + qterm
    scale = float(max(np.max(np.abs(dterm)), np.max(np.abs(qterm)), np.max(np.abs(dgam))))
    riem_low = np.einsum("ra,asmn->rsmn", met.g, riem)
    ric = np.einsum("rsrn->sn", riem)
    R = complex(np.einsum("sn,sn->", gi, ric))
    n = met.dim
    gm = met.g
    ein = ric - 0.5 * R * gm
    if n > 2:
        t = (np.einsum("ac,bd->abcd", gm, ric) - np.einsum("ad,bc->abcd", gm, ric)
             - np.einsum("bc,ad->abcd", gm, ric) + np.einsum("bd,ac->abcd", gm, ric))
        gg = np.einsum("ac,bd->abcd", gm, gm) - np.einsum("ad,bc->abcd", gm, gm)
        weyl = riem_low - t / (n - 2) + R * gg / ((n - 1) * (n - 2))
    else:
        weyl = np.zeros_like(riem_low)
    return CurvatureAtPoint(met, gam, riem, riem_low, ric, R, ein, weyl, scale)


def christoffel_finite_difference(g, p, h=1e-5):
    """Christoffel symbols from central differences of the metric values;
    an oracle independent of the jet arithmetic."""
    p = np.asarray(p, float)
    n = g.dim
    dg = np.zeros((n, n, n), complex)
    for a in range(n):
        e = np.zeros(n)
        e[a] = h
        dg[a] = (g.value(p + e) - g.value(p - e)) / (2 * h)
    gi = np.linalg.inv(g.value(p))
    low = 0.5 * (np.einsum("msn->smn", dg) + np.einsum("nsm->smn", dg) - dg)
    return np.einsum("rs,smn->rmn", gi, low)


def is_flat(g, points, tol=1e-8):
    return run_pointwise("flat", lambda p: curvature_at(g, p).flatness_residual(), points, tol)


def is_ricci_flat(g, points, tol=1e-8):
    return run_pointwise("ricci_flat", lambda p: curvature_at(g, p).ricci_residual(), points, tol)


def hodge_first_pair(C, metric, orientation=1):
    """Hodge star on the first antisymmetric index pair of a 4-index tensor,
    with the calibration of :func:`robinson.pointalg.hodge`."""
    eps = levi_civita(metric, orientation)
    up = np.einsum("ae,bf,efcd->abcd", metric.g_inv, metric.g_inv, C)
    return 0.5 * np.einsum("efcd,efab->abcd", up, eps)


def sd_asd_split(curv, orientation=1):
    """``(C+, C-)`` with ``C = C+ + C-`` and ``*C+ = i C+``, ``*C- = -i C-``."""
    if curv.dim != 4:
        raise ValueError("self-dual split needs dimension 4")
    sC = hodge_first_pair(curv.weyl, curv.metric, orientation)
    return 0.5 * (curv.weyl - 1j * sC), 0.5 * (curv.weyl + 1j * sC)


__all__ = [
    "CheckReport", "CurvatureAtPoint", "christoffel_finite_difference", "curvature_at",
    "hodge_first_pair", "is_flat", "is_ricci_flat", "sd_asd_split",
]
