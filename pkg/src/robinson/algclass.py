"""Spinors in dimension four and the algebraic classification of Weyl tensors.

A totally symmetric rank-4 spinor is stored by its five essential
components ``psi[k]`` (``k`` indices equal to 2).  Its quartic is::

    p(z) = sum_k binom(4, k) psi[k] z^(4-k)

and the type is read off from the root multiplicities on CP1.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from math import comb

import numpy as np

from .pointalg import MetricAtPoint, build_null_tetrad, duality_ratio, mtn_check

TYPES = {(1, 1, 1, 1): "I", (1, 1, 2): "II", (1, 3): "III", (2, 2): "D", (4,): "N"}

_SIGMA = [np.array([[0, 1], [1, 0]]), np.array([[0, -1j], [1j, 0]]), np.array([[1, 0], [0, -1]])]


def _nullspace(A, rtol=1e-10):
    u, s, vh = np.linalg.svd(A)
    rank = int(np.sum(s > rtol * max(1.0, s[0] if s.size else 0.0)))
    return vh[rank:].conj().T


@dataclass
class CliffordRep:
    signature: str
    gamma: list
    Gamma: np.ndarray
    B: np.ndarray
    C: np.ndarray
    metric: np.ndarray

    def gamma_of(self, w):
        return sum(c * g for c, g in zip(w, self.gamma))

    def chiral_basis(self, sign=1):
        """Orthonormal basis of S+ (sign=1) or S- as columns."""
        ev, vec = np.linalg.eigh(self.Gamma) if np.allclose(self.Gamma, self.Gamma.conj().T) \
            else np.linalg.eig(self.Gamma)
        cols = vec[:, np.isclose(ev, sign)]
        q, _ = np.linalg.qr(cols)
        return q

    def symplectic_form(self, sign=1):
        """``eps_AB = B(e_A, e_B)`` on a frame of S+ or S-, normalized so
        that eps_12 = 1."""
        e = self.chiral_basis(sign)
        eps = e.T @ self.B @ e
        return eps / eps[0, 1]

    def anticommutator_residual(self):
        n = len(self.gamma)
        worst = 0.0
        for a in range(n):
            for b in range(n):
                ac = self.gamma[a] @ self.gamma[b] + self.gamma[b] @ self.gamma[a]
                worst = max(worst, np.max(np.abs(ac - 2 * self.metric[a, b] * np.eye(4))))
        return float(worst)

    def cc_bar(self):
        return self.C @ self.C.conj()


def build_clifford(signature="euclidean"):
    """Dirac matrices with integer entries; ``lorentzian`` uses the metric
    diag(1, 1, 1, -1)."""
    Z = np.zeros((2, 2))
    I2 = np.eye(2)
    gam = [np.block([[Z, -1j * s], [1j * s, Z]]) for s in _SIGMA]
    g4 = np.block([[Z, I2], [I2, Z]]).astype(complex)
    if signature == "euclidean":
        gam.append(g4)
        metric = np.eye(4)
    elif signature == "lorentzian":
        gam.append(1j * g4)
        metric = np.diag([1.0, 1, 1, -1])
    else:
        raise ValueError(f"unknown signature {signature!r}")
    g5 = gam[0] @ gam[1] @ gam[2] @ gam[3]
    Gamma = g5 if signature == "euclidean" else 1j * g5
    # B gamma = gamma^T B  and  C gamma = conj(gamma) C, for all five
    allg = gam + [g5]
    eye = np.eye(4)
    rowsB = np.vstack([np.kron(eye, g.T) - np.kron(g.T, eye) for g in allg])
    B = _nullspace(rowsB)[:, 0].reshape(4, 4)
    B = B / np.max(np.abs(B))
    # C gamma - conj(gamma) C = 0 is linear over C since conj(gamma) is a constant matrix
    rowsC = np.vstack([np.kron(eye, g.T) - np.kron(g.conj(), eye) for g in allg])
    C = _nullspace(rowsC)[:, 0].reshape(4, 4)
    C = C / np.max(np.abs(C))
    cc = C @ C.conj()
    C = C / np.sqrt(abs(cc[0, 0]))
    return CliffordRep(signature, gam, Gamma, B, C, metric)


def charge_conjugate(phi, rep):
    return np.linalg.solve(rep.C, np.asarray(phi, complex).conj())


def chirality(phi, rep, tol=1e-10):
    phi = np.asarray(phi, complex)
    nrm = np.linalg.norm(phi)
    if nrm == 0:
        raise ValueError("zero spinor")
    gp = rep.Gamma @ phi
    if np.linalg.norm(gp - phi) <= tol * nrm:
        return 1
    if np.linalg.norm(gp + phi) <= tol * nrm:
        return -1
    raise ValueError("spinor is not chiral")


@dataclass
class MtnResult:
    basis: np.ndarray          # columns span N(phi)
    chirality: int
    duality: complex           # s with *(m1^m2) = s m1^m2
    totally_null: bool


def mtn_from_spinor(phi, rep, orientation=1):
    """``N(phi) = {w : gamma(w) phi = 0}`` for a chiral spinor."""
    phi = np.asarray(phi, complex)
    sign = chirality(phi, rep)
    M = np.column_stack([g @ phi for g in rep.gamma])
    N = _nullspace(M, 1e-10)
    if N.shape[1] != 2:
        raise ValueError(f"N(phi) has dimension {N.shape[1]}, expected 2")
    g = MetricAtPoint(rep.metric)
    vecs = [N[:, 0], N[:, 1]]
    return MtnResult(N, sign, duality_ratio(vecs[0], vecs[1], g, orientation),
                     mtn_check(vecs, g))


# --- quartics ---------------------------------------------------------------

@dataclass
class PetrovReport:
    type: str
    roots: list = field(default_factory=list)          # projective roots (a, b) meaning z = a/b
    multiplicities: list = field(default_factory=list)
    partition: tuple = ()
    backward_error: float = 0.0
    margin: float = float("inf")                       # next-more-degenerate error / accepted error
    psi: np.ndarray = None

    def record(self):
        def z(r):
            a, b = r
            if abs(b) < 1e-300:
                return "inf"
            v = complex(a / b)
            return [v.real, v.imag]
        return {"type": self.type, "partition": list(self.partition),
                "roots": [z(r) for r in self.roots], "multiplicities": self.multiplicities,
                "backward_error": self.backward_error,
                "margin": None if not np.isfinite(self.margin) else float(self.margin)}


def quartic_coefficients(psi):
    """Coefficients of p(z) in descending powers."""
    psi = np.asarray(psi, complex)
    return np.array([comb(4, k) * psi[k] for k in range(5)])


def psi_from_roots(roots, scale=1.0):
    """Components psi_k of scale * prod (b_i z - a_i) for projective roots
    (a_i, b_i); plain complex numbers mean (z, 1) and ``np.inf`` means (1, 0)."""
    poly = np.array([complex(scale)])
    for r in roots:
        if isinstance(r, tuple):
            a, b = r
        elif np.isinf(r):
            a, b = 1.0, 0.0
        else:
            a, b = r, 1.0
        poly = np.convolve(poly, [b, -a])
    return np.array([poly[k] / comb(4, k) for k in range(5)])


def _set_partitions(n):
    def rec(items):
        if not items:
            yield []
            return
        first, rest = items[0], items[1:]
        for part in rec(rest):
            yield [[first]] + part
            for k in range(len(part)):
                yield part[:k] + [[first] + part[k]] + part[k + 1:]
    return list(rec(list(range(n))))


_PARTITIONS = sorted(_set_partitions(4), key=len)
_BOMBIERI = np.array([1.0 / comb(4, k) for k in range(5)])


def _bnorm(c):
    return float(np.sqrt(np.sum(np.abs(c) ** 2 * _BOMBIERI)))


def _rotations():
    out = []
    for th, ph in [(0.0, 0.0), (0.9, 0.4), (1.7, 2.1), (2.4, 4.0), (1.2, 5.3), (0.5, 3.0),
                   (2.9, 1.1), (1.5, 0.2)]:
        a, b = np.cos(th / 2), np.sin(th / 2) * np.exp(1j * ph)
        out.append((a, b))
    return out


def _rotate(c, a, b):
    """Coefficients of q(z) = sum c_k (a z + b)^(4-k) (-conj(b) z + conj(a))^k."""
    q = np.zeros(5, complex)
    for k in range(5):
        t = np.array([1.0 + 0j])
        for _ in range(4 - k):
            t = np.convolve(t, [a, b])
        for _ in range(k):
            t = np.convolve(t, [-np.conj(b), np.conj(a)])
        q += c[k] * t
    return q


def _times_linear(p, c):
    """Coefficients of p(z) * (z - c), descending powers, as a list."""
    out = p + [0j]
    for k in range(1, len(out)):
        out[k] -= c * p[k - 1]
    return out


def _model(c, mult):
    """Monic prod (z - c_j)^s_j and its derivatives with respect to c_j."""
    m = [1 + 0j]
    for cj, sj in zip(c, mult):
        for _ in range(sj):
            m = _times_linear(m, cj)
    J = np.zeros((5, len(c)), complex)
    for j, sj in enumerate(mult):
        d = [-float(sj) + 0j]
        for i, (ci, si) in enumerate(zip(c, mult)):
            for _ in range(si - (1 if i == j else 0)):
                d = _times_linear(d, ci)
        J[1:, j] = d
    return np.array(m), J


_W = np.sqrt(_BOMBIERI)


def _refine(qm, mult, c0, iters=30, skip_above=None):
    """Gauss-Newton fit of a monic polynomial with root multiplicities
    ``mult`` to ``qm``; returns the centers and the relative backward error."""
    c = np.array(c0, complex)
    qn = _bnorm(qm)
    if skip_above is not None:
        err0 = _bnorm(qm - _model(c, mult)[0]) / qn
        if err0 > skip_above:
            return c, err0
    best_c, best = c.copy(), np.inf
    for it in range(iters):
        m, J = _model(c, mult)
        r = qm - m
        err = _bnorm(r) / qn
        if err < best:
            improved = err < 0.5 * best
            best_c, best = c.copy(), err
        else:
            improved = False
        if err < 1e-15 or (it >= 4 and not improved):
            break
        A = J[1:] * _W[1:, None]
        step = np.linalg.lstsq(A, r[1:] * _W[1:], rcond=None)[0]
        if not np.all(np.isfinite(step)):
            break
        c = c + step
    return best_c, best


def classify_quartic(psi, tol=1e-6):
    """Petrov type of a symmetric 4-spinor from its root multiplicities.

    The quartic is moved by an SU(2) rotation of CP1 so that no root lies
    at infinity.  For every set partition of the four computed roots, the
    cluster means seed a Gauss-Newton fit of the nearest polynomial with
    that multiplicity pattern; the coarsest pattern whose relative
    (Bombieri-norm) backward error is at most ``tol**2`` is accepted.
    Merging roots at chordal distance ``d`` costs about ``d**2``, while a
    genuine multiple root costs only rounding error, so the decision is
    made at the scale ``tol`` even though rounding alone can smear a
    quadruple root over ``1e-4``.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    psi = np.asarray(psi, complex)
    if np.max(np.abs(psi)) <= tol:
        return PetrovReport("0", psi=psi)
    c = quartic_coefficients(psi)
    c = c / _bnorm(c)
    best = None
    for a, b in _rotations():
        q = _rotate(c, a, b)
        if best is None or abs(q[0]) > abs(best[0][0]):
            best = (q, a, b)
    q, a, b = best
    qm = q / q[0]
    r = np.roots(qm)
    thr = tol ** 2
    by_blocks = {}
    for part in _PARTITIONS:
        mult = [len(blk) for blk in part]
        # rounding smears a multiple root by at most ~1e-4, whose merge
        # cost is ~1e-8; partitions worse than that cannot be rescued
        centers, err = _refine(qm, mult, [sum(r[i] for i in blk) / len(blk) for blk in part],
                               skip_above=max(1e-6, 1e4 * thr))
        by_blocks.setdefault(len(part), []).append((err, mult, centers))
    accepted = None
    for nb in range(1, 5):
        cands = [t for t in by_blocks[nb] if t[0] <= thr]
        if cands:
            accepted = (nb, min(cands, key=lambda t: t[0]))
            break
    if accepted is None:
        accepted = (4, min(by_blocks[4], key=lambda t: t[0]))
    nb, (err, mult, centers) = accepted
    coarser = [t[0] for t in by_blocks.get(nb - 1, [])]
    margin = (min(coarser) / max(err, 1e-300)) if coarser else float("inf")
    order = np.argsort(mult, kind="stable")
    # undo the rotation: z = (a z' + b) / (-conj(b) z' + conj(a))
    roots = [(a * centers[k] + b, -np.conj(b) * centers[k] + np.conj(a)) for k in order]
    mults = [mult[k] for k in order]
    key = tuple(sorted(mults))
    return PetrovReport(TYPES[key], roots, mults, key, float(err), float(margin), psi)


def factorization_residual(report):
    """Distance between psi and the symmetric product of its eigenspinors,
    normalized by |psi|."""
    psi = report.psi
    if report.type == "0":
        return 0.0
    roots = [r for r, s in zip(report.roots, report.multiplicities) for _ in range(s)]
    rebuilt = psi_from_roots(roots)
    c, m = quartic_coefficients(psi), quartic_coefficients(rebuilt)
    alpha = np.vdot(m, c) / np.vdot(m, m)
    return float(np.max(np.abs(c - alpha * m)) / np.max(np.abs(c)))


def classify_riemannian(psi, rep, tol=1e-6):
    """Type I, D or 0 for a real self-dual Weyl spinor in Euclidean
    signature.  Roots must come in charge-conjugate pairs."""
    rep_report = classify_quartic(psi, tol)
    if rep_report.type == "0":
        return "0", rep_report
    e = rep.chiral_basis(1)
    eps = 1e3 * tol
    roots = [r for r, s in zip(rep_report.roots, rep_report.multiplicities) for _ in range(s)]
    unpaired = list(range(4))
    while unpaired:
        i = unpaired.pop(0)
        a, b = roots[i]
        phi = e @ np.array([a, b])
        pc = charge_conjugate(phi, rep)
        coords = np.linalg.lstsq(e, pc, rcond=None)[0]
        j = next((j for j in unpaired if _chordal(roots[j], tuple(coords)) < eps), None)
        if j is None:
            z = complex(a / b) if abs(b) > 0 else np.inf
            raise ValueError(f"reality condition violated: root {z} has no charge-conjugate partner")
        unpaired.remove(j)
    t = {"I": "I", "D": "D"}.get(rep_report.type)
    if t is None:
        raise ValueError(f"partition {rep_report.partition} is impossible for a real Euclidean Weyl spinor")
    return t, rep_report


def _chordal(r, s):
    a = np.array(r, complex)
    b = np.array(s, complex)
    a = a / np.linalg.norm(a)
    b = b / np.linalg.norm(b)
    return float(np.sqrt(max(0.0, 1 - abs(np.vdot(a, b)) ** 2)))


# --- Weyl tensors ------------------------------------------------------------

def weyl_scalars(C, tetrad):
    """Psi_0..Psi_4 from the quartic f(a) = C(l + a mbar, m - a n, l + a mbar, m - a n),
    f(a) = sum_k binom(4, k) Psi_k a^k."""
    L = [tetrad.l, tetrad.mbar]
    M = [tetrad.m, -tetrad.n]
    c = np.zeros(5, complex)
    for i, j, k, l in product(range(2), repeat=4):
        c[i + j + k + l] += np.einsum("abcd,a,b,c,d->", C, L[i], M[j], L[k], M[l])
    return np.array([c[k] / comb(4, k) for k in range(5)])


def petrov_at(curv, seed=0, tol=1e-6):
    """Petrov type from a :class:`robinson.curvature.CurvatureAtPoint`."""
    tet = build_null_tetrad(curv.metric, seed=seed)
    psi = weyl_scalars(curv.weyl, tet)
    scale = 1 + np.max(np.abs(curv.riemann_lower))
    if np.max(np.abs(psi)) / scale < tol:
        return PetrovReport("0", psi=psi)
    # the quartic in a has roots a_i; the classification polynomial uses z = 1/a
    return classify_quartic(psi[::-1], tol)


def petrov_of_metric(g, p, tol=1e-6, seed=0):
    from .curvature import curvature_at
    return petrov_at(curvature_at(g, p), seed, tol)


__all__ = [
    "CliffordRep", "MtnResult", "PetrovReport", "TYPES", "build_clifford", "charge_conjugate",
    "chirality", "classify_quartic", "classify_riemannian", "factorization_residual",
    "mtn_from_spinor", "petrov_at", "petrov_of_metric", "psi_from_roots", "quartic_coefficients",
    "weyl_scalars",
]
