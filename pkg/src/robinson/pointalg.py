"""Multilinear algebra at a single point of a chart.

Exterior forms are stored by their components on strictly increasing
multi-indices, in the order produced by :func:`itertools.combinations`.
Metrics use the mostly-plus signature: time-like vectors have negative norm.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np


class SignatureError(ValueError):
    pass


def _perm_sign(seq):
    seq = list(seq)
    sign = 1
    for a in range(len(seq)):
        for b in range(a + 1, len(seq)):
            if seq[a] > seq[b]:
                sign = -sign
    return sign


@lru_cache(maxsize=None)
def basis(dim, degree):
    """Increasing multi-indices of the given degree."""
    return tuple(combinations(range(dim), degree))


@lru_cache(maxsize=None)
def _position(dim, degree):
    return {idx: k for k, idx in enumerate(basis(dim, degree))}


@lru_cache(maxsize=None)
def _wedge_table(dim, p, q):
    pos = _position(dim, p + q)
    ia, ib, ic, sg = [], [], [], []
    for a, I in enumerate(basis(dim, p)):
        for b, J in enumerate(basis(dim, q)):
            if set(I) & set(J):
                continue
            ia.append(a)
            ib.append(b)
            ic.append(pos[tuple(sorted(I + J))])
            sg.append(_perm_sign(I + J))
    return np.array(ia, int), np.array(ib, int), np.array(ic, int), np.array(sg, float)


@lru_cache(maxsize=None)
def _interior_table(dim, degree):
    """Rows (target index, vector index, source index, sign) for v ⌟ a."""
    pos = _position(dim, degree)
    it, iv, isrc, sg = [], [], [], []
    for t, J in enumerate(basis(dim, degree - 1)):
        for j in range(dim):
            if j in J:
                continue
            K = (j,) + J
            it.append(t)
            iv.append(j)
            isrc.append(pos[tuple(sorted(K))])
            sg.append(_perm_sign(K))
    return np.array(it, int), np.array(iv, int), np.array(isrc, int), np.array(sg, float)


@dataclass(frozen=True)
class FormAtPoint:
    degree: int
    dim: int
    comps: np.ndarray

    def __post_init__(self):
        comps = np.asarray(self.comps, dtype=complex)
        if comps.shape != (len(basis(self.dim, self.degree)),):
            raise ValueError(f"a {self.degree}-form in dimension {self.dim} needs "
                             f"{len(basis(self.dim, self.degree))} components")
        object.__setattr__(self, "comps", comps)

    @classmethod
    def zero(cls, degree, dim):
        return cls(degree, dim, np.zeros(len(basis(dim, degree)), dtype=complex))

    @classmethod
    def from_dict(cls, degree, dim, entries):
        """Build from ``{multi_index: value}``; indices need not be sorted."""
        out = np.zeros(len(basis(dim, degree)), dtype=complex)
        pos = _position(dim, degree)
        for idx, val in entries.items():
            idx = tuple(idx)
            if len(set(idx)) < len(idx):
                continue
            out[pos[tuple(sorted(idx))]] += _perm_sign(idx) * val
        return cls(degree, dim, out)

    @classmethod
    def covector(cls, comps):
        comps = np.asarray(comps, dtype=complex)
        return cls(1, comps.shape[0], comps)

    def to_full(self):
        full = np.zeros((self.dim,) * self.degree, dtype=complex)
        if self.degree == 0:
            return np.asarray(self.comps[0])
        for k, I in enumerate(basis(self.dim, self.degree)):
            for P in permutations(range(self.degree)):
                full[tuple(I[p] for p in P)] = _perm_sign(P) * self.comps[k]
        return full

    @classmethod
    def from_full(cls, full):
        full = np.asarray(full, dtype=complex)
        degree = full.ndim
        dim = full.shape[0] if degree else 0
        if degree == 0:
            raise ValueError("use FormAtPoint(0, dim, [value]) for functions")
        return cls(degree, dim, np.array([full[I] for I in basis(dim, degree)]))

    def __add__(self, other):
        self._check(other)
        return FormAtPoint(self.degree, self.dim, self.comps + other.comps)

    def __sub__(self, other):
        self._check(other)
        return FormAtPoint(self.degree, self.dim, self.comps - other.comps)

    def __mul__(self, c):
        return FormAtPoint(self.degree, self.dim, self.comps * c)

    __rmul__ = __mul__

    def __neg__(self):
        return self * -1

    def conj(self):
        return FormAtPoint(self.degree, self.dim, self.comps.conj())

    def norm(self):
        return float(np.max(np.abs(self.comps))) if self.comps.size else 0.0

    def component(self, *idx):
        if len(set(idx)) < len(idx):
            return 0j
        return self.comps[_position(self.dim, self.degree)[tuple(sorted(idx))]] * _perm_sign(idx)

    def _check(self, other):
        if (self.degree, self.dim) != (other.degree, other.dim):
            raise ValueError("forms of different degree or dimension")

    def __xor__(self, other):
        return wedge(self, other)


def wedge(a, b):
    if a.dim != b.dim:
        raise ValueError("forms live in different dimensions")
    p, q = a.degree, b.degree
    if p + q > a.dim:
        raise ValueError(f"degree overflow: {p} + {q} > {a.dim}")
    ia, ib, ic, sg = _wedge_table(a.dim, p, q)
    out = np.zeros(len(basis(a.dim, p + q)), dtype=complex)
    np.add.at(out, ic, sg * a.comps[ia] * b.comps[ib])
    return FormAtPoint(p + q, a.dim, out)


def wedge_all(forms):
    forms = list(forms)
    out = forms[0]
    for f in forms[1:]:
        out = wedge(out, f)
    return out


def interior(v, a):
    """Contraction of the vector ``v`` into the first slot of ``a``."""
    if a.degree < 1:
        raise ValueError("interior product needs a form of degree >= 1")
    v = np.asarray(v, dtype=complex)
    if v.shape != (a.dim,):
        raise ValueError("vector and form dimensions differ")
    it, iv, isrc, sg = _interior_table(a.dim, a.degree)
    out = np.zeros(len(basis(a.dim, a.degree - 1)), dtype=complex)
    np.add.at(out, it, sg * v[iv] * a.comps[isrc])
    return FormAtPoint(a.degree - 1, a.dim, out)


class MetricAtPoint:
    """A nondegenerate symmetric bilinear form on the tangent space."""

    def __init__(self, g):
        g = np.asarray(g, dtype=complex)
        if g.ndim != 2 or g.shape[0] != g.shape[1]:
            raise ValueError("metric must be a square matrix")
        if not np.array_equal(g, g.T):
            g = 0.5 * (g + g.T)
        self.g = g
        self.det = complex(np.linalg.det(g))
        if self.det == 0 or not np.isfinite(self.det):
            raise SignatureError("degenerate metric")
        self.g_inv = np.linalg.inv(g)

    @property
    def dim(self):
        return self.g.shape[0]

    @property
    def is_real(self):
        return bool(np.all(self.g.imag == 0))

    def signature(self):
        """(positive, negative) eigenvalue counts of the real part."""
        ev = np.linalg.eigvalsh(self.g.real)
        return int(np.sum(ev > 0)), int(np.sum(ev < 0))

    @property
    def lorentzian(self):
        return self.signature() == (self.dim - 1, 1)

    def inner(self, v, w):
        return complex(np.asarray(v) @ self.g @ np.asarray(w))

    def lower(self, v):
        return FormAtPoint.covector(self.g @ np.asarray(v, dtype=complex))

    def raise_index(self, a):
        comps = a.comps if isinstance(a, FormAtPoint) else np.asarray(a)
        return self.g_inv @ comps

    def raise_form(self, a):
        """Contravariant components a^I on increasing multi-indices."""
        idx = basis(a.dim, a.degree)
        if a.degree == 0:
            return a.comps.copy()
        minors = np.array([[np.linalg.det(self.g_inv[np.ix_(I, K)]) for K in idx] for I in idx])
        return minors @ a.comps

    def form_inner(self, a, b):
        """Bilinear pairing sum over increasing I of a_I b^I."""
        return complex(a.comps @ self.raise_form(b))


def hodge(a, g, orientation=1):
    """Hodge star in dimension four.

    The sign is fixed so that, with orthonormal coordinates (t, x, y, z),
    ``g(d_t, d_t) = -1`` and orientation ``dt^dx^dy^dz``,
    ``*(dt^dx) = dy^dz`` and ``*(dy^dz) = -dt^dx``.
    """
    if g.dim != 4 or a.dim != 4:
        raise ValueError("the Hodge star is implemented in dimension 4 only")
    if orientation not in (1, -1):
        raise ValueError("orientation must be +1 or -1")
    k = a.degree
    raised = g.raise_form(a)
    vol = -orientation * np.sqrt(abs(g.det))
    out = np.zeros(len(basis(4, 4 - k)), dtype=complex)
    pos = _position(4, 4 - k)
    for n, I in enumerate(basis(4, k)):
        comp = tuple(j for j in range(4) if j not in I)
        out[pos[comp]] += vol * _perm_sign(I + comp) * raised[n]
    return FormAtPoint(4 - k, 4, out)


def levi_civita(g, orientation=1):
    """The volume tensor with the same calibration as :func:`hodge`."""
    eps = np.zeros((4, 4, 4, 4))
    for P in permutations(range(4)):
        eps[P] = _perm_sign(P)
    return -orientation * np.sqrt(abs(g.det)) * eps


@dataclass(frozen=True)
class NullTetrad:
    """Null vectors ``l``, ``n`` (real) and ``m`` (complex) with
    ``g(l, n) = g(m, conj(m)) = 1``, all other pairings zero."""

    l: np.ndarray
    n: np.ndarray
    m: np.ndarray
    metric: MetricAtPoint

    @property
    def mbar(self):
        return self.m.conj()

    def residual(self):
        g = self.metric
        l, n, m, mb = self.l, self.n, self.m, self.mbar
        zero = [g.inner(l, l), g.inner(n, n), g.inner(m, m), g.inner(l, m), g.inner(n, m),
                g.inner(l, mb), g.inner(n, mb)]
        one = [g.inner(l, n) - 1, g.inner(m, mb) - 1]
        return max(abs(x) for x in zero + one)

    def reconstruct(self):
        """``l n + n l + m mbar + mbar m`` with lowered indices."""
        L, N, M = (self.metric.g @ v for v in (self.l, self.n, self.m))
        Mb = M.conj() if self.metric.is_real else self.metric.g @ self.mbar
        return (np.multiply.outer(L, N) + np.multiply.outer(N, L)
                + np.multiply.outer(M, Mb) + np.multiply.outer(Mb, M))


def _random_rotation(rng):
    q, r = np.linalg.qr(rng.normal(size=(3, 3)))
    q = q @ np.diag(np.sign(np.diag(r)))
    if np.linalg.det(q) < 0:
        q[:, 0] = -q[:, 0]
    return q


def build_null_tetrad(g, seed=0, boost=1.0):
    """A null tetrad for a real Lorentzian metric.

    The time-like/space-like split comes from the eigenvectors of ``g``;
    the seed draws a random spatial rotation and a boost of rapidity up to
    ``boost`` so that different seeds give genuinely different tetrads.
    ``seed=None`` skips both.
    """
    if not isinstance(g, MetricAtPoint):
        g = MetricAtPoint(g)
    if g.dim != 4:
        raise SignatureError("null tetrads are built in dimension 4")
    gr = g.g.real
    ev, vec = np.linalg.eigh(gr)
    neg = np.where(ev < 0)[0]
    pos = np.where(ev > 0)[0]
    if len(neg) != 1 or len(pos) != 3:
        raise SignatureError(f"expected signature (3, 1), eigenvalues {ev}")
    et = vec[:, neg[0]] / np.sqrt(-ev[neg[0]])
    es = [vec[:, k] / np.sqrt(ev[k]) for k in pos]
    if seed is not None:
        rng = np.random.default_rng(seed)
        R = _random_rotation(rng)
        es = [sum(R[a, b] * es[b] for b in range(3)) for a in range(3)]
        beta = rng.uniform(-boost, boost)
        et, es[0] = (np.cosh(beta) * et + np.sinh(beta) * es[0],
                     np.sinh(beta) * et + np.cosh(beta) * es[0])
    s2 = np.sqrt(2.0)
    l = (et + es[0]) / s2
    n = (-et + es[0]) / s2
    m = (es[1] + 1j * es[2]) / s2
    return NullTetrad(l.astype(complex), n.astype(complex), m, g)


def mtn_check(vectors, g, tol=1e-10):
    """True iff the vectors are pairwise null (self-pairings included) and
    span a subspace of half the dimension."""
    if not isinstance(g, MetricAtPoint):
        g = MetricAtPoint(g)
    V = np.array([np.asarray(v, dtype=complex) for v in vectors])
    if V.size == 0:
        raise ValueError("need at least one vector")
    scale = 1.0 + np.max(np.abs(g.g)) * np.max(np.abs(V)) ** 2
    gram = V @ g.g @ V.T
    if np.max(np.abs(gram)) > tol * scale:
        return False
    sv = np.linalg.svd(V, compute_uv=False)
    rank = int(np.sum(sv > tol * max(1.0, sv[0])))
    return rank * 2 == g.dim


def duality_ratio(m1, m2, g, orientation=1):
    """The scalar ``s`` with ``*(m1 ^ m2) = s (m1 ^ m2)`` for a null pair of
    vectors, indices lowered by ``g``.  ``s`` is ±1 in Euclidean signature and
    ±i in Lorentzian signature."""
    if not isinstance(g, MetricAtPoint):
        g = MetricAtPoint(g)
    f = wedge(g.lower(m1), g.lower(m2))
    sf = hodge(f, g, orientation)
    k = int(np.argmax(np.abs(f.comps)))
    s = sf.comps[k] / f.comps[k]
    if np.max(np.abs(sf.comps - s * f.comps)) > 1e-8 * (1 + np.max(np.abs(f.comps))):
        raise ValueError("the 2-form is not an eigenvector of the Hodge star")
    return s


__all__ = [
    "FormAtPoint", "MetricAtPoint", "NullTetrad", "SignatureError", "basis", "build_null_tetrad",
    "duality_ratio", "hodge", "interior", "levi_civita", "mtn_check", "wedge",
    "wedge_all",
]
