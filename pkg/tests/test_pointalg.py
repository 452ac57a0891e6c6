import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robinson.pointalg import (FormAtPoint, MetricAtPoint, SignatureError, build_null_tetrad,
                               duality_ratio, hodge, interior, mtn_check, wedge)

MINK = MetricAtPoint(np.diag([-1.0, 1, 1, 1]))
EUCL = MetricAtPoint(np.eye(4))
# g = du dv + dw dwbar in (u, v, x, y)
UVXY = MetricAtPoint(np.array([[0, .5, 0, 0], [.5, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]]))


def two(i, j, c=1.0):
    return FormAtPoint.from_dict(2, 4, {(i, j): c})


def random_form(rng, degree):
    n = len(FormAtPoint.zero(degree, 4).comps)
    return FormAtPoint(degree, 4, rng.normal(size=n) + 1j * rng.normal(size=n))


class TestWedge:
    def test_volume(self):
        assert wedge(two(0, 1), two(2, 3)).comps[0] == 1

    def test_one_form_squares_to_zero(self, rng):
        a = random_form(rng, 1)
        assert np.all(wedge(a, a).comps == 0)

    def test_complex_pair(self):
        a = FormAtPoint.covector([1, 0, 1j, 0])
        b = FormAtPoint.covector([1, 0, -1j, 0])
        assert np.allclose(wedge(a, b).comps, two(0, 2, -2j).comps)

    def test_graded_commutative(self, rng):
        for p in range(4):
            for q in range(4 - p + 1):
                a, b = random_form(rng, p), random_form(rng, q)
                assert np.allclose(wedge(a, b).comps, (-1) ** (p * q) * wedge(b, a).comps)

    def test_associative(self, rng):
        a, b, c = (random_form(rng, 1) for _ in range(3))
        assert np.allclose(wedge(wedge(a, b), c).comps, wedge(a, wedge(b, c)).comps)

    def test_overflow(self):
        with pytest.raises(ValueError):
            wedge(two(0, 1), FormAtPoint.zero(3, 4))


class TestInterior:
    def test_basic(self):
        assert np.array_equal(interior([1, 0, 0, 0], two(0, 1)).comps, [0, 1, 0, 0])
        assert interior([0, 1, 0, 0], FormAtPoint.covector([1, 0, 0, 0])).comps[0] == 0

    def test_null_vector_pattern(self, rng):
        v = np.array([0, 1.0, 0, 0])  # null for UVXY
        beta = random_form(rng, 1)
        vb = UVXY.lower(v)
        lhs = interior(v, wedge(vb, beta))
        rhs = -interior(v, beta).comps[0] * vb
        assert np.allclose(lhs.comps, rhs.comps)

    def test_antiderivation(self, rng):
        v = rng.normal(size=4)
        a, b = random_form(rng, 1), random_form(rng, 2)
        lhs = interior(v, wedge(a, b))
        rhs = interior(v, a).comps[0] * b - wedge(a, interior(v, b))
        assert np.allclose(lhs.comps, rhs.comps)

    def test_full_round_trip(self, rng):
        for k in range(1, 5):
            a = random_form(rng, k)
            assert np.array_equal(FormAtPoint.from_full(a.to_full()).comps, a.comps)


class TestHodge:
    def test_calibration(self):
        assert np.array_equal(hodge(two(0, 1), MINK).comps, two(2, 3).comps)
        assert np.array_equal(hodge(two(2, 3), MINK).comps, two(0, 1, -1).comps)

    def test_self_dual_maxwell(self, rng):
        fx, fy, fz = rng.normal(size=3) + 1j * rng.normal(size=3)
        F = FormAtPoint.from_dict(2, 4, {(0, 1): fx, (2, 3): -1j * fx, (0, 2): fy, (3, 1): -1j * fy,
                                         (0, 3): fz, (1, 2): -1j * fz})
        assert np.allclose(hodge(F, MINK).comps, 1j * F.comps, atol=1e-14)

    @pytest.mark.parametrize("g,sign", [(MINK, -1), (UVXY, -1), (EUCL, 1)])
    def test_double_star_on_two_forms(self, rng, g, sign):
        a = random_form(rng, 2)
        assert np.allclose(hodge(hodge(a, g), g).comps, sign * a.comps, atol=1e-12)

    def test_isometry(self, rng):
        a, b = random_form(rng, 2), random_form(rng, 2)
        assert np.isclose(MINK.form_inner(hodge(a, MINK), hodge(b, MINK)), -MINK.form_inner(a, b))

    def test_orientation_flips_sign(self, rng):
        a = random_form(rng, 1)
        assert np.allclose(hodge(a, MINK, -1).comps, -hodge(a, MINK, 1).comps)

    def test_dimension_guard(self):
        with pytest.raises(ValueError):
            hodge(FormAtPoint.zero(1, 3), MetricAtPoint(np.eye(3)))


class TestTetrad:
    @pytest.mark.parametrize("seed", [0, 1, 7, None])
    def test_minkowski(self, seed):
        t = build_null_tetrad(MINK, seed=seed)
        assert t.residual() < 1e-10
        assert np.max(np.abs(t.reconstruct() - MINK.g)) < 1e-10

    def test_seeds_differ(self):
        assert not np.allclose(build_null_tetrad(MINK, 1).l, build_null_tetrad(MINK, 2).l)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 2**31))
    def test_random_lorentzian(self, seed):
        rng = np.random.default_rng(seed)
        A = rng.normal(size=(4, 4))
        g = A.T @ np.diag([-1.0, 1, 1, 1]) @ A
        t = build_null_tetrad(g, seed=seed)
        assert t.residual() < 1e-10 * (1 + np.abs(g).max() * np.abs(t.l).max() ** 2)
        assert np.max(np.abs(t.reconstruct() - g)) < 1e-10 * (1 + np.abs(g).max())

    def test_signature_mismatch(self):
        with pytest.raises(SignatureError):
            build_null_tetrad(np.eye(4))


class TestMtn:
    def test_euclidean(self):
        assert mtn_check([[1, 1j, 0, 0], [0, 0, 1, 1j]], EUCL)

    def test_uvxy_pairs(self):
        assert mtn_check([[0, 1, 0, 0], [0, 0, 1, 1j]], UVXY)
        assert not mtn_check([[0, 1, 0, 0], [0, 0, 1, 0]], UVXY)

    def test_rank_deficient(self):
        assert not mtn_check([[0, 1, 0, 0], [0, 2, 0, 0]], UVXY)

    def test_duality_sign(self):
        t = build_null_tetrad(MINK, seed=4)
        s1 = duality_ratio(t.l, t.m, MINK)
        s2 = duality_ratio(t.l, t.m.conj(), MINK)
        assert abs(abs(s1) - 1) < 1e-12 and abs(s1.real) < 1e-12
        assert abs(s1 + s2) < 1e-12
        s = duality_ratio([1, 1j, 0, 0], [0, 0, 1, 1j], EUCL)
        assert abs(abs(s) - 1) < 1e-12 and abs(s.imag) < 1e-12
