import numpy as np
import pytest

from robinson.algclass import petrov_at
from robinson.curvature import (christoffel_finite_difference, curvature_at, hodge_first_pair,
                                is_flat, is_ricci_flat, sd_asd_split)
from robinson.exprjet import parse
from robinson.fields import FormField


def points(rng, n, lo=-1, hi=1, box=None):
    pts = rng.uniform(lo, hi, size=(n, 4))
    for k, (a, b) in (box or {}).items():
        pts[:, k] = rng.uniform(a, b, size=n)
    return pts


class TestFlat:
    def test_minkowski(self, mink):
        K = curvature_at(mink, [0.1, 0.2, 0.3, 0.4])
        for t in (K.christoffel, K.riemann, K.ricci, K.weyl):
            assert np.max(np.abs(t)) <= 1e-10

    def test_robinson_congruence_metric(self, robinson_flat, rng):
        rep = is_flat(robinson_flat, points(rng, 100))
        assert rep.verdict, rep.summary()

    def test_report_records_domain_errors(self, uvxy, rng):
        from robinson.fields import MetricField
        g = MetricField.from_components(uvxy, [[0, .5, 0, 0], [.5, 0, 0, 0], [0, 0, parse("log(x)", uvxy), 0],
                                               [0, 0, 0, 1]])
        rep = is_flat(g, [[0, 0, 0.0, 0]])
        assert not rep.verdict and rep.errors


class TestPlaneWave:
    def test_harmonic_profile(self, plane_wave, rng):
        g = plane_wave("x^2-y^2")
        pts = points(rng, 30)
        assert is_ricci_flat(g, pts).verdict
        assert not is_flat(g, pts).verdict

    def test_non_harmonic_control(self, plane_wave, rng):
        rep = is_ricci_flat(plane_wave("x^2+y^2"), points(rng, 10))
        assert not rep.verdict
        assert rep.min_residual > 0.1

    def test_self_dual_part(self, plane_wave):
        K = curvature_at(plane_wave("x^2-y^2"), [0.1, 0.2, 0.3, 0.4])
        Cp, Cm = sd_asd_split(K)
        assert np.max(np.abs(Cp)) > 0.1
        assert np.max(np.abs(hodge_first_pair(Cp, K.metric) - 1j * Cp)) < 1e-9
        assert np.max(np.abs(hodge_first_pair(Cm, K.metric) + 1j * Cm)) < 1e-9
        assert np.allclose(Cp + Cm, K.weyl)


class TestGoedel:
    # Ricci tensor and scalar of the Goedel form, frozen from a symbolic computation
    def test_ricci_is_dust(self, goedel, rng):
        for U, V, X, Y in points(rng, 10, box={3: (0.2, 5)}):
            K = curvature_at(goedel, [U, V, X, Y])
            u = np.array([1, 1, -2 / Y, 0])
            assert K.scalar == pytest.approx(-1)
            assert np.allclose(K.ricci, 0.5 * np.outer(u, u), atol=1e-12)

    def test_conjugate_split(self, goedel, rng):
        for p in points(rng, 5, box={3: (0.2, 5)}):
            Cp, Cm = sd_asd_split(curvature_at(goedel, p))
            assert np.allclose(Cp.conj(), Cm, atol=1e-12)

    def test_type_D_all_tetrads(self, goedel, rng):
        for p in points(rng, 5, box={3: (0.2, 5)}):
            K = curvature_at(goedel, p)
            assert {petrov_at(K, seed=s).type for s in range(5)} == {"D"}


class TestThreeCongruence:
    def test_scalar_curvature(self, threecong, rng):
        # symbolic value R = 5 / (8 x^4)
        for p in points(rng, 10, box={2: (0.2, 2)}):
            assert curvature_at(threecong, p).scalar == pytest.approx(5 / (8 * p[2] ** 4))

    def test_algebraically_special(self, threecong, rng):
        for p in points(rng, 5, box={2: (0.2, 2)}):
            K = curvature_at(threecong, p)
            assert {petrov_at(K, seed=s).type for s in range(5)} == {"II"}


class TestIdentities:
    @pytest.fixture
    def samples(self, mink, robinson_flat, plane_wave, goedel, threecong, schwarzschild):
        return [(mink, {}), (robinson_flat, {}), (plane_wave("x^2-y^2"), {}),
                (goedel, {3: (0.2, 5)}), (threecong, {2: (0.2, 2)}),
                (schwarzschild, {1: (2.5, 6), 2: (0.3, 2.8)})]

    def test_symmetries_and_trace(self, samples, rng):
        for g, box in samples:
            for p in points(rng, 10, box=box):
                K = curvature_at(g, p)
                assert K.symmetry_residual() < 1e-9
                assert K.weyl_trace_residual() < 1e-9

    def test_christoffel_oracle(self, samples, rng):
        for g, box in samples:
            for p in points(rng, 5, box=box):
                exact = curvature_at(g, p).christoffel
                approx = christoffel_finite_difference(g, p, 1e-5)
                assert np.max(np.abs(exact - approx)) <= 1e-5 * (1 + np.max(np.abs(exact)))

    def test_schwarzschild(self, schwarzschild, rng):
        pts = points(rng, 10, box={1: (2.5, 6), 2: (0.3, 2.8)})
        assert is_ricci_flat(schwarzschild, pts).verdict
        assert {petrov_at(curvature_at(schwarzschild, p)).type for p in pts} == {"D"}


class TestConformal:
    def test_type_unchanged(self, plane_wave, goedel, rng):
        for g, coord, box in [(plane_wave("x^2-y^2"), "u", {}), (goedel, "U", {3: (0.2, 5)})]:
            omega2 = FormField.scalar(g.chart, parse(f"exp(0.2*{coord})", g.chart))
            h = g.scaled(omega2)
            for p in points(rng, 5, box=box):
                assert petrov_at(curvature_at(h, p)).type == petrov_at(curvature_at(g, p)).type

    def test_weyl_scales(self, goedel):
        p = [0.3, 0.1, -0.2, 1.1]
        omega2 = FormField.scalar(goedel.chart, parse("exp(0.2*U)", goedel.chart))
        C = curvature_at(goedel, p).weyl
        C2 = curvature_at(goedel.scaled(omega2), p).weyl
        assert np.allclose(C2, np.exp(0.2 * p[0]) * C, atol=1e-12)
