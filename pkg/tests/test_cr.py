import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from robinson.cr import (CRChart, classify, cr_equivalent, cr_submanifold_check,
                         embed_from_defining, integrability_residual, levi_form, product_chart,
                         tangential_cr_residual)
from robinson.exprjet import Chart, DomainError, parse
from robinson.fields import ChartMap, FormField, covector_basis


@pytest.fixture(scope="module")
def hq_chart():
    return Chart("hq", ("u", "x", "y"), ((1, 2, "z"),))


def make_cr(c, kterms, mus, label):
    T = lambda terms: FormField.from_terms(c, 1, [(covector_basis(c, k), parse(e, c) if isinstance(e, str) else e)
                                                  for k, e in terms])
    return CRChart(c, T(kterms), [T(m) for m in mus], label)


@pytest.fixture(scope="module")
def hyperquadric(hq_chart):
    return make_cr(hq_chart, [("u", 1), ("zbar", "i*z"), ("z", "-i*conj(z)")], [[("z", 1)]], "hyperquadric")


@pytest.fixture(scope="module")
def lewy(hq_chart):
    return make_cr(hq_chart, [("u", 2), ("zbar", "i*z"), ("z", "-i*conj(z)")], [[("z", 1)]], "lewy")


@pytest.fixture(scope="module")
def trivial(hq_chart):
    return make_cr(hq_chart, [("u", 1)], [[("z", 1)]], "trivial")


@pytest.fixture(scope="module")
def c2():
    return Chart("c2", ("x1", "y1", "x2", "y2"), ((0, 1, "z1"), (2, 3, "z2")))


@pytest.fixture(scope="module")
def five():
    return Chart("five", ("u", "x1", "y1", "x2", "y2"), ((1, 2, "z1"), (3, 4, "z2")))


def sample(rng, n, dim=3, lo=-1, hi=1):
    return rng.uniform(lo, hi, size=(n, dim))


class TestLeviForm:
    def test_hyperquadric_value(self, hyperquadric, rng):
        for p in sample(rng, 5):
            e = levi_form(hyperquadric, p)
            assert np.allclose(e.h, [[2]], atol=1e-12)
            assert e.hermitian_residual < 1e-14
        assert classify(hyperquadric, sample(rng, 10)).verdict == "pseudoconvex"

    def test_trivial_chart(self, trivial, rng):
        rep = classify(trivial, sample(rng, 10))
        assert rep.verdict == "trivial"
        assert all(e.twist == 0 for e in rep.entries)

    def test_sign_of_kappa_flips_h(self, hyperquadric, rng):
        flipped = hyperquadric.transformed(-1.0, [0.0], [[1.0]])
        p = sample(rng, 1)[0]
        assert np.allclose(levi_form(flipped, p).h, [[-2]])
        # still definite, hence still pseudoconvex
        assert classify(flipped, [p]).verdict == "pseudoconvex"
        assert classify(flipped, [p]).signature == (0, 1)

    def test_signature_change_over_domain(self, five, rng):
        k = [("u", 1), ("z1bar", "i*z1"), ("z1", "-i*conj(z1)"), ("z2bar", "i*u*z2"), ("z2", "-i*u*conj(z2)")]
        c = make_cr(five, k, [[("z1", 1)], [("z2", 1)]], "u-weighted")
        pts = sample(rng, 10, dim=5, lo=-0.1, hi=0.1)
        pts[:, 0] = np.where(np.arange(10) % 2, 1, -1) * rng.uniform(0.5, 1, 10)
        rep = classify(c, pts)
        assert rep.verdict == "indefinite over domain"
        assert set(rep.witnesses) == {"pseudoconvex", "nondegenerate"}
        assert "nondegenerate at" in rep.summary()

    def test_five_dimensional_verdicts(self, five, rng):
        def chart(s1, s2):
            k = [("u", 1), ("z1bar", f"{s1}*i*z1"), ("z1", f"-{s1}*i*conj(z1)"),
                 ("z2bar", f"{s2}*i*z2"), ("z2", f"-{s2}*i*conj(z2)")]
            return make_cr(five, k, [[("z1", 1)], [("z2", 1)]], f"{s1},{s2}")
        pts = sample(rng, 5, dim=5)
        assert classify(chart(1, 1), pts).verdict == "pseudoconvex"
        assert classify(chart(1, -1), pts).verdict == "nondegenerate"
        assert classify(chart(1, 0), pts).verdict == "degenerate"
        assert np.allclose(levi_form(chart(1, -1), pts[0]).h, np.diag([2, -2]))

    def test_frame_condition(self, hq_chart):
        bad = make_cr(hq_chart, [("u", 1)], [[("u", 1)]], "degenerate")
        with pytest.raises(ValueError, match="frame"):
            levi_form(bad, [0.1, 0.2, 0.3])
        assert classify(bad, [[0.1, 0.2, 0.3]]).errors

    def test_dimension_mismatch(self, hq_chart):
        with pytest.raises(ValueError, match="needs 1 forms"):
            make_cr(hq_chart, [("u", 1)], [[("z", 1)], [("zbar", 1)]], "too many")

    def test_reality_validation(self, hq_chart):
        c = make_cr(hq_chart, [("u", 1), ("z", 1)], [[("z", 1)]], "complex kappa")
        with pytest.raises(ValueError, match="not real"):
            c.validate([[0, 0, 0]])


class TestTransformationLaw:
    """h' = a c^T h conj(c) with c = B^-1 under kappa' = a kappa, mu' = b kappa + B mu."""

    @settings(max_examples=5, deadline=None)
    @given(a=st.floats(0.2, 3) | st.floats(-3, -0.2),
           b=st.complex_numbers(max_magnitude=2, allow_nan=False, allow_infinity=False),
           B=st.complex_numbers(min_magnitude=0.3, max_magnitude=3, allow_nan=False, allow_infinity=False))
    def test_three_dimensional(self, hyperquadric, a, b, B):
        p = np.array([0.3, -0.2, 0.5])
        h = levi_form(hyperquadric, p).h
        t = hyperquadric.transformed(a, [b], [[B]])
        c = 1 / B
        assert np.allclose(levi_form(t, p).h, a * c * h * np.conj(c), atol=1e-8 * (1 + abs(a)))
        assert classify(t, [p]).verdict == classify(hyperquadric, [p]).verdict

    def test_function_coefficients(self, hyperquadric, hq_chart, rng):
        a = FormField.scalar(hq_chart, parse("2 + x^2", hq_chart))
        B = FormField.scalar(hq_chart, parse("1 + i*u", hq_chart))
        b = FormField.scalar(hq_chart, parse("conj(z)", hq_chart))
        t = hyperquadric.transformed(a, [b], [[B]])
        for p in sample(rng, 5):
            av, Bv = 2 + p[1] ** 2, 1 + 1j * p[0]
            assert np.allclose(levi_form(t, p).h, av * 2 / abs(Bv) ** 2, atol=1e-10)

    def test_five_dimensional(self, five, rng):
        k = [("u", 1), ("z1bar", "i*z1"), ("z1", "-i*conj(z1)"), ("z2bar", "-i*z2"), ("z2", "i*conj(z2)")]
        base = make_cr(five, k, [[("z1", 1)], [("z2", 1)]], "split")
        p = sample(rng, 1, dim=5)[0]
        h = levi_form(base, p).h
        for _ in range(5):
            a = rng.uniform(0.5, 2)
            B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
            b = rng.normal(size=2) + 1j * rng.normal(size=2)
            c = np.linalg.inv(B)
            t = base.transformed(a, list(b), B.tolist())
            assert np.allclose(levi_form(t, p).h, a * c.T @ h @ c.conj(), atol=1e-8)
            assert classify(t, [p]).verdict == "nondegenerate"


class TestEquivalence:
    def test_lewy_embedding(self, lewy, hq_chart, c2, rng):
        G = parse("i*(conj(z2)-z2) - z1*conj(z1)", c2)
        par = ChartMap.from_components(hq_chart, c2, {"z1": parse("z", hq_chart),
                                                      "z2": parse("u + 0.5*i*z*conj(z)", hq_chart)})
        pts = sample(rng, 5)
        E = embed_from_defining(G, c2, par, pts)
        for p in pts:
            e = cr_equivalent(lewy, E, p)
            assert e.equivalent, e.reason
            assert e.a == pytest.approx(0.5, abs=1e-12)
        assert classify(E, pts).verdict == "pseudoconvex"

    def test_goedel_pair(self, hyperquadric, rng):
        gc = Chart("g3", ("U", "X", "Y"))
        gd = CRChart(gc, FormField.from_components(gc, 1, {"X": 1, "U": parse("-Y", gc)}),
                     [FormField.from_components(gc, 1, {"X": 1, "Y": 1j})], "goedel")
        f = ChartMap.from_components(gc, hyperquadric.chart,
                                     {"u": parse("X", gc), "z": parse("sqrt(Y)*exp(-i*U/2)", gc)})
        pulled = hyperquadric.pullback(f)
        for U, X, Y in sample(rng, 5):
            Y = abs(Y) + 0.2
            e = cr_equivalent(pulled, gd, [U, X, Y])
            zbar = np.conj(np.sqrt(Y) * np.exp(-0.5j * U))
            assert e.equivalent
            assert e.a == pytest.approx(1)
            assert e.b[0] == pytest.approx(1)
            assert e.B[0, 0] == pytest.approx(2j * zbar)

    def test_conjugate_structure_is_different(self, trivial, hq_chart):
        conj = make_cr(hq_chart, [("u", 1)], [[("zbar", 1)]], "conjugate")
        e = cr_equivalent(trivial, conj, [0.1, 0.2, 0.3])
        assert not e.equivalent and "spans" in e.reason

    def test_complex_rescaling_rejected(self, hyperquadric):
        t = hyperquadric.transformed(1j, [0], [[1]])
        e = cr_equivalent(hyperquadric, t, [0.1, 0.2, 0.3])
        assert not e.equivalent and "non-real" in e.reason

    def test_different_charts(self, hyperquadric):
        other = Chart("other", ("a", "b", "c"))
        c = CRChart(other, FormField.from_components(other, 1, {"a": 1}),
                    [FormField.from_components(other, 1, {"b": 1, "c": 1j})])
        with pytest.raises(ValueError, match="different"):
            cr_equivalent(hyperquadric, c, [0, 0, 0])


class TestEmbedding:
    def test_off_surface(self, hq_chart, c2):
        G = parse("i*(conj(z2)-z2) - z1*conj(z1)", c2)
        par = ChartMap.from_components(hq_chart, c2, {"z1": parse("z", hq_chart),
                                                      "z2": parse("u + 2*i*z*conj(z)", hq_chart)})
        with pytest.raises(ValueError, match="does not vanish"):
            embed_from_defining(G, c2, par, [[0.1, 0.5, 0.2]])

    def test_critical_point(self, hq_chart, c2):
        G = parse("z1*conj(z1)", c2)
        par = ChartMap.from_components(hq_chart, c2, {"z1": parse("0*z", hq_chart), "z2": parse("u + i*x", hq_chart)})
        with pytest.raises(DomainError):
            embed_from_defining(G, c2, par, [[0.1, 0.5, 0.2]])

    def test_sphere(self, c2, rng):
        c = Chart("s", ("t", "x", "y"), ((1, 2, "z"),))
        G = parse("z1*conj(z1) + z2*conj(z2) - 1", c2)
        par = ChartMap.from_components(c, c2, {"z1": parse("z", c), "z2": parse("sqrt(1-z*conj(z))*exp(i*t)", c)})
        pts = sample(rng, 5, lo=-0.5, hi=0.5)
        S = embed_from_defining(G, c2, par, pts)
        assert classify(S, pts).verdict == "pseudoconvex"
        for p in pts:
            assert tangential_cr_residual(parse("z", c), S, p) < 1e-12
            assert tangential_cr_residual(parse("conj(z)", c), S, p) > 1e-3


class TestTangential:
    @pytest.mark.parametrize("fn, which, zero", [
        ("z", "hyperquadric", True),
        ("u + i*z*conj(z)", "hyperquadric", True),
        ("u + 0.5*i*z*conj(z)", "lewy", True),
        ("u + 0.5*i*z*conj(z)", "hyperquadric", False),
        ("conj(z)", "hyperquadric", False),
    ])
    def test_residuals(self, fn, which, zero, hyperquadric, lewy, hq_chart, rng):
        c = {"hyperquadric": hyperquadric, "lewy": lewy}[which]
        res = [tangential_cr_residual(parse(fn, hq_chart), c, p) for p in sample(rng, 5)]
        assert (max(res) < 1e-12) if zero else (min(res) > 1e-3)

    def test_lewy_operator(self, hq_chart, rng):
        # Z = d_x + i d_y - i (x + i y) d_u annihilates z2 = u + i |z|^2 / 2
        z2 = parse("u + 0.5*i*z*conj(z)", hq_chart)
        for p in sample(rng, 5):
            g = z2.jet(hq_chart, p, 1).grad
            Z = np.array([-1j * complex(p[1], p[2]), 1, 1j])
            assert abs(Z @ g) < 1e-12


class TestIntegrability:
    def test_three_dimensional_is_automatic(self, hyperquadric):
        assert np.all(integrability_residual(hyperquadric, [0.1, 0.2, 0.3]) == 0)

    def test_five_dimensional(self, five, rng):
        good = make_cr(five, [("u", 1)], [[("z1", 1)], [("z2", 1)]], "flat")
        bad = make_cr(five, [("u", 1)], [[("z1", 1)], [("z2", 1), ("z1bar", "conj(z2)")]], "bad")
        p = sample(rng, 1, dim=5)[0]
        assert max(integrability_residual(good, p)) == 0
        assert max(integrability_residual(bad, p)) > 0.01


class TestSubmanifolds:
    @pytest.fixture
    def target(self, five):
        k = [("u", 1), ("z1bar", "i*z1"), ("z1", "-i*conj(z1)"), ("z2bar", "i*z2"), ("z2", "-i*conj(z2)")]
        return make_cr(five, k, [[("z1", 1)], [("z2", 1)]], "hq5")

    def _map(self, hq_chart, five, z2):
        P = lambda s: parse(s, hq_chart)
        return ChartMap.from_components(hq_chart, five, {"u": P("u"), "z1": P("z"), "z2": P(z2)})

    @pytest.mark.parametrize("z2, ok", [("0*z", True), ("z^2", True), ("conj(z)", False)])
    def test_graphs(self, target, hq_chart, five, z2, ok):
        res = cr_submanifold_check(self._map(hq_chart, five, z2), target, np.array([0.2, 0.3, -0.4]))
        assert res.ok == ok
        if ok:
            assert res.residual < 1e-12 and res.chart.n == 1
        else:
            assert res.residual > 1e-3

    def test_not_an_immersion(self, target, hq_chart, five):
        P = lambda s: parse(s, hq_chart)
        f = ChartMap.from_components(hq_chart, five, {"u": P("0*u"), "z1": P("z"), "z2": P("0*z")})
        with pytest.raises(ValueError, match="immersion"):
            cr_submanifold_check(f, target, [0.1, 0.2, 0.3])


class TestProductChart:
    def test_projection_is_linear(self, hq_chart):
        chart, proj = product_chart(hq_chart)
        assert chart.coord_names == ("u", "v", "x", "y")
        assert proj.linear.shape == (4, 3)
        assert np.allclose(proj([1, 2, 3, 4]), [1, 3, 4])

    def test_linear_pullback_matches_general_path(self, hyperquadric, hq_chart, rng):
        from robinson.fields import pullback_field
        chart, proj = product_chart(hq_chart)
        general = ChartMap(proj.source, proj.target, lambda p, o: proj.jet(p, o), "general")
        for form in [hyperquadric.kappa, hyperquadric.omega()]:
            fast, slow = pullback_field(proj, form), pullback_field(general, form)
            for p in rng.uniform(-1, 1, (3, 4)):
                a, b = fast.jet(p, 1), slow.jet(p, 1)
                assert np.allclose(a.v, b.v, atol=1e-14)
                assert np.allclose(a.g, b.g, atol=1e-14)
                assert fast.jet(p, 2).h is not None
            # the general path would need third derivatives of the map
            with pytest.raises(ValueError, match="order 1"):
                slow.jet(p, 2)
