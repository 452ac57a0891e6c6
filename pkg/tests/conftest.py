import numpy as np
import pytest

from robinson.exprjet import Chart


@pytest.fixture
def uvxy():
    return Chart("mink", ("u", "v", "x", "y"), ((2, 3, "w"),))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


# --- shared metric constructions ---------------------------------------------------

from robinson.exprjet import parse
from robinson.fields import FormField, MetricField, covector_basis


def _forms(chart):
    P = lambda s: parse(s, chart)

    def T(*terms):
        return FormField.from_terms(chart, 1, [(covector_basis(chart, k), P(e) if isinstance(e, str) else e)
                                               for k, e in terms])
    return P, T


@pytest.fixture
def mink(uvxy):
    return MetricField.from_components(uvxy, [[0, .5, 0, 0], [.5, 0, 0, 0], [0, 0, 1, 0], [0, 0, 0, 1]])


@pytest.fixture
def robinson_flat(uvxy):
    P, T = _forms(uvxy)
    kappa = T(("u", 1), ("wbar", "i*w"), ("w", "-i*conj(w)"))
    return MetricField.from_products(uvxy, [(kappa, T(("v", 1))), (T(("w", "v^2+1")), T(("wbar", 1)))])


@pytest.fixture
def plane_wave(uvxy):
    def make(f):
        P, T = _forms(uvxy)
        return MetricField.from_products(uvxy, [(T(("u", f)), T(("u", 1))), (T(("u", 2)), T(("v", 1))),
                                                (T(("x", 1)), T(("x", 1))), (T(("y", 1)), T(("y", 1)))])
    return make


@pytest.fixture
def goedel():
    from robinson.exprjet import Chart
    c = Chart("goedel", ("U", "V", "X", "Y"))
    P = lambda s: parse(s, c)
    a = FormField.from_components(c, 1, {"U": P("Y"), "X": -1})
    b = FormField.from_components(c, 1, {"V": P("Y"), "X": -1})
    dX = FormField.from_components(c, 1, {"X": 1})
    dY = FormField.from_components(c, 1, {"Y": 1})
    g = MetricField.from_products(c, [(dX, dX), (dY, dY), (a * (-2.0), b)])
    return g.scaled(FormField.scalar(c, P("Y^-2")))


@pytest.fixture
def threecong(uvxy):
    P, T = _forms(uvxy)
    kappa = T(("u", 1), ("wbar", "i*w/2"), ("w", "-i*conj(w)/2"))
    lam = T(("v", 1), ("wbar", "-i*w/2"), ("w", "i*conj(w)/2"))
    mu = T(("w", "w+conj(w)"))
    return MetricField.from_products(uvxy, [(lam, kappa), (mu, mu.conj())])


@pytest.fixture
def schwarzschild():
    from robinson.exprjet import Chart
    c = Chart("schw", ("t", "r", "th", "ph"))
    P = lambda s: parse(s, c)
    return MetricField.from_components(c, [[P("-(1-2/r)"), 0, 0, 0], [0, P("1/(1-2/r)"), 0, 0],
                                           [0, 0, P("r^2"), 0], [0, 0, 0, P("r^2*sin(th)^2")]])


# --- acceptance summary ------------------------------------------------------------

ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.write_sep("=", "acceptance criteria")
        for _, line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
