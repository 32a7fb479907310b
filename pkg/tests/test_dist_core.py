import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from harris_ar import dist_core as dc
from harris_ar.errors import DomainError, InvalidParameterError, InvalidPGFError, UnsupportedError

H22 = dc.HarrisParams(2.0, 2)


def test_gamma_lt_values_and_inverse():
    assert dc.gamma_lt(1)(0.0) == 1.0
    assert dc.gamma_lt(1)(1.0) == 0.5
    assert dc.gamma_lt(2)(3.0) == 0.5
    s = np.linspace(0, 50, 128)
    for k in (1, 2, 3):
        phi = dc.gamma_lt(k)
        assert np.all(np.diff(phi(s)) < 0)
        assert np.max(np.abs(phi.inv(phi(s)) - s)) < 1e-10
        # the stated form (1 - s^k) / s^k is the same map
        v = np.linspace(0.05, 1, 50)
        assert np.allclose(phi.inv(v), (1 - v**k) / v**k)


def test_gamma_lt_rejects_bad_k():
    with pytest.raises(InvalidParameterError):
        dc.gamma_lt(0)


@pytest.mark.parametrize("k, mean", [(1, 1.0), (2, 0.5), (3, 1 / 3)])
def test_lt_mean(k, mean):
    assert abs(dc.gamma_lt(k).mean() - mean) < 1e-7


def test_harris_params():
    h = dc.HarrisParams(4.0, 2)
    assert h.p == 0.25
    assert math.isclose(h.theta, 1 / 3)
    with pytest.raises(InvalidParameterError):
        dc.HarrisParams(1.0, 1)
    with pytest.raises(InvalidParameterError):
        dc.HarrisParams(2.0, 1.5)


def test_harris_pgf_values():
    assert math.isclose(dc.harris_pgf(dc.HarrisParams(2, 1))(0.5), 1 / 3)
    assert math.isclose(dc.harris_pgf(H22)(0.5), 0.5 / math.sqrt(1.75))
    assert dc.harris_pgf(dc.HarrisParams(7.3, 3))(1.0) == 1.0
    with pytest.raises(DomainError):
        dc.harris_pgf(H22)(1.5)


def test_harris_pgf_convex_nondecreasing(grid01):
    for a in (1.5, 4.0):
        for k in (1, 2, 3):
            v = dc.harris_pgf(dc.HarrisParams(a, k))(grid01)
            assert np.all(np.diff(v) >= 0)
            assert np.all(np.diff(v, 2) >= -1e-15)


def test_semigroup_examples():
    s = 0.5
    assert math.isclose(dc.semigroup_pgf(dc.gamma_lt(1), 0.5)(s), 1 / 3)
    assert math.isclose(dc.semigroup_pgf(dc.gamma_lt(2), 0.5)(s), 0.5 / math.sqrt(1.75))
    grid = np.linspace(0.01, 1, 128)
    for phi in (dc.gamma_lt(1), dc.gamma_lt(3), dc.exp_lt(2.0)):
        assert np.allclose(dc.semigroup_pgf(phi, 1.0)(grid), grid, atol=1e-13)
    with pytest.raises(InvalidParameterError):
        dc.semigroup_pgf(dc.gamma_lt(1), 0.0)


@pytest.mark.parametrize("k", [1, 2, 3])
@pytest.mark.parametrize("p", [0.1, 0.25, 0.5, 0.9])
def test_semigroup_is_harris(p, k):
    s = np.linspace(0, 1, 128)
    diff = dc.semigroup_pgf(dc.gamma_lt(k), p)(s) - dc.harris_pgf(dc.HarrisParams(1 / p, k))(s)
    assert np.max(np.abs(diff)) < 1e-12


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99), st.integers(1, 3))
def test_semigroup_law(t1, t2, k):
    phi = dc.gamma_lt(k)
    s = np.linspace(0.01, 1.0, 128)
    lhs = dc.semigroup_pgf(phi, t1)(dc.semigroup_pgf(phi, t2)(s))
    rhs = dc.semigroup_pgf(phi, t1 * t2)(s)
    assert np.max(np.abs(lhs - rhs)) < 1e-10


def test_semigroup_theta_above_one_is_not_a_pgf():
    pgf = dc.semigroup_pgf(dc.gamma_lt(2), 2.0)
    with pytest.raises(InvalidPGFError):
        dc.pgf_coefficients(pgf, 10)
    cert = dc.certify_pgf(pgf, 10)
    assert not cert.valid and cert.min_coefficient < 0


def test_lemma41_examples():
    assert math.isclose(dc.lemma41_pgf(dc.gamma_lt(1), 1.0, 1, 1)(0.5), 1 / 3)
    assert math.isclose(dc.lemma41_pgf(dc.gamma_lt(2), 1.0, 1, 2)(0.5), 0.5 / math.sqrt(1.75))
    assert dc.lemma41_pgf(dc.exp_lt(), 0.3, 0, 1)(1.0) == 1.0


@given(st.floats(0.05, 5.0), st.integers(1, 3))
def test_lemma41_gamma_is_harris(theta, k):
    s = np.linspace(0, 1, 128)
    lhs = dc.lemma41_pgf(dc.gamma_lt(k), theta, 1, k)(s)
    rhs = dc.harris_pgf(dc.HarrisParams((theta + 1) / theta, k))(s)
    assert np.max(np.abs(lhs - rhs)) < 1e-12
    c1 = dc.pgf_coefficients(dc.lemma41_pgf(dc.gamma_lt(k), theta, 1, k), 40).coefficients
    c2 = dc.pgf_coefficients(dc.harris_pgf(dc.HarrisParams((theta + 1) / theta, k)), 40).coefficients
    assert np.max(np.abs(c1 - c2)) < 1e-12


@pytest.mark.parametrize("j, k, theta", [(0, 1, 0.5), (2, 3, 1.5), (1, 2, 0.1)])
def test_lemma41_exp_lt_series_certified(j, k, theta):
    pgf = dc.lemma41_pgf(dc.exp_lt(1.0), theta, j, k)
    cert = dc.certify_pgf(pgf, 150)
    assert cert.valid
    c = dc.pgf_coefficients(pgf, 150)
    s = np.linspace(0, 0.9, 20)
    assert np.max(np.abs(c.evaluate(s) - pgf(s))) < 1e-10


def test_harris_coefficients():
    c = dc.pgf_coefficients(dc.harris_pgf(H22), 6).coefficients
    assert np.allclose(c, [0, 0.70710678, 0, 0.1767767, 0, 0.06629126, 0], atol=1e-8)
    g = dc.pgf_coefficients(dc.harris_pgf(dc.HarrisParams(2, 1)), 4).coefficients
    assert np.allclose(g[1:], 0.5 ** np.arange(1, 5), atol=1e-15)
    assert math.isclose(dc.pgf_coefficients(dc.harris_pgf(dc.HarrisParams(4, 2)), 1)[1], 0.5)


def test_harris_coefficients_cross_check():
    pgf = dc.harris_pgf(H22)
    exact = dc.pgf_coefficients(pgf, 12).coefficients
    assert np.max(np.abs(exact - dc.contour_coefficients(pgf, 12))) < 1e-12
    # real-line differencing is only a rough check
    approx = dc.finite_difference_coefficients(pgf, 6)
    assert np.max(np.abs(exact[:7] - approx)) < 5e-3


def _generic(func):
    return dc.ProbGenFnObj(func, 1, dc.D.make("generic"))


def test_generic_extraction_limited_to_order_12():
    generic = _generic(lambda s: (s**2 + s**3) / 2)
    assert np.allclose(dc.pgf_coefficients(generic, 12).coefficients[:5], [0, 0, 0.5, 0.5, 0], atol=1e-12)
    with pytest.raises(UnsupportedError):
        dc.pgf_coefficients(generic, 13)


def test_generic_extraction_falls_back_to_differencing():
    # real-only evaluation: math.exp rejects complex input
    generic = _generic(lambda s: np.array([math.exp(v - 1) for v in np.atleast_1d(s)]))
    assert dc.contour_coefficients(generic, 4) is None
    c = dc.pgf_coefficients(generic, 4).coefficients
    want = [math.exp(-1) / math.factorial(n) for n in range(5)]
    assert np.max(np.abs(c - want)) < 5e-3


def test_branch_point_is_not_expanded():
    # s**2.5 has no power series at 0
    assert dc.contour_coefficients(_generic(lambda s: s**2.5), 6) is None


@pytest.mark.parametrize("a", [1.5, 2.0, 5.0])
@pytest.mark.parametrize("k", [1, 2, 3])
def test_harris_support_and_mean(a, k):
    series = dc.coefficients_to_mass(dc.harris_pgf(dc.HarrisParams(a, k)), 1 - 1e-12)
    c = series.coefficients
    off = np.ones(c.size, bool)
    off[1::k] = False
    assert np.all(np.abs(c[off]) < 1e-12)
    assert abs(series.mean() - a) < 1e-6 * a + 1e-9 * c.size
    pgf = dc.harris_pgf(dc.HarrisParams(a, k))
    h = 1e-6
    assert abs((1 - pgf(1 - h)) / h - a) < 1e-4 * a**2


def test_harris_mean_by_hand_derivative():
    # d/ds log P = 1/s + (a-1) s^(k-1) / (a - (a-1) s^k), which is a at s = 1
    for a, k in [(2, 1), (3, 2), (10, 3)]:
        P = dc.harris_pgf(dc.HarrisParams(a, k))
        h = 1e-5
        d = (P(1.0) - P(1 - 2 * h)) / (2 * h)  # centred at 1 - h
        slope = 1 / (1 - h) + (a - 1) * (1 - h) ** (k - 1) / (a - (a - 1) * (1 - h) ** k)
        assert abs(d - P(1 - h) * slope) < 1e-4
