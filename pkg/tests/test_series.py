import numpy as np
from hypothesis import given
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from harris_ar.series import TruncatedSeries

coef_arrays = st.integers(1, 32).flatmap(
    lambda n: arrays(np.float64, n, elements=st.floats(-10, 10, allow_nan=False))
)


@given(coef_arrays, coef_arrays)
def test_product_is_convolution(a, b):
    n = min(a.size, b.size) - 1
    got = (TruncatedSeries(a) * TruncatedSeries(b)).coefficients
    want = np.convolve(a[: n + 1], b[: n + 1])[: n + 1]
    scale = np.convolve(np.abs(a[: n + 1]), np.abs(b[: n + 1]))[: n + 1] + 1e-300
    assert np.all(np.abs(got - want) <= 1e-14 * scale)


def test_power_matches_binomial_series():
    # (1 - x)^(-1/2) = sum C(2n, n) / 4^n x^n
    s = TruncatedSeries([1.0, -1.0] + [0.0] * 8).power(-0.5)
    from scipy.special import comb

    want = [comb(2 * n, n) / 4**n for n in range(10)]
    assert np.allclose(s.coefficients, want, rtol=1e-14)


def test_power_inverts():
    c = TruncatedSeries([2.0, 0.3, -0.1, 0.5, 0.0, 0.2])
    back = c.power(1 / 3).power(3.0)
    assert np.allclose(back.coefficients, c.coefficients, atol=1e-13)


def test_compose_power_and_shift():
    c = TruncatedSeries([1.0, 2.0, 3.0, 0.0, 0.0, 0.0, 0.0])
    assert c.compose_power(2).coefficients.tolist() == [1, 0, 2, 0, 3, 0, 0]
    assert c.shift(1).coefficients.tolist() == [0, 1, 2, 3, 0, 0, 0]


@given(arrays(np.float64, 6, elements=st.floats(-1, 1)), st.floats(0.0, 1.0))
def test_compose_agrees_with_evaluation(inner_c, x):
    outer = TruncatedSeries([0.5, 0.25, 0.125, 0.0625, 0.0, 0.0])
    inner_c = inner_c.copy()
    inner_c[0] = 0.0  # keep the composition exact at this order
    inner_c[2:] = 0.0
    inner = TruncatedSeries(inner_c)
    comp = outer.compose(inner)
    # inner linear, outer cubic: the composition is a degree-3 polynomial, exact in 6 terms
    assert abs(comp.evaluate(x) - outer.evaluate(inner.evaluate(x))) < 1e-12


def test_total_and_mean():
    s = TruncatedSeries([0.0, 0.5, 0.25, 0.25])
    assert s.total() == 1.0
    assert s.mean() == 0.5 + 0.5 + 0.75
