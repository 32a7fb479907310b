import json
import math

import numpy as np
import pytest

from harris_ar import catalog as C
from harris_ar import dist_core as dc
from harris_ar import laws as L
from harris_ar import samplers as S
from harris_ar import verify as V
from harris_ar.errors import InvalidParameterError

ONE = dc.point_pgf(1)


def test_random_max_oracle_examples():
    U = C.resolve("uniform()").df
    x = np.linspace(0, 1, 11)
    assert np.allclose(V.random_max_df_oracle(ONE, U, x).values, x)
    params = dc.HarrisParams(2, 2)
    got = V.random_max_df_oracle(dc.harris_pgf(params), U, [0.5]).values[0]
    assert abs(got - 0.5 / math.sqrt(2 - 0.25)) < 1e-8
    assert abs(got - float(L.harris_max_df(params, U)(0.5))) < 1e-8
    assert np.allclose(V.random_max_df_oracle(dc.harris_pgf(params), U, [1.0, 2.0]).values, 1.0)


def test_random_sum_oracle_examples():
    out = V.random_sum_pmf_oracle(ONE, [0.2, 0.5, 0.3])
    assert np.allclose(out.values[:3], [0.2, 0.5, 0.3])
    geo = dc.harris_pgf(dc.HarrisParams(2, 1))
    pmf = V.random_sum_pmf_oracle(geo, [0, 1], n_max=20).values
    assert np.allclose(pmf[1:6], 0.5 ** np.arange(1, 6))
    with pytest.raises(InvalidParameterError):
        V.random_sum_pmf_oracle(ONE, [-0.1, 1.1])


def test_ks_statistic_simple():
    F = C.resolve("uniform()").df
    assert abs(V.ks_statistic([0.5] * 60, F) - 0.5) < 1e-12
    x = (np.arange(100) + 0.5) / 100
    assert abs(V.ks_statistic(x, F) - 0.005) < 1e-12


def test_ks_handles_atoms_and_bottom():
    law = C.resolve("poisson_mixture_max(phi=gamma_lt(k=2),a=1,G=uniform())")
    x = law.sampler.draw(S.RngStream(3), 20000)
    assert np.isneginf(x).any()
    assert V.ks_one_sample(x, law.df).passed
    assert not V.ks_one_sample(x, C.resolve("uniform()").df).passed


def test_ks_minimum_samples():
    with pytest.raises(InvalidParameterError):
        V.ks_one_sample(np.zeros(49), C.resolve("uniform()").df)


def test_ks_two_sample():
    g = S.RngStream(1).generator
    a, b = g.random(2000), g.random(3000)
    r = V.ks_two_sample(a, b)
    assert r.passed and abs(r.threshold - 1.63 * math.sqrt(5000 / 6e6)) < 1e-3
    assert not V.ks_two_sample(a, b + 0.2).passed


def test_chi_square_orientation():
    g = S.RngStream(2).generator
    counts = np.bincount(g.integers(0, 4, 10000), minlength=4)
    r = V.chi_square(counts, [0.25] * 4)
    assert r.passed and r.statistic >= r.threshold
    assert not V.chi_square(counts, [0.4, 0.2, 0.2, 0.2]).passed


def test_total_variation():
    assert V.total_variation([5, 5], [0.5, 0.5]) == 0
    assert abs(V.total_variation([10, 0], [0.5, 0.5]) - 0.5) < 1e-12


def test_empirical_cf():
    law = C.resolve("normal()")
    x = law.sampler.draw(S.RngStream(4), 10000)
    emp = V.empirical_cf(x, [0.0, 0.5, 1.0])
    assert emp.radius == pytest.approx(0.03)
    assert emp.values[0] == pytest.approx(1.0)
    assert np.max(np.abs(emp.values - law.cf(np.array([0.0, 0.5, 1.0])))) < emp.radius
    with pytest.raises(InvalidParameterError):
        V.empirical_cf(x[:999], [1.0])


def test_fixed_point_examples():
    grid = np.linspace(0.05, 5, 50)
    assert V.fixed_point_residual(1, 0.25, 1, "exponential(rate=1)", "exponential(rate=4)", grid).passed
    assert not V.fixed_point_residual(1, 0.25, 1, "exponential(rate=1)", "exponential(rate=2)", grid).passed
    r = V.fixed_point_residual(3, 0.5, 1, "exponential()", "geom_max_innovation(p=0.5,F=exponential())", grid)
    assert r.passed and r.threshold == 1e-10
    with pytest.raises(InvalidParameterError):
        V.fixed_point_residual(1, 0.5, 2, "exponential()", "exponential()", grid)


def test_lemma42_exact_distances():
    d = [V.lemma42_exact_distance(1, p) for p in (0.1, 0.01, 0.001)]
    assert d[0] > d[1] > d[2] and d[2] < 0.002
    d2 = [V.lemma42_exact_distance(2, p) for p in (0.1, 0.01, 0.001)]
    assert d2[0] > d2[1] > d2[2] > 0.02


def test_lemma42_single_p_reports_only():
    r = V.lemma42_convergence(1, [0.01], 5000, seed=1)
    assert r.passed and math.isinf(r.threshold)
    with pytest.raises(InvalidParameterError):
        V.lemma42_convergence(1, [0.01, 0.1], 5000)


def test_eq6_examples():
    grid = np.linspace(0.2, 10, 25)
    for k in (1, 2, 3):
        r = V.eq6_limit_check("frechet(alpha=1)", k, [0.1, 0.01, 0.001], grid)
        assert r.passed, r.statistic
        assert "leading factor p" in r.notes


def test_eq5_example():
    r = V.eq5_limit_check("gamma_lt(k=2)", np.linspace(0.05, 0.99, 30), [0.1, 0.01, 0.001])
    assert r.passed, r.notes


def test_result_json():
    r = V.TestResult("x", 0.1, math.inf, 10, True, 3, "n")
    d = json.loads(r.to_json())
    assert list(d) == ["test_id", "statistic", "threshold", "n_samples", "pass", "seed", "notes"]
    assert d["threshold"] == "inf" and d["pass"] is True
