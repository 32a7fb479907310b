"""Named verification suites.

A check is a function ``(seed, quick) -> list[TestResult]``.  Suites run
their checks concurrently and return results in registration order, so a
report depends only on (suite, seed, quick).
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import ar_sim as A
from . import catalog as C
from . import dist_core as dc
from . import laws as L
from . import samplers as S
from . import verify as V
from .errors import InvalidParameterError
from .verify import TestResult

Check = Callable[[int, bool], list]


def derive_seed(seed: int, *keys: int) -> int:
    """Independent 64-bit seed for a sub-experiment keyed by ``keys``."""
    state = np.random.SeedSequence([int(seed), *map(int, keys)]).generate_state(2, np.uint32)
    return int(state[0]) | (int(state[1]) << 32)


# -- identities --------------------------------------------------------------


def semigroup_identity(seed: int = 0, quick: bool = False) -> list[TestResult]:
    s = np.linspace(0.0, 1.0, 128)
    out = []
    for k in (1, 2, 3):
        for p in (0.1, 0.25, 0.5, 0.9):
            lhs = dc.semigroup_pgf(dc.gamma_lt(k), p)(s)
            rhs = dc.harris_pgf(dc.HarrisParams(1.0 / p, k))(s)
            out.append(V._le(f"semigroup_identity:p={p}:k={k}", np.max(np.abs(lhs - rhs)), 1e-12, s.size))
    return out


HARRIS_22_PMF = {1: 0.707107, 3: 0.176777, 5: 0.066291}


def harris_pmf_values(seed: int = 0, quick: bool = False) -> list[TestResult]:
    c = dc.pgf_coefficients(dc.harris_pgf(dc.HarrisParams(2.0, 2)), 5).coefficients
    err = max(abs(c[n] - v) for n, v in HARRIS_22_PMF.items())
    return [V._le("harris_pmf:a=2:k=2", err, 1e-6, 6, notes=f"coefficients={c.tolist()}")]


def _fixed_point_cases():
    H = "frechet(alpha=1)"
    xs = np.linspace(0.01, 20.0, 400)
    ts = np.linspace(-15.0, 15.0, 401)
    cases = [
        (1, 0.5, 1, "exponential()", ts),
        (1, 0.2, 1, "exponential(rate=3)", ts),
        (2, 0.5, 2, "gamma(shape=0.5,scale=1)", ts),
        (2, 0.3, 3, "gamma(shape=0.3333333333333333,scale=2)", ts),
        (2, 0.4, 2, "harris_id(h=normal(),k=2)", ts),
        (2, 0.25, 2, "gamma_id(h=poisson(lam=1),k=2)", ts),
        (3, 0.5, 1, "exponential()", xs),
        (3, 0.1, 1, "gumbel()", np.linspace(-5, 20, 400)),
        (3, 0.5, 1, "geom_max_id(H=frechet(alpha=2))", xs),
        (4, 0.5, 2, f"harris_max_id(H={H},k=2)", xs),
        (4, 0.2, 3, f"harris_max_id(H={H},k=3)", xs),
        (4, 0.3, 2, f"gamma_max_id(H={H},k=2)", xs),
        (4, 0.5, 2, "exponential()", xs),
        (4, 0.7, 3, "uniform()", np.linspace(0.0, 1.0, 201)),
    ]
    return cases


def fixed_points(seed: int = 0, quick: bool = False) -> list[TestResult]:
    out = []
    for model, p, k, target, grid in _fixed_point_cases():
        cfg = A.ModelConfig(model=model, p=p, k=k)
        innovation = A.stationary_innovation(cfg, target)
        out.append(V.fixed_point_residual(model, p, k, target, innovation, grid))
    return out


def eq6(seed: int = 0, quick: bool = False) -> list[TestResult]:
    grid = np.linspace(0.01, 50.0, 500)
    return [
        V.eq6_limit_check("frechet(alpha=1)", k, [0.1, 0.01, 0.001], grid)
        for k in (1, 2, 3)
    ]


# -- stationarity ------------------------------------------------------------


@dataclass(frozen=True)
class StationarityCase:
    name: str
    config: A.ModelConfig
    target: object  # d.f. of the aggregate at every time


def stationarity_cases(n_replicates: int = 200, n_steps: int = 1001) -> list[StationarityCase]:
    base = dict(n_steps=n_steps, n_replicates=n_replicates)
    m1 = A.ModelConfig(model=1, p=0.5, innovation="exponential(rate=2)", **base)

    m3 = A.ModelConfig(model=3, p=0.5, **base)
    inn3 = A.stationary_innovation(m3, "exponential()")
    m3 = A.ModelConfig(model=3, p=0.5, innovation=f"bisect(F={inn3},lo=0,hi=60)", **base)

    target4 = "harris_max_id(H=frechet(alpha=1),k=2)"
    m4 = A.ModelConfig(model=4, p=0.5, k=2, **base)
    m4 = A.ModelConfig(model=4, p=0.5, k=2, innovation=A.stationary_innovation(m4, target4), **base)
    return [
        StationarityCase("model1", m1, C.resolve("exponential()").df),
        StationarityCase("model3", m3, C.resolve("exponential()").df),
        StationarityCase("model4", m4, A.stationary_aggregate_df(m4)),
    ]


STATIONARITY_TIMES = (100, 500, 1000)


def stationarity_runs(case: StationarityCase, seed: int, n_runs: int, case_index: int = 0) -> dict[int, int]:
    """Number of passing runs at each probe time."""
    passes = {t: 0 for t in STATIONARITY_TIMES}
    for run in range(n_runs):
        cfg = A.ModelConfig(**{**case.config.__dict__, "seed": derive_seed(seed, 5, case_index, run)})
        trajs = A.simulate(cfg)
        for t in STATIONARITY_TIMES:
            if V.ks_one_sample(A.pooled_at(trajs, t), case.target).passed:
                passes[t] += 1
    return passes


def stationarity(seed: int = 0, quick: bool = False) -> list[TestResult]:
    n_runs = 25 if quick else 100
    required = math.ceil(0.96 * n_runs)
    out = []
    for i, case in enumerate(stationarity_cases()):
        passes = stationarity_runs(case, seed, n_runs, i)
        for t in STATIONARITY_TIMES:
            fails = n_runs - passes[t]
            out.append(
                V._le(
                    f"stationarity:{case.name}:n={t}",
                    fails,
                    n_runs - required,
                    n_runs * case.config.n_replicates,
                    seed,
                    f"{passes[t]}/{n_runs} runs pass KS(0.01) at n={t}; config={case.config.as_mapping()}",
                )
            )
    return out


def harris_max_marginal(seed: int = 0, quick: bool = False) -> list[TestResult]:
    """Model 4 marginal against the Harris-maximum law at 2e4 pooled points."""
    n_rep = 5000 if quick else 20000
    cfg = A.ModelConfig(
        model=4, p=0.4, k=3, innovation="exponential()", n_steps=51, n_replicates=n_rep,
        seed=derive_seed(seed, 6),
    )
    x = A.pooled_at(A.simulate(cfg), 50)
    D = V.ks_statistic(x, A.stationary_aggregate_df(cfg))
    return [V._le("harris_max_marginal:model4", D, 0.02, n_rep, seed, "KS distance, threshold 0.02")]


def selector_independence(seed: int = 0, quick: bool = False) -> list[TestResult]:
    cfg = A.ModelConfig(model=1, p=0.5, innovation="exponential()", n_steps=10**5 + 1, seed=derive_seed(seed, 7))
    tr = A.simulate(cfg)[0]
    r = float(np.corrcoef(tr.selector[1:].astype(float), tr.innovations[1:])[0, 1])
    return [V._le("selector_independence", abs(r), 0.01, 10**5, seed, f"correlation={r:.5f}")]


# -- limits ------------------------------------------------------------------


def lemma42(seed: int = 0, quick: bool = False) -> list[TestResult]:
    return [V.lemma42_convergence(k, [0.1, 0.01, 0.001], 10**5, derive_seed(seed, 8, k)) for k in (1, 2)]


def eq5(seed: int = 0, quick: bool = False) -> list[TestResult]:
    F = np.linspace(0.05, 0.99, 95)
    thetas = [1e-2, 1e-3, 1e-4]
    return [V.eq5_limit_check(phi, F, thetas) for phi in ("gamma_lt(k=1)", "gamma_lt(k=2)", "exp_lt(c=1)")]


# -- samplers ----------------------------------------------------------------


def harris_sampler_tv(seed: int = 0, quick: bool = False) -> list[TestResult]:
    n = 10**5 if quick else 10**6
    params = dc.HarrisParams(2.0, 2)
    draws = S.sample_harris(params).draw(S.RngStream(derive_seed(seed, 9)), n)
    probs = dc.coefficients_to_mass(dc.harris_pgf(params)).coefficients
    tv = V.total_variation(np.bincount(draws), probs)
    return [V._le("harris_sampler_tv:a=2:k=2", tv, 0.005, n, seed)]


HARRIS_MATRIX = [(a, k) for a in (1.5, 2.0, 5.0, 10.0) for k in (1, 2, 3)]


def harris_mean(seed: int = 0, quick: bool = False) -> list[TestResult]:
    n = 10**5
    out = []
    for i, (a, k) in enumerate(HARRIS_MATRIX):
        x = S.sample_harris(dc.HarrisParams(a, k)).draw(S.RngStream(derive_seed(seed, 10, i)), n)
        se = x.std(ddof=1) / math.sqrt(n)
        z = abs(x.mean() - a) / se
        out.append(V._le(f"harris_mean:a={a}:k={k}", z, 3.0, n, seed, f"mean={x.mean():.5f} se={se:.5f}"))
    return out


def poisson_mixture(seed: int = 0, quick: bool = False) -> list[TestResult]:
    n = 10**5
    law = C.resolve("poisson_mixture_max(phi=gamma_lt(k=2),a=1,G=uniform())")
    x = law.sampler.draw(S.RngStream(derive_seed(seed, 11)), n)
    D = V.ks_statistic(x, law.df)
    atom = float(np.mean(np.isneginf(x)))
    expected = float(law.df(-np.inf))
    return [
        V._le("poisson_mixture_max:ks", D, 0.01, n, seed, str(law.descriptor)),
        V._le("poisson_mixture_max:atom", abs(atom - expected), 0.01, n, seed, f"empirical={atom:.5f} phi(a)={expected:.5f}"),
    ]


TRIANGLE_MATRIX = [(a, k) for a in (2.0, 5.0) for k in (1, 2, 3)]


def oracle_triangle(seed: int = 0, quick: bool = False) -> list[TestResult]:
    n = 2 * 10**4 if quick else 10**5
    F = C.resolve("exponential()").df
    grid = np.linspace(0.0, 15.0, 301)
    out = []
    for i, (a, k) in enumerate(TRIANGLE_MATRIX):
        params = dc.HarrisParams(a, k)
        pgf = dc.harris_pgf(params)
        closed = L.harris_max_df(params, F)
        oracle = V.random_max_df_oracle(pgf, F, grid)
        gap = float(np.max(np.abs(oracle.values - closed(grid)))) + oracle.tail_bound
        out.append(V._le(f"oracle_vs_closed:a={a}:k={k}", gap, 1e-8, grid.size, notes=f"tail={oracle.tail_bound:.2e}"))

        x = S.sample_random_max(S.sample_harris(params), C.resolve("exponential()").sampler).draw(
            S.RngStream(derive_seed(seed, 12, i)), n
        )
        series = dc.coefficients_to_mass(pgf)
        oracle_df = dc.DistFnObj(lambda v, s=series: s.evaluate(np.clip(F(v), 0, 1)), closed.descriptor, lower=0.0)
        out.append(V._le(f"mc_vs_oracle:a={a}:k={k}", V.ks_statistic(x, oracle_df), 0.01, n, seed))
        out.append(V._le(f"mc_vs_closed:a={a}:k={k}", V.ks_statistic(x, closed), 0.01, n, seed))
    return out


def ks_calibration(seed: int = 0, quick: bool = False) -> list[TestResult]:
    runs = 100
    n = 2000 if quick else 10**4
    law = C.resolve("gamma(shape=2,scale=1)")
    rejects = 0
    for r in range(runs):
        x = law.sampler.draw(S.RngStream(derive_seed(seed, 13), r), n)
        rejects += not V.ks_one_sample(x, law.df).passed
    return [V._le("ks_calibration", rejects, 3, runs * n, seed, f"{rejects}/{runs} null rejections at alpha=0.01")]


SUITES: dict[str, list[Check]] = {
    "identities": [semigroup_identity, harris_pmf_values, fixed_points, eq6],
    "stationarity": [stationarity, harris_max_marginal, selector_independence],
    "limits": [lemma42, eq6, eq5],
    "samplers": [harris_sampler_tv, harris_mean, poisson_mixture, oracle_triangle, ks_calibration],
}
SUITE_NAMES = tuple(SUITES) + ("all",)


def checks_for(name: str) -> list[Check]:
    if name == "all":
        seen, out = set(), []
        for checks in SUITES.values():
            for c in checks:
                if c not in seen:
                    seen.add(c)
                    out.append(c)
        return out
    if name not in SUITES:
        raise InvalidParameterError(f"unknown suite {name!r}; choose from {', '.join(SUITE_NAMES)}")
    return SUITES[name]


def run_suite(name: str, seed: int = 0, quick: bool = False, workers: int = 1) -> list[TestResult]:
    checks = checks_for(name)
    if workers <= 1:
        batches = [c(seed, quick) for c in checks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            batches = list(pool.map(lambda c: c(seed, quick), checks))
    return [r for batch in batches for r in batch]
