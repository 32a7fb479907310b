import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from harris_ar import ar_sim as A
from harris_ar import catalog as C
from harris_ar import verify as V
from harris_ar.errors import ConfigError, UnsupportedError


def cfg(**kw):
    base = dict(model=1, p=0.3, n_steps=50, n_replicates=3, seed=7)
    base.update(kw)
    return A.ModelConfig(**base)


@pytest.mark.parametrize(
    "kw, key",
    [
        (dict(model=5), "model"),
        (dict(p=0.0), "p"),
        (dict(p=1.0), "p"),
        (dict(model=1, k=2), "k"),
        (dict(model=2, k=0), "k"),
        (dict(n_steps=0), "n_steps"),
        (dict(n_replicates=0), "n_replicates"),
        (dict(seed=-1), "seed"),
        (dict(innovation="nope()"), "innovation"),
        (dict(initial="exponential(rate=-1)"), "initial"),
    ],
)
def test_config_errors_name_the_key(kw, key):
    with pytest.raises(ConfigError) as err:
        cfg(**kw)
    assert err.value.key == key


def test_from_mapping():
    c = A.ModelConfig.from_mapping({"model": "2", "p": "0.25", "k": "3", "innovation": "gamma(shape=1,scale=1)"})
    assert (c.model, c.p, c.k) == (2, 0.25, 3)
    assert A.ModelConfig.from_mapping(c.as_mapping()) == c
    with pytest.raises(ConfigError) as err:
        A.ModelConfig.from_mapping({"model": "1", "p": "0.5", "colour": "red"})
    assert err.value.key == "colour"
    with pytest.raises(ConfigError) as err:
        A.ModelConfig.from_mapping({"model": "1"})
    assert err.value.key == "p"
    with pytest.raises(ConfigError) as err:
        A.ModelConfig.from_mapping({"model": "one", "p": "0.5"})
    assert err.value.key == "model"


def test_burn_in_defaults():
    assert cfg().effective_burn_in == 0
    assert cfg(initial="exponential()").effective_burn_in == 100
    assert cfg(initial="exponential()", burn_in=3).effective_burn_in == 3


def test_shapes_and_bookkeeping():
    trajs = A.simulate(cfg(model=4, k=3, n_steps=20))
    assert len(trajs) == 3
    t = trajs[0]
    assert t.values.shape == (20,) and t.components.shape == (3, 20)
    assert t.selector[0] == -1 and math.isnan(t.innovations[0])
    assert np.allclose(t.innovations[1:], t.components[:, 1:].max(axis=0))
    t2 = A.simulate(cfg(model=2, k=2, innovation="gamma(shape=0.5,scale=1)"))[0]
    assert np.allclose(t2.innovations[1:], t2.components[:, 1:].sum(axis=0))
    assert A.simulate(cfg(model=3))[0].components is None


@pytest.mark.parametrize("model,k", [(1, 1), (2, 2), (3, 1), (4, 3)])
def test_recursion_and_replay(model, k):
    t = A.simulate(cfg(model=model, k=k, n_steps=200))[1]
    op = np.add if model in (1, 2) else np.maximum
    for n in range(1, t.n_steps):
        expect = t.innovations[n] if t.selector[n] == 1 else op(t.values[n - 1], t.innovations[n])
        assert t.values[n] == expect
    assert np.array_equal(A.replay(model, t.values[0], t.selector, t.innovations), t.values)
    if model in (3, 4):
        rep = t.selector == 1
        assert np.all(t.values[1:][~rep[1:]] >= t.values[:-1][~rep[1:]])


def test_near_one_boundary():
    t = A.simulate(cfg(p=1 - 1e-12, n_steps=500))[0]
    assert np.all(t.selector[1:] == 1)
    assert np.array_equal(t.values[1:], t.innovations[1:])


def test_determinism_and_seed_sensitivity():
    a = A.simulate(cfg(model=4, k=2))
    b = A.simulate(cfg(model=4, k=2))
    c = A.simulate(cfg(model=4, k=2, seed=8))
    assert all(np.array_equal(x.values, y.values) for x, y in zip(a, b))
    assert not np.array_equal(a[0].values, c[0].values)
    # replicate r only depends on its own streams
    more = A.simulate(cfg(model=4, k=2, n_replicates=5))
    assert np.array_equal(more[2].values, a[2].values)


def test_selector_frequency():
    t = A.simulate(cfg(p=0.3, n_steps=100_000, n_replicates=1))[0]
    assert abs(t.selector[1:].mean() - 0.3) < 0.005


def test_stationary_innovation_closed_forms():
    c1 = cfg(model=1, p=0.25)
    assert A.stationary_innovation(c1, "exponential(rate=1)") == "exponential(rate=4.0)"
    c3 = cfg(model=3, p=0.5)
    eps = C.resolve(A.stationary_innovation(c3, "exponential()"))
    assert abs(float(eps.df(math.log(2))) - 2 / 3) < 1e-12
    c4 = cfg(model=4, p=0.4, k=2)
    out = A.stationary_innovation(c4, "harris_max_id(H=frechet(alpha=1),k=2)")
    assert out == str(C.resolve("harris_max_id(H=power(F=frechet(alpha=1),e=0.4),k=2)").descriptor)
    c2 = cfg(model=2, p=0.5, k=2)
    assert A.stationary_innovation(c2, "gamma(shape=0.5,scale=2)") == "gamma(shape=0.5,scale=1.0)"
    with pytest.raises(UnsupportedError):
        A.stationary_innovation(c2, "uniform()")


@settings(max_examples=25, deadline=None)
@given(st.floats(0.05, 0.95), st.sampled_from([1, 2, 3]))
def test_stationary_innovation_fixed_point(p, k):
    target = f"harris_max_id(H=gumbel(),k={k})"
    c = cfg(model=4, p=p, k=k)
    eps = A.stationary_innovation(c, target)
    r = V.fixed_point_residual(4, p, k, target, eps, np.linspace(-2, 5, 41))
    assert r.passed, r.statistic


def test_per_component_decomposition():
    c4 = cfg(model=4, k=3)
    comp = A.per_component_decomposition(c4, "exponential()")
    x = np.linspace(0.1, 4, 9)
    assert np.allclose(np.asarray(comp.df(x)) ** 3, C.resolve("exponential()").df(x))
    c2 = cfg(model=2, k=2, innovation="gamma(shape=1,scale=1)")
    comp = A.per_component_decomposition(c2, "gamma(shape=2,scale=3)")
    assert str(comp.descriptor) in ("gamma(shape=1.0,scale=3.0)", "exponential(rate=0.3333333333333333)")
    one = A.per_component_decomposition(cfg(model=2, k=1), "normal()")
    assert str(one.descriptor) == str(C.resolve("normal()").descriptor)
    with pytest.raises(UnsupportedError):
        A.per_component_decomposition(cfg(model=1), "normal()")


def test_csv_round_trip_with_bottom():
    trajs = A.simulate(cfg(model=4, k=2, innovation="poisson_mixture_max(phi=gamma_lt(k=2),a=1,G=uniform())"))
    assert any(np.isneginf(t.values).any() for t in trajs)
    text = A.trajectories_to_csv(trajs, 2)
    back = A.trajectories_from_csv(text)
    for a, b in zip(trajs, back):
        assert np.array_equal(a.values, b.values)
        assert np.array_equal(a.selector, b.selector)
        assert np.array_equal(a.components[:, 1:], b.components[:, 1:])
    assert A.trajectories_to_csv(back, 2) == text


def test_stationary_marginal_model1():
    c = A.ModelConfig(model=1, p=0.3, innovation="exponential(rate=2)", n_steps=60, n_replicates=2000, seed=3)
    x = A.pooled_at(A.simulate(c), 59)
    assert V.ks_one_sample(x, C.resolve("exponential(rate=0.6)").df).passed


def test_stationary_aggregate_df_model4():
    c = A.ModelConfig(model=4, p=0.4, k=3, innovation="exponential()", n_steps=30, n_replicates=5000, seed=1)
    x = A.pooled_at(A.simulate(c), 29)
    assert V.ks_one_sample(x, A.stationary_aggregate_df(c)).passed
