"""Law catalog: every descriptor tag resolves to a :class:`Law`.

A Law bundles whatever representations are available for one distribution
(d.f., CF, PGF, LT, sampler).  ``resolve("harris_max_id(H=frechet(),k=2)")``
builds the constructor from :mod:`harris_ar.laws` together with an exact
sampler.  ID laws in the catalog also carry ``levy`` (draw X_t with CF
h**t at random times t) and ``id_power`` (descriptor of the law with CF
h**e), which the Harris-ID samplers and the AR innovation closures use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Optional

import numpy as np
from scipy import special

from . import descriptors as D
from . import dist_core as dc
from . import laws as L
from . import samplers as S
from .errors import DescriptorError, InvalidParameterError, UnsupportedError


@dataclass(frozen=True, eq=False)
class Law:
    descriptor: D.Descriptor
    df: Optional[dc.DistFnObj] = None
    cf: Optional[dc.CharFnObj] = None
    pgf: Optional[dc.ProbGenFnObj] = None
    lt: Optional[dc.LaplaceTransformObj] = None
    sampler: Optional[S.SamplerObj] = None
    pmf: Optional[Callable[[int], np.ndarray]] = None
    levy: Optional[Callable[[np.random.Generator, np.ndarray], np.ndarray]] = None
    id_power: Optional[Callable[[float], D.Descriptor]] = None

    def need(self, attr: str):
        value = getattr(self, attr)
        if value is None:
            raise UnsupportedError(f"{self.descriptor} has no {attr}")
        return value

    def __str__(self):
        return str(self.descriptor)


_REQUIRED = object()
_BUILDERS: dict[str, tuple[Callable, dict]] = {}


def register(tag: str, **defaults):
    def deco(fn):
        _BUILDERS[tag] = (fn, defaults)
        return fn

    return deco


def known_tags() -> list[str]:
    return sorted(_BUILDERS)


def resolve(desc) -> Law:
    """Resolve a descriptor (string or Descriptor) to a Law."""
    if isinstance(desc, Law):
        return desc
    d = D.parse(desc)
    if d.tag not in _BUILDERS:
        raise DescriptorError(f"unknown law {d.tag!r}")
    builder, defaults = _BUILDERS[d.tag]
    given = d.as_dict()
    unknown = set(given) - set(defaults)
    if unknown:
        raise DescriptorError(f"{d.tag}: unknown parameter(s) {sorted(unknown)}")
    params = {}
    printed = {}
    for name, default in defaults.items():
        value = given.get(name, default)
        if value is _REQUIRED:
            raise DescriptorError(f"{d.tag}: missing parameter {name!r}")
        if isinstance(value, D.Descriptor):
            value = resolve(value)
            printed[name] = value.descriptor
        else:
            printed[name] = value
        params[name] = value
    canonical = D.make(d.tag, **printed)
    try:
        law = builder(**params)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, DescriptorError):
            raise
        raise DescriptorError(f"{canonical}: {exc}") from exc
    return replace(law, descriptor=canonical)


def _num(x, name) -> float:
    if isinstance(x, Law) or isinstance(x, str):
        raise InvalidParameterError(f"parameter {name} must be numeric, got {x}")
    return float(x)


def _int(x, name) -> int:
    v = _num(x, name)
    if not v.is_integer():
        raise InvalidParameterError(f"parameter {name} must be an integer, got {x}")
    return int(v)


def _law(x, name) -> Law:
    if not isinstance(x, Law):
        raise InvalidParameterError(f"parameter {name} must be a law descriptor, got {x!r}")
    return x


def _positive(x, name) -> float:
    v = _num(x, name)
    if not v > 0:
        raise InvalidParameterError(f"parameter {name} must be > 0, got {x}")
    return v


def _prob(x, name) -> float:
    v = _num(x, name)
    if not 0 < v < 1:
        raise InvalidParameterError(f"parameter {name} must lie in (0, 1), got {x}")
    return v


def _df_sampler(F: dc.DistFnObj) -> S.SamplerObj:
    return S.sample_by_quantile(F)


def id_power(law: Law, e: float) -> Law:
    """The law whose CF is ``law.cf ** e`` (ID catalog laws only)."""
    return resolve(law.need("id_power")(e))


# -- continuous primitives ---------------------------------------------------


@register("exponential", rate=1.0)
def _exponential(rate):
    rate = _positive(rate, "rate")
    df = dc.DistFnObj(
        func=lambda x: np.where(x > 0, -np.expm1(-rate * np.maximum(x, 0)), 0.0),
        descriptor=D.make("exponential", rate=rate),
        lower=0.0,
        quantile=lambda v: -np.log1p(-v) / rate,
        neglog_quantile=lambda y: -np.log(-np.expm1(-y)) / rate,
        neglog=lambda x: np.where(x > 0, -np.log(-np.expm1(-rate * np.where(x > 0, x, 1.0))), np.inf),
    )
    log_cf = lambda t: -np.log(1.0 - 1j * t / rate)  # noqa: E731
    return Law(
        D.make("exponential"),
        df=df,
        cf=dc.CharFnObj(lambda t: np.exp(log_cf(t)), df.descriptor, cumulant=log_cf),
        sampler=S.SamplerObj(lambda g, n: g.exponential(1.0 / rate, n), df.descriptor, df=df),
        levy=lambda g, t: g.gamma(t, 1.0 / rate),
        id_power=lambda e: D.make("gamma", shape=e, scale=1.0 / rate),
    )


@register("gamma", shape=1.0, scale=1.0)
def _gamma(shape, scale):
    shape, scale = _positive(shape, "shape"), _positive(scale, "scale")
    desc = D.make("gamma", shape=shape, scale=scale)
    df = dc.DistFnObj(
        func=lambda x: np.where(x > 0, special.gammainc(shape, np.maximum(x, 0) / scale), 0.0),
        descriptor=desc,
        lower=0.0,
        quantile=lambda v: scale * special.gammaincinv(shape, v),
    )
    log_cf = lambda t: -shape * np.log(1.0 - 1j * t * scale)  # noqa: E731
    return Law(
        desc,
        df=df,
        cf=dc.CharFnObj(lambda t: np.exp(log_cf(t)), desc, cumulant=log_cf),
        sampler=S.SamplerObj(lambda g, n: g.gamma(shape, scale, n), desc, df=df),
        levy=lambda g, t: g.gamma(shape * t, scale),
        id_power=lambda e: D.make("gamma", shape=shape * e, scale=scale),
    )


@register("normal", mu=0.0, sigma=1.0)
def _normal(mu, sigma):
    mu, sigma = _num(mu, "mu"), _positive(sigma, "sigma")
    desc = D.make("normal", mu=mu, sigma=sigma)
    df = dc.DistFnObj(
        func=lambda x: special.ndtr((x - mu) / sigma),
        descriptor=desc,
        quantile=lambda v: mu + sigma * special.ndtri(v),
    )
    log_cf = lambda t: 1j * mu * t - 0.5 * (sigma * t) ** 2  # noqa: E731
    return Law(
        desc,
        df=df,
        cf=dc.CharFnObj(lambda t: np.exp(log_cf(t)), desc, cumulant=log_cf),
        sampler=S.SamplerObj(lambda g, n: g.normal(mu, sigma, n), desc, df=df),
        levy=lambda g, t: mu * t + sigma * np.sqrt(t) * g.standard_normal(np.shape(t)),
        id_power=lambda e: D.make("normal", mu=mu * e, sigma=sigma * math.sqrt(e)),
    )


@register("uniform", lo=0.0, hi=1.0)
def _uniform(lo, hi):
    lo, hi = _num(lo, "lo"), _num(hi, "hi")
    if not lo < hi:
        raise InvalidParameterError(f"uniform needs lo < hi, got {lo}, {hi}")
    desc = D.make("uniform", lo=lo, hi=hi)
    df = dc.DistFnObj(
        func=lambda x: np.clip((x - lo) / (hi - lo), 0.0, 1.0),
        descriptor=desc,
        lower=lo,
        upper=hi,
        quantile=lambda v: lo + (hi - lo) * v,
    )

    def cf(t):
        t = np.asarray(t, dtype=float)
        safe = np.where(t == 0, 1.0, t)
        val = (np.exp(1j * safe * hi) - np.exp(1j * safe * lo)) / (1j * safe * (hi - lo))
        return np.where(t == 0, 1.0 + 0j, val)

    return Law(
        desc,
        df=df,
        cf=dc.CharFnObj(cf, desc),
        sampler=S.SamplerObj(lambda g, n: g.uniform(lo, hi, n), desc, df=df),
    )


@register("frechet", alpha=1.0, scale=1.0)
def _frechet(alpha, scale):
    alpha, scale = _positive(alpha, "alpha"), _positive(scale, "scale")
    desc = D.make("frechet", alpha=alpha, scale=scale)
    nq = lambda y: scale * np.asarray(y, dtype=float) ** (-1.0 / alpha)  # noqa: E731
    df = dc.DistFnObj(
        func=lambda x: np.where(x > 0, np.exp(-((np.maximum(x, 0) / scale) ** -alpha)), 0.0),
        descriptor=desc,
        lower=0.0,
        quantile=lambda v: nq(-np.log(v)),
        neglog_quantile=nq,
        neglog=lambda x: np.where(x > 0, (np.where(x > 0, x, 1.0) / scale) ** -alpha, np.inf),
    )
    return Law(desc, df=df, sampler=_df_sampler(df))


@register("gumbel", mu=0.0, beta=1.0)
def _gumbel(mu, beta):
    mu, beta = _num(mu, "mu"), _positive(beta, "beta")
    desc = D.make("gumbel", mu=mu, beta=beta)
    nq = lambda y: mu - beta * np.log(np.asarray(y, dtype=float))  # noqa: E731
    df = dc.DistFnObj(
        func=lambda x: np.exp(-np.exp(-(x - mu) / beta)),
        descriptor=desc,
        quantile=lambda v: nq(-np.log(v)),
        neglog_quantile=nq,
        neglog=lambda x: np.exp(-(x - mu) / beta),
    )
    return Law(desc, df=df, sampler=_df_sampler(df))


# -- discrete primitives -----------------------------------------------------


@register("point", c=0.0)
def _point(c):
    c = _num(c, "c")
    desc = D.make("point", c=c)
    df = dc.DistFnObj(
        func=lambda x: np.where(x >= c, 1.0, 0.0), descriptor=desc, lower=c, upper=c, quantile=lambda v: np.full(np.shape(v), c)
    )
    log_cf = lambda t: 1j * c * np.asarray(t, dtype=float)  # noqa: E731
    extra = {}
    if c >= 0 and c.is_integer():
        extra["pgf"] = dc.point_pgf(int(c))
        extra["pmf"] = lambda n_max: extra["pgf"].series(n_max)
    return Law(
        desc,
        df=df,
        cf=dc.CharFnObj(lambda t: np.exp(log_cf(t)), desc, cumulant=log_cf),
        sampler=S.sample_point(c),
        levy=lambda g, t: c * np.asarray(t, dtype=float),
        id_power=lambda e: D.make("point", c=c * e),
        **extra,
    )


@register("poisson", lam=1.0)
def _poisson(lam):
    lam = _positive(lam, "lam")
    desc = D.make("poisson", lam=lam)
    df = dc.DistFnObj(
        func=lambda x: np.where(x >= 0, special.pdtr(np.floor(np.maximum(x, 0)), lam), 0.0),
        descriptor=desc,
        lower=0.0,
    )
    log_cf = lambda t: lam * (np.exp(1j * np.asarray(t, dtype=float)) - 1.0)  # noqa: E731

    def pmf(n_max):
        m = np.arange(n_max + 1)
        return np.exp(m * math.log(lam) - lam - special.gammaln(m + 1))

    pgf = dc.ProbGenFnObj(lambda s: np.exp(lam * (s - 1.0)), 1, desc, series=pmf)
    return Law(
        desc,
        df=df,
        cf=dc.CharFnObj(lambda t: np.exp(log_cf(t)), desc, cumulant=log_cf),
        pgf=pgf,
        pmf=pmf,
        sampler=S.SamplerObj(lambda g, n: g.poisson(lam, n), desc, integer=True, df=df),
        levy=lambda g, t: g.poisson(lam * np.asarray(t, dtype=float)),
        id_power=lambda e: D.make("poisson", lam=lam * e),
    )


@register("compound_poisson", lam=1.0, J=D.make("exponential", rate=1.0))
def _compound_poisson(lam, J):
    lam = _positive(lam, "lam")
    J = _law(J, "J")
    jump_cf, jump_sampler = J.need("cf"), J.need("sampler")
    desc = D.make("compound_poisson", lam=lam, J=J.descriptor)
    log_cf = lambda t: lam * (jump_cf(t) - 1.0)  # noqa: E731

    def levy(g, t):
        t = np.asarray(t, dtype=float)
        counts = g.poisson(lam * t).ravel()
        xs = np.asarray(jump_sampler.draw_fn(g, int(counts.sum())), dtype=float)
        return np.bincount(S._group_index(counts), weights=xs, minlength=counts.size).reshape(t.shape)

    return Law(
        desc,
        cf=dc.CharFnObj(lambda t: np.exp(log_cf(t)), desc, cumulant=log_cf),
        sampler=S.SamplerObj(lambda g, n: levy(g, np.ones(n)), desc),
        levy=levy,
        id_power=lambda e: D.make("compound_poisson", lam=lam * e, J=J.descriptor),
    )


# -- counting laws -----------------------------------------------------------


@register("geometric", p=_REQUIRED)
def _geometric(p):
    p = _prob(p, "p")
    pgf = dc.geometric_pgf(p)
    return Law(pgf.descriptor, pgf=pgf, pmf=pgf.series, sampler=S.sample_geometric(p))


@register("harris", a=_REQUIRED, k=1)
def _harris(a, k):
    params = dc.HarrisParams(_num(a, "a"), _int(k, "k"))
    pgf = dc.harris_pgf(params)
    return Law(pgf.descriptor, pgf=pgf, pmf=pgf.series, sampler=S.sample_harris(params))


@register("negbin", r=_REQUIRED, q=_REQUIRED)
def _negbin(r, q):
    r, q = _positive(r, "r"), _prob(q, "q")
    pgf = dc.negative_binomial_pgf(r, q)
    return Law(pgf.descriptor, pgf=pgf, pmf=pgf.series, sampler=S.sample_negative_binomial(r, q))


# -- Laplace transforms (mixing laws) ----------------------------------------


@register("gamma_lt", k=1)
def _gamma_lt(k):
    k = _int(k, "k")
    lt = dc.gamma_lt(k)
    return Law(lt.descriptor, lt=lt, sampler=S.SamplerObj(lambda g, n: g.gamma(1.0 / k, 1.0, n), lt.descriptor))


@register("exp_lt", c=1.0)
def _exp_lt(c):
    lt = dc.exp_lt(_positive(c, "c"))
    return Law(lt.descriptor, lt=lt, sampler=S.sample_point(float(c)))


@register("semigroup", phi=D.make("gamma_lt", k=1), theta=_REQUIRED)
def _semigroup(phi, theta):
    phi = _law(phi, "phi")
    theta = _positive(theta, "theta")
    pgf = dc.semigroup_pgf(phi.need("lt"), theta)
    sampler = None
    if phi.descriptor.tag == "gamma_lt" and theta < 1:
        sampler = S.sample_harris(dc.HarrisParams(1.0 / theta, int(phi.descriptor["k"])))
    return Law(pgf.descriptor, pgf=pgf, pmf=pgf.series, sampler=sampler)


@register("lemma41", phi=D.make("gamma_lt", k=1), theta=_REQUIRED, j=1, k=1)
def _lemma41(phi, theta, j, k):
    phi = _law(phi, "phi")
    theta, j, k = _positive(theta, "theta"), _int(j, "j"), _int(k, "k")
    pgf = dc.lemma41_pgf(phi.need("lt"), theta, j, k)
    mixing = phi.sampler
    sampler = None
    if mixing is not None:
        sampler = S.SamplerObj(
            lambda g, n: j + k * g.poisson(np.asarray(mixing.draw_fn(g, n), dtype=float) / theta),
            pgf.descriptor,
            integer=True,
        )
    return Law(pgf.descriptor, pgf=pgf, pmf=pgf.series, sampler=sampler)


# -- random sums and maxima --------------------------------------------------


def _count_sampler(p=None, a=None, k=1):
    if p is not None:
        return S.sample_geometric(p)
    return S.sample_harris(dc.HarrisParams(a, k))


@register("geom_sum", p=_REQUIRED, X=_REQUIRED)
def _geom_sum(p, X):
    p, X = _prob(p, "p"), _law(X, "X")
    cf = L.geom_sum_cf(p, X.cf) if X.cf is not None else None
    sampler = S.sample_random_sum(S.sample_geometric(p), X.sampler) if X.sampler is not None else None
    return Law(D.make("geom_sum"), cf=cf, sampler=sampler)


@register("harris_sum", a=_REQUIRED, k=1, X=_REQUIRED)
def _harris_sum(a, k, X):
    params = dc.HarrisParams(_num(a, "a"), _int(k, "k"))
    X = _law(X, "X")
    cf = L.harris_sum_cf(params, X.cf) if X.cf is not None else None
    sampler = S.sample_random_sum(S.sample_harris(params), X.sampler) if X.sampler is not None else None
    return Law(D.make("harris_sum"), cf=cf, sampler=sampler)


@register("geom_sum_innovation", p=_REQUIRED, F=_REQUIRED)
def _geom_sum_innovation(p, F):
    return Law(D.make("geom_sum_innovation"), cf=L.geom_sum_innovation_cf(_prob(p, "p"), _law(F, "F").need("cf")))


@register("harris_sum_innovation", a=_REQUIRED, k=1, F=_REQUIRED)
def _harris_sum_innovation(a, k, F):
    params = dc.HarrisParams(_num(a, "a"), _int(k, "k"))
    return Law(D.make("harris_sum_innovation"), cf=L.harris_sum_innovation_cf(params, _law(F, "F").need("cf")))


@register("geom_max", p=_REQUIRED, F=_REQUIRED)
def _geom_max(p, F):
    p, F = _prob(p, "p"), _law(F, "F")
    df = L.geom_max_df(p, F.need("df"))
    sampler = S.sample_random_max(S.sample_geometric(p), F.sampler) if F.sampler is not None else _df_sampler(df)
    return Law(df.descriptor, df=df, sampler=sampler)


@register("harris_max", a=_REQUIRED, k=1, F=_REQUIRED)
def _harris_max(a, k, F):
    params = dc.HarrisParams(_num(a, "a"), _int(k, "k"))
    F = _law(F, "F")
    df = L.harris_max_df(params, F.need("df"))
    sampler = S.sample_random_max(S.sample_harris(params), F.sampler) if F.sampler is not None else _df_sampler(df)
    return Law(df.descriptor, df=df, sampler=sampler)


@register("geom_max_innovation", p=_REQUIRED, F=_REQUIRED)
def _geom_max_innovation(p, F):
    df = L.geom_max_innovation_df(_prob(p, "p"), _law(F, "F").need("df"))
    return Law(df.descriptor, df=df, sampler=_df_sampler(df))


@register("harris_max_innovation", a=_REQUIRED, k=1, F=_REQUIRED)
def _harris_max_innovation(a, k, F):
    params = dc.HarrisParams(_num(a, "a"), _int(k, "k"))
    df = L.harris_max_innovation_df(params, _law(F, "F").need("df"))
    return Law(df.descriptor, df=df, sampler=_df_sampler(df))


@register("random_sum", N=_REQUIRED, X=_REQUIRED)
def _random_sum(N, X):
    N, X = _law(N, "N"), _law(X, "X")
    return Law(D.make("random_sum"), sampler=S.sample_random_sum(N.need("sampler"), X.need("sampler")))


@register("random_max", N=_REQUIRED, X=_REQUIRED)
def _random_max(N, X):
    N, X = _law(N, "N"), _law(X, "X")
    df = None
    if N.pgf is not None and X.df is not None:
        pgf, F = N.pgf, X.df
        df = dc.DistFnObj(lambda x: pgf(F(x)), D.make("random_max"), lower=-math.inf, upper=F.upper)
    return Law(D.make("random_max"), df=df, sampler=S.sample_random_max(N.need("sampler"), X.need("sampler")))


@register("poisson_mixture_max", phi=D.make("gamma_lt", k=1), a=1.0, G=D.make("uniform"))
def _poisson_mixture_max(phi, a, G):
    phi, G = _law(phi, "phi"), _law(G, "G")
    a = _positive(a, "a")
    df = L.poisson_mixture_max_df(phi.need("lt"), a, G.need("df"))
    sampler = S.sample_poisson_mixture_max(phi.need("sampler"), a, G.need("sampler"))
    return Law(df.descriptor, df=df, sampler=sampler)


# -- ID constructors ---------------------------------------------------------


def _subordinated(h: Law, time_scale: float, k: int, desc) -> S.SamplerObj:
    levy = h.need("levy")

    def draw(g, n):
        times = time_scale * g.gamma(1.0 / k, 1.0, n)
        return np.asarray(levy(g, times), dtype=float)

    return S.SamplerObj(draw, desc)


@register("harris_id", h=_REQUIRED, k=1)
def _harris_id(h, k):
    h, k = _law(h, "h"), _int(k, "k")
    cf = L.harris_id_cf(h.need("cf"), k)
    sampler = _subordinated(h, 1.0, k, cf.descriptor) if h.levy is not None else None

    def power(e):
        # f**e = (1 - log h)**(-e/k) stays in the family only when k/e is an integer
        m = k / e
        if abs(m - round(m)) > 1e-9:
            raise UnsupportedError(f"harris_id(k={k}) has no CF power {e} in the family")
        return D.make("harris_id", h=h.descriptor, k=int(round(m)))

    return Law(cf.descriptor, cf=cf, sampler=sampler, id_power=power)


@register("gamma_id", h=_REQUIRED, k=1)
def _gamma_id(h, k):
    h, k = _law(h, "h"), _int(k, "k")
    cf = L.gamma_id_cf(h.need("cf"), k)
    sampler = _subordinated(h, float(k), k, cf.descriptor) if h.levy is not None else None
    return Law(cf.descriptor, cf=cf, sampler=sampler)


@register("geom_max_id", H=_REQUIRED)
def _geom_max_id(H):
    df = L.geom_max_id_df(_law(H, "H").need("df"))
    return Law(df.descriptor, df=df, sampler=_df_sampler(df))


@register("harris_max_id", H=_REQUIRED, k=1)
def _harris_max_id(H, k):
    df = L.harris_max_id_df(_law(H, "H").need("df"), _int(k, "k"))
    return Law(df.descriptor, df=df, sampler=_df_sampler(df))


@register("gamma_max_id", H=_REQUIRED, k=1)
def _gamma_max_id(H, k):
    df = L.gamma_max_id_df(_law(H, "H").need("df"), _int(k, "k"))
    return Law(df.descriptor, df=df, sampler=_df_sampler(df))


@register("n_max_id", phi=D.make("gamma_lt", k=1), H=_REQUIRED)
def _n_max_id(phi, H):
    df = L.n_max_id_df(_law(phi, "phi").need("lt"), _law(H, "H").need("df"))
    return Law(df.descriptor, df=df, sampler=_df_sampler(df))


@register("power", F=_REQUIRED, e=_REQUIRED)
def _power(F, e):
    df = L.power_df(_law(F, "F").need("df"), _positive(e, "e"))
    return Law(df.descriptor, df=df, sampler=_df_sampler(df))


@register("bisect", F=_REQUIRED, lo=_REQUIRED, hi=_REQUIRED)
def _bisect(F, lo, hi):
    """Force quantile inversion by bisection on [lo, hi]."""
    F = _law(F, "F")
    df = F.need("df")
    return Law(D.make("bisect"), df=df, sampler=S.sample_from_df(df, (_num(lo, "lo"), _num(hi, "hi"))))
