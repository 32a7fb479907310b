"""Seeded variate generation.

A :class:`SamplerObj` is an immutable recipe; all randomness comes from the
:class:`RngStream` passed to :meth:`SamplerObj.draw`.  Draws are vectorised:
``sampler.draw(rng, size)`` returns an array.  The bottom element of the
maximum operation (the maximum of an empty sample) is ``-inf``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import descriptors as D
from .dist_core import DistFnObj, HarrisParams
from .errors import BracketError, InvalidParameterError

BOTTOM = -math.inf


class RngStream:
    """PCG64DXSM stream keyed by (seed, stream id) through ``SeedSequence``.

    Distinct stream ids give independent spawn keys of the same root seed.
    """

    def __init__(self, seed: int, stream: int = 0):
        if seed < 0 or stream < 0:
            raise InvalidParameterError("seed and stream id must be non-negative")
        self.seed = int(seed)
        self.stream = int(stream)
        ss = np.random.SeedSequence(self.seed, spawn_key=(self.stream,))
        self.generator = np.random.Generator(np.random.PCG64DXSM(ss))

    def __repr__(self):
        return f"RngStream(seed={self.seed}, stream={self.stream})"


@dataclass(frozen=True, eq=False)
class SamplerObj:
    draw_fn: Callable[[np.random.Generator, int], np.ndarray]
    descriptor: D.Descriptor
    integer: bool = False
    df: Optional[DistFnObj] = None

    def draw(self, rng: RngStream | np.random.Generator, size: int | None = None):
        gen = rng.generator if isinstance(rng, RngStream) else rng
        out = self.draw_fn(gen, 1 if size is None else int(size))
        return out[0] if size is None else out


# -- primitive laws ----------------------------------------------------------


def sample_geometric(p: float) -> SamplerObj:
    """Geometric on {1, 2, ...} with P(N = n) = p (1-p)**(n-1)."""
    if not 0 < p < 1:
        raise InvalidParameterError(f"geometric p must lie in (0, 1), got {p}")
    return SamplerObj(lambda g, n: g.geometric(p, n), D.make("geometric", p=p), integer=True)


def sample_negative_binomial(r: float, q: float) -> SamplerObj:
    """NB(r, q) on {0, 1, ...} as a Poisson(Gamma(r, (1-q)/q)) mixture."""
    if not r > 0 or not 0 < q < 1:
        raise InvalidParameterError(f"negative binomial needs r > 0 and 0 < q < 1, got r={r}, q={q}")
    scale = (1.0 - q) / q

    def draw(g, n):
        return g.poisson(g.gamma(r, scale, n))

    return SamplerObj(draw, D.make("negbin", r=r, q=q), integer=True)


def sample_harris(params: HarrisParams) -> SamplerObj:
    """Harris(a, k) as 1 + k M with M ~ NB(1/k, 1/a)."""
    k = params.k
    nb = sample_negative_binomial(1.0 / k, 1.0 / params.a)
    return SamplerObj(
        lambda g, n: 1 + k * nb.draw_fn(g, n), D.make("harris", a=params.a, k=k), integer=True
    )


def sample_point(c: float) -> SamplerObj:
    integer = float(c).is_integer()
    value = int(c) if integer else float(c)
    return SamplerObj(
        lambda g, n: np.full(n, value), D.make("point", c=c), integer=integer
    )


# -- random sums and maxima --------------------------------------------------


def _group_index(counts: np.ndarray) -> np.ndarray:
    return np.repeat(np.arange(counts.size), counts)


def sample_random_sum(N: SamplerObj, X: SamplerObj) -> SamplerObj:
    """Sum of N independent X draws; an empty sum is 0."""

    def draw(g, n):
        counts = np.asarray(N.draw_fn(g, n), dtype=np.int64)
        if counts.min(initial=0) < 0:
            raise InvalidParameterError("count sampler produced a negative value")
        xs = np.asarray(X.draw_fn(g, int(counts.sum())), dtype=float)
        return np.bincount(_group_index(counts), weights=xs, minlength=n)

    return SamplerObj(draw, D.make("random_sum", N=N.descriptor, X=X.descriptor))


def _grouped_max(counts: np.ndarray, xs: np.ndarray) -> np.ndarray:
    out = np.full(counts.size, BOTTOM)
    nonempty = counts > 0
    if xs.size:
        starts = np.concatenate([[0], np.cumsum(counts)[:-1]])[nonempty]
        out[nonempty] = np.maximum.reduceat(xs, starts)
    return out


def sample_random_max(N: SamplerObj, X: SamplerObj) -> SamplerObj:
    """Maximum of N independent X draws; an empty maximum is the bottom element."""

    def draw(g, n):
        counts = np.asarray(N.draw_fn(g, n), dtype=np.int64)
        xs = np.asarray(X.draw_fn(g, int(counts.sum())), dtype=float)
        return _grouped_max(counts, xs)

    return SamplerObj(draw, D.make("random_max", N=N.descriptor, X=X.descriptor))


def sample_poisson_mixture_max(mixing: SamplerObj, a: float, G: SamplerObj) -> SamplerObj:
    """Draw U from ``mixing``, N ~ Poisson(a U), return the max of N G-draws."""
    if not a > 0:
        raise InvalidParameterError(f"a must be > 0, got {a}")

    def draw(g, n):
        u = np.asarray(mixing.draw_fn(g, n), dtype=float)
        counts = g.poisson(a * u)
        xs = np.asarray(G.draw_fn(g, int(counts.sum())), dtype=float)
        return _grouped_max(counts, xs)

    return SamplerObj(
        draw, D.make("poisson_mixture_max", U=mixing.descriptor, a=a, G=G.descriptor)
    )


# -- quantile inversion ------------------------------------------------------


def bisect_quantile(F: DistFnObj, u, bracket, f_tol=1e-10, x_tol=1e-12, max_iter=400):
    """Smallest-x bisection for F(x) >= u, vectorised over u.

    Stops per element once |F(x) - u| < f_tol or the interval is narrower
    than x_tol (relative beyond |x| = 1).
    """
    lo0, hi0 = map(float, bracket)
    shape = np.shape(u)
    u = np.atleast_1d(np.asarray(u, dtype=float)).ravel()
    F_lo, F_hi = float(F(lo0)), float(F(hi0))
    outside = (u < F_lo - f_tol) | (u > F_hi + f_tol)
    if outside.any():
        raise BracketError(
            f"bracket [{lo0}, {hi0}] (F from {F_lo:.3g} to {F_hi:.3g}) does not straddle level {u[outside][0]:.6g}"
        )
    lo = np.full(u.shape, lo0)
    hi = np.full(u.shape, hi0)
    x = 0.5 * (lo + hi)
    idx = np.arange(u.size)
    for _ in range(max_iter):
        if idx.size == 0:
            break
        l, h = lo[idx], hi[idx]
        mid = 0.5 * (l + h)
        fm = F(mid)
        below = fm < u[idx]
        lo[idx] = np.where(below, mid, l)
        hi[idx] = np.where(below, h, mid)
        x[idx] = mid
        stalled = (mid == l) | (mid == h)
        done = (np.abs(fm - u[idx]) < f_tol) | (hi[idx] - lo[idx] < x_tol * np.maximum(1.0, np.abs(mid))) | stalled
        idx = idx[~done]
    return x.reshape(shape)


def sample_from_df(F: DistFnObj, bracket: tuple[float, float]) -> SamplerObj:
    """Inverse-transform sampler by bisection on ``bracket``."""
    lo, hi = map(float, bracket)
    if not lo < hi:
        raise BracketError(f"empty bracket [{lo}, {hi}]")

    def draw(g, n):
        return bisect_quantile(F, g.random(n), (lo, hi))

    return SamplerObj(draw, D.make("bisect", F=F.descriptor, lo=lo, hi=hi), df=F)


def auto_bracket(F: DistFnObj, eps: float = 1e-12, start: float = 1.0, max_doublings: int = 2000):
    """Bracket covering the (eps, 1 - eps) quantiles of F."""
    lo = F.lower if math.isfinite(F.lower) else None
    hi = F.upper if math.isfinite(F.upper) else None
    if lo is None:
        lo = (hi if hi is not None else 0.0) - start
        step = start
        for _ in range(max_doublings):
            if float(F(lo)) <= eps:
                break
            step *= 2
            lo -= step
        else:
            raise BracketError(f"{F.descriptor}: no lower bracket found")
    if hi is None:
        hi = lo + start
        step = start
        for _ in range(max_doublings):
            if float(F(hi)) >= 1 - eps:
                break
            step *= 2
            hi += step
        else:
            raise BracketError(f"{F.descriptor}: no upper bracket found")
    return lo, hi


def sample_by_quantile(F: DistFnObj) -> SamplerObj:
    """Closed-form inverse transform when F has a quantile, else bisection."""
    if F.quantile is None:
        return sample_from_df(F, auto_bracket(F))
    return SamplerObj(lambda g, n: np.asarray(F.quantile(g.random(n)), dtype=float), F.descriptor, df=F)
