"""Random-sum / random-maximum transforms and the ID law constructors.

Forward transforms map an innovation law to the stationary law of the
corresponding AR(1) scheme; the ``*_innovation_*`` functions invert them.
Max-scheme transforms act on d.f.s, additive ones on CFs.  Where the base
d.f. carries a closed-form quantile the result does too, since every
transform here is an explicit monotone map of [0, 1].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import optimize

from . import descriptors as D
from .dist_core import CharFnObj, DistFnObj, HarrisParams, LaplaceTransformObj
from .errors import (
    BranchAmbiguityError,
    InvalidParameterError,
    NumericDegeneracyError,
    UnsupportedError,
)

ZERO_TOL = 1e-12
DEGENERACY_TOL = 1e-14
MAX_ARG_STEP = math.pi / 4


def _check_p(p: float):
    if not 0 < p < 1:
        raise InvalidParameterError(f"p must lie in (0, 1), got {p}")


def _check_k(k):
    if int(k) != k or k < 1:
        raise InvalidParameterError(f"k must be a positive integer, got {k}")
    return int(k)


def _neglog_quantile(F: DistFnObj) -> Optional[Callable]:
    if F.neglog_quantile is not None:
        return F.neglog_quantile
    if F.quantile is not None:
        return lambda y: F.quantile(np.exp(-np.asarray(y, dtype=float)))
    return None


def _compose_quantile(F: DistFnObj, level_map: Callable) -> Optional[Callable]:
    if F.quantile is None:
        return None
    return lambda v: F.quantile(level_map(np.asarray(v, dtype=float)))


def _derived_df(func, tag, base: DistFnObj, quantile=None, neglog_quantile=None, neglog=None, **params) -> DistFnObj:
    return DistFnObj(
        func=func,
        descriptor=D.make(tag, **params),
        lower=base.lower,
        upper=base.upper,
        quantile=quantile,
        neglog_quantile=neglog_quantile,
        neglog=neglog,
    )


# -- continuous k-th roots ---------------------------------------------------


def _check_local_minima(g: Callable, path: np.ndarray, mod: np.ndarray, watch: float = 1e-2):
    i = np.flatnonzero((mod[1:-1] < mod[:-2]) & (mod[1:-1] <= mod[2:]) & (mod[1:-1] < watch)) + 1
    for j in i:
        res = optimize.minimize_scalar(
            lambda s: float(np.abs(g(np.array([s]))[0])),
            bounds=(path[j - 1], path[j + 1]),
            method="bounded",
            options={"xatol": 1e-13},
        )
        if res.fun < ZERO_TOL:
            raise BranchAmbiguityError(f"|f^k| within {ZERO_TOL} of 0 at t={res.x:.6g}", t=float(res.x))


def track_root(g: Callable, t, k: int, max_refine: int = 40) -> np.ndarray:
    """Continuous k-th root of ``g`` along |t| starting from g(0) = 1.

    ``g`` must satisfy g(-t) = conj(g(t)).  The path from 0 to max|t| is
    refined by halving wherever consecutive arguments differ by more than
    pi/4; a value of |g| below 1e-12 makes the branch undefined.  Interior
    local minima of |g| are refined by bounded minimisation so that a
    zero between grid points is not stepped over.
    """
    t = np.asarray(t, dtype=float)
    if k == 1:
        return np.asarray(g(t), dtype=complex)
    at = np.abs(t).ravel()
    tmax = float(at.max()) if at.size else 0.0
    path = np.unique(np.concatenate([np.linspace(0.0, tmax, 257), at]))
    vals = np.asarray(g(path), dtype=complex)
    for _ in range(max_refine):
        small = np.abs(vals) < ZERO_TOL
        if small.any():
            raise BranchAmbiguityError(
                f"|f^k| within {ZERO_TOL} of 0 at t={path[small][0]:.6g}", t=float(path[small][0])
            )
        steps = np.angle(vals[1:] / vals[:-1])
        bad = np.abs(steps) > MAX_ARG_STEP
        if not bad.any():
            break
        mids = 0.5 * (path[:-1][bad] + path[1:][bad])
        path = np.sort(np.concatenate([path, mids]))
        vals = np.asarray(g(path), dtype=complex)
    else:
        where = float(path[1:][bad][0])
        raise BranchAmbiguityError(f"argument of f^k not resolvable near t={where:.6g}", t=where)
    _check_local_minima(g, path, np.abs(vals))
    arg = np.angle(vals[0]) + np.concatenate([[0.0], np.cumsum(steps)])
    roots = np.abs(vals) ** (1.0 / k) * np.exp(1j * arg / k)
    out = roots[np.searchsorted(path, at)]
    out = np.where(t.ravel() < 0, np.conj(out), out)
    return out.reshape(t.shape)


# -- additive scheme (CFs) ---------------------------------------------------


def _geom_sum_level(p, g):
    denom = 1.0 - (1.0 - p) * g
    if np.any(np.abs(denom) < DEGENERACY_TOL):
        raise NumericDegeneracyError("1 - (1-p) f is numerically zero")
    return p * g / denom


def geom_sum_cf(p: float, f_eps: CharFnObj) -> CharFnObj:
    """CF of a geometric(p) sum (support 1, 2, ...) of innovations."""
    _check_p(p)
    return CharFnObj(
        func=lambda t: _geom_sum_level(p, f_eps(t)),
        descriptor=D.make("geom_sum", p=p, X=f_eps.descriptor),
    )


def geom_sum_innovation_cf(p: float, f: CharFnObj) -> CharFnObj:
    _check_p(p)
    return CharFnObj(
        func=lambda t: (lambda g: g / (p + (1.0 - p) * g))(f(t)),
        descriptor=D.make("geom_sum_innovation", p=p, F=f.descriptor),
    )


def harris_sum_cf(params: HarrisParams, f_eps: CharFnObj) -> CharFnObj:
    """CF of a Harris(a, k) sum; algebra is done on the k-th power level."""
    p, k = params.p, params.k

    def g(t):
        return _geom_sum_level(p, f_eps(t) ** k)

    return CharFnObj(
        func=lambda t: track_root(g, t, k),
        descriptor=D.make("harris_sum", a=params.a, k=k, X=f_eps.descriptor),
    )


def harris_sum_innovation_cf(params: HarrisParams, f_y: CharFnObj) -> CharFnObj:
    """Innovation CF solving the Harris-sum fixed point for a stationary f_y."""
    p, k = params.p, params.k

    def g(t):
        gy = f_y(t) ** k
        return gy / (p + (1.0 - p) * gy)

    return CharFnObj(
        func=lambda t: track_root(g, t, k),
        descriptor=D.make("harris_sum_innovation", a=params.a, k=k, F=f_y.descriptor),
    )


def _require_cumulant(h: CharFnObj) -> Callable:
    if h.cumulant is None:
        raise UnsupportedError(f"{h.descriptor}: no distinguished logarithm in the ID catalog")
    return h.cumulant


def harris_id_cf(h: CharFnObj, k: int) -> CharFnObj:
    """``(1 - log h)**(-1/k)`` with the distinguished log of h."""
    k = _check_k(k)
    log_h = _require_cumulant(h)
    return CharFnObj(
        func=lambda t: (1.0 - log_h(t)) ** (-1.0 / k),
        descriptor=D.make("harris_id", h=h.descriptor, k=k),
    )


def gamma_id_cf(h: CharFnObj, k: int) -> CharFnObj:
    """``(1 + k (-log h))**(-1/k)`` with the distinguished log of h."""
    k = _check_k(k)
    log_h = _require_cumulant(h)
    return CharFnObj(
        func=lambda t: (1.0 - k * log_h(t)) ** (-1.0 / k),
        descriptor=D.make("gamma_id", h=h.descriptor, k=k),
    )


# -- maximum scheme (d.f.s) --------------------------------------------------


def _geom_max_map(p):
    return lambda u: p * u / (p + (1.0 - p) * (1.0 - u))


def _geom_max_inverse_map(p):
    return lambda v: v / (p + (1.0 - p) * v)


def _harris_max_map(a, k):
    return lambda u: u / (1.0 + (a - 1.0) * (1.0 - u**k)) ** (1.0 / k)


def _harris_max_inverse_map(p, k):
    return lambda v: v / (p + (1.0 - p) * v**k) ** (1.0 / k)


def geom_max_df(p: float, F_eps: DistFnObj) -> DistFnObj:
    _check_p(p)
    fwd, inv = _geom_max_map(p), _geom_max_inverse_map(p)
    return _derived_df(
        lambda x: fwd(F_eps(x)),
        "geom_max",
        F_eps,
        quantile=_compose_quantile(F_eps, inv),
        p=p,
        F=F_eps.descriptor,
    )


def geom_max_innovation_df(p: float, F: DistFnObj) -> DistFnObj:
    _check_p(p)
    fwd, inv = _geom_max_map(p), _geom_max_inverse_map(p)
    return _derived_df(
        lambda x: inv(F(x)),
        "geom_max_innovation",
        F,
        quantile=_compose_quantile(F, fwd),
        p=p,
        F=F.descriptor,
    )


def harris_max_df(params: HarrisParams, F_eps: DistFnObj) -> DistFnObj:
    a, k, p = params.a, params.k, params.p
    fwd, inv = _harris_max_map(a, k), _harris_max_inverse_map(p, k)
    return _derived_df(
        lambda x: fwd(F_eps(x)),
        "harris_max",
        F_eps,
        quantile=_compose_quantile(F_eps, inv),
        a=a,
        k=k,
        F=F_eps.descriptor,
    )


def harris_max_innovation_df(params: HarrisParams, F: DistFnObj) -> DistFnObj:
    a, k, p = params.a, params.k, params.p
    fwd, inv = _harris_max_map(a, k), _harris_max_inverse_map(p, k)
    return _derived_df(
        lambda x: inv(F(x)),
        "harris_max_innovation",
        F,
        quantile=_compose_quantile(F, fwd),
        a=a,
        k=k,
        F=F.descriptor,
    )


def _neglog(H: DistFnObj, x):
    return H.neglog_at(x)


def _id_df(base: DistFnObj, tag: str, L_to_F, v_to_L, y_to_L, **params) -> DistFnObj:
    """d.f. ``L_to_F(-log base)`` with quantiles through the base neglog-quantile."""
    nq = _neglog_quantile(base)
    quantile = neglog = None
    if nq is not None:
        quantile = lambda v: nq(v_to_L(np.asarray(v, dtype=float)))  # noqa: E731
        neglog = lambda y: nq(y_to_L(np.asarray(y, dtype=float)))  # noqa: E731
    return _derived_df(
        lambda x: L_to_F(_neglog(base, x)),
        tag,
        base,
        quantile=quantile,
        neglog_quantile=neglog,
        neglog=lambda x: -np.log(L_to_F(_neglog(base, x))),
        **params,
    )


def geom_max_id_df(H: DistFnObj) -> DistFnObj:
    """``1 / (1 - log H)``; zero where H is zero."""
    return _id_df(
        H,
        "geom_max_id",
        lambda L: 1.0 / (1.0 + L),
        lambda v: 1.0 / v - 1.0,
        np.expm1,
        H=H.descriptor,
    )


def harris_max_id_df(H: DistFnObj, k: int) -> DistFnObj:
    """``(1 - log H)**(-1/k)``."""
    k = _check_k(k)
    return _id_df(
        H,
        "harris_max_id",
        lambda L: (1.0 + L) ** (-1.0 / k),
        lambda v: v ** (-float(k)) - 1.0,
        lambda y: np.expm1(k * y),
        H=H.descriptor,
        k=k,
    )


def gamma_max_id_df(H: DistFnObj, k: int) -> DistFnObj:
    """``(1 + k (-log H))**(-1/k)``."""
    k = _check_k(k)
    return _id_df(
        H,
        "gamma_max_id",
        lambda L: (1.0 + k * L) ** (-1.0 / k),
        lambda v: (v ** (-float(k)) - 1.0) / k,
        lambda y: np.expm1(k * y) / k,
        H=H.descriptor,
        k=k,
    )


def n_max_id_df(phi: LaplaceTransformObj, H: DistFnObj) -> DistFnObj:
    """``phi(-log H)``, taken literally (no rescaling of phi)."""
    return _id_df(
        H,
        "n_max_id",
        phi,
        phi.inv,
        lambda y: phi.inv(np.exp(-y)),
        phi=phi.descriptor,
        H=H.descriptor,
    )


def power_df(F: DistFnObj, e: float) -> DistFnObj:
    """``F**e`` for e > 0 (for max-ID H, the law of H**p)."""
    if not e > 0:
        raise InvalidParameterError(f"power exponent must be > 0, got {e}")
    nq = _neglog_quantile(F)
    quantile = neglog = None
    if nq is not None:
        quantile = lambda v: nq(-np.log(np.asarray(v, dtype=float)) / e)  # noqa: E731
        neglog = lambda y: nq(np.asarray(y, dtype=float) / e)  # noqa: E731
    return _derived_df(
        lambda x: np.exp(-e * F.neglog_at(x)) if F.neglog is not None else F(x) ** e,
        "power",
        F,
        quantile=quantile,
        neglog_quantile=neglog,
        neglog=lambda x: e * F.neglog_at(x),
        F=F.descriptor,
        e=e,
    )


def poisson_mixture_max_df(phi: LaplaceTransformObj, a: float, G: DistFnObj) -> DistFnObj:
    """``phi(a (1 - G))``; the mass phi(a) sits on the bottom element."""
    if not a > 0:
        raise InvalidParameterError(f"a must be > 0, got {a}")
    atom = float(phi(a))

    def quantile(v):
        v = np.asarray(v, dtype=float)
        level = 1.0 - phi.inv(np.maximum(v, atom)) / a
        return np.where(v <= atom, -np.inf, G.quantile(np.clip(level, 0.0, 1.0)))

    return DistFnObj(
        func=lambda x: phi(a * (1.0 - G(x))),
        descriptor=D.make("poisson_mixture_max", phi=phi.descriptor, a=a, G=G.descriptor),
        lower=-math.inf,
        upper=G.upper,
        quantile=quantile if G.quantile is not None else None,
    )


def eq5_sequence(phi: LaplaceTransformObj, F_values, theta: float):
    """``phi((1/theta) [1 - phi(theta phi^{-1}(F))]``), whose theta -> 0 limit
    is ``phi(m phi^{-1}(F))`` with m the mixing mean."""
    F_values = np.asarray(F_values, dtype=float)
    return phi((1.0 - phi(theta * phi.inv(F_values))) / theta)


# -- reports -----------------------------------------------------------------


@dataclass(frozen=True)
class LawTransformReport:
    transform_id: str
    params: tuple
    grid: tuple[float, float, int]
    max_residual: float


def df_round_trip(params: HarrisParams, F: DistFnObj, grid) -> LawTransformReport:
    """Sup residual of harris_max_df(harris_max_innovation_df(F)) against F."""
    grid = np.asarray(grid, dtype=float)
    G = harris_max_df(params, harris_max_innovation_df(params, F))
    res = float(np.nanmax(np.abs(G(grid) - F(grid))))
    return LawTransformReport(
        f"harris_max_round_trip:{F.descriptor}",
        (("a", params.a), ("k", params.k)),
        (float(grid.min()), float(grid.max()), int(grid.size)),
        res,
    )


def cf_round_trip(params: HarrisParams, f: CharFnObj, grid) -> LawTransformReport:
    grid = np.asarray(grid, dtype=float)
    g = harris_sum_cf(params, harris_sum_innovation_cf(params, f))
    res = float(np.max(np.abs(g(grid) - f(grid))))
    return LawTransformReport(
        f"harris_sum_round_trip:{f.descriptor}",
        (("a", params.a), ("k", params.k)),
        (float(grid.min()), float(grid.max()), int(grid.size)),
        res,
    )
