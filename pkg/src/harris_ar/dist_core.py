"""Function objects for Laplace transforms, PGFs, d.f.s and CFs.

Every object is an immutable wrapper around a vectorised callable plus a
:class:`~harris_ar.descriptors.Descriptor` naming it.  The concrete
instances here are the gamma Laplace transform, the Harris(a, k) PGF, the
semigroup family ``phi(phi^{-1}(s) / theta)`` and the class
``s**j * phi((1 - s**k) / theta)``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy import special

from . import descriptors as D
from .errors import (
    DomainError,
    InvalidParameterError,
    InvalidPGFError,
    TruncationError,
    UnsupportedError,
)
from .series import TruncatedSeries

NEG_TOL = 1e-12
MASS_TOL = 1e-9
FINITE_DIFF_MAX_ORDER = 12
CONTOUR_AGREEMENT = 1e-11


def _arr(x):
    return np.asarray(x, dtype=float)


@dataclass(frozen=True, eq=False)
class LaplaceTransformObj:
    """LT of a positive random variable, with its inverse on (0, 1].

    ``mixed_poisson`` (optional) returns the first ``n`` probabilities of a
    Poisson(lam * U) count where U has this LT, i.e. the coefficients of
    ``phi(lam * (1 - z))``.
    """

    func: Callable
    inverse: Callable
    descriptor: D.Descriptor
    mixed_poisson: Optional[Callable[[float, int], np.ndarray]] = None

    def __call__(self, s):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return self.func(_arr(s))

    def eval(self, s):
        return self(s)

    def inv(self, v):
        with np.errstate(divide="ignore", over="ignore"):
            return self.inverse(_arr(v))

    def mean(self, h: float = 1e-6) -> float:
        """-phi'(0) by a Richardson-extrapolated one-sided difference."""
        d1 = (1.0 - float(self(h))) / h
        d2 = (1.0 - float(self(h / 2))) / (h / 2)
        return 2 * d2 - d1


@dataclass(frozen=True, eq=False)
class ProbGenFnObj:
    """PGF on [0, 1] with optional closed-form coefficient recipe."""

    func: Callable
    support_step: int
    descriptor: D.Descriptor
    series: Optional[Callable[[int], np.ndarray]] = None

    def __call__(self, s):
        s = _arr(s)
        if np.any(s < 0) or np.any(s > 1):
            raise DomainError(f"{self.descriptor}: PGF argument outside [0, 1]")
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return self.func(s)

    def eval(self, s):
        return self(s)


@dataclass(frozen=True, eq=False)
class DistFnObj:
    """Univariate d.f.; ``quantile``, ``neglog`` and ``neglog_quantile`` are optional.

    ``neglog(x)`` is ``-log F(x)`` and ``neglog_quantile(y)`` the smallest x
    with ``-log F(x) <= y``; they keep powers ``F**e`` and the max-ID
    constructors accurate where F underflows.
    """

    func: Callable
    descriptor: D.Descriptor
    lower: float = -math.inf
    upper: float = math.inf
    quantile: Optional[Callable] = None
    neglog_quantile: Optional[Callable] = None
    neglog: Optional[Callable] = None

    def __call__(self, x):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            return self.func(_arr(x))

    def neglog_at(self, x):
        with np.errstate(divide="ignore", over="ignore", invalid="ignore"):
            if self.neglog is not None:
                return self.neglog(_arr(x))
            return -np.log(self.func(_arr(x)))

    def eval(self, x):
        return self(x)


@dataclass(frozen=True, eq=False)
class CharFnObj:
    """CF on the real line; ``cumulant`` is the distinguished log when known."""

    func: Callable
    descriptor: D.Descriptor
    cumulant: Optional[Callable] = None

    def __call__(self, t):
        return np.asarray(self.func(_arr(t)), dtype=complex)

    def eval(self, t):
        return self(t)


@dataclass(frozen=True)
class HarrisParams:
    a: float
    k: int = 1

    def __post_init__(self):
        if not (self.a > 1 and math.isfinite(self.a)):
            raise InvalidParameterError(f"Harris parameter a must be > 1, got {self.a}")
        if int(self.k) != self.k or self.k < 1:
            raise InvalidParameterError(f"Harris parameter k must be a positive integer, got {self.k}")
        object.__setattr__(self, "k", int(self.k))

    @classmethod
    def from_p(cls, p: float, k: int = 1) -> "HarrisParams":
        if not 0 < p < 1:
            raise InvalidParameterError(f"p must lie in (0, 1), got {p}")
        return cls(1.0 / p, k)

    @property
    def p(self) -> float:
        return 1.0 / self.a

    @property
    def theta(self) -> float:
        return self.p / (1.0 - self.p)


# -- Laplace transforms ------------------------------------------------------


def _nb_pmf(r: float, q: float, n: int) -> np.ndarray:
    """P(M = m), m < n, for M ~ NB(r, q): coefficients of (q / (1 - (1-q) z))**r."""
    if n <= 0:
        return np.zeros(0)
    m = np.arange(1, n)
    log_ratio = np.log((r + m - 1) / m) + math.log1p(-q)
    logs = np.concatenate([[0.0], np.cumsum(log_ratio)]) + r * math.log(q)
    return np.exp(logs)


def gamma_lt(k: int) -> LaplaceTransformObj:
    """LT ``(1 + s)**(-1/k)`` of the Gamma(shape 1/k, scale 1) law."""
    if int(k) != k or k < 1:
        raise InvalidParameterError(f"gamma_lt needs an integer k >= 1, got {k}")
    k = int(k)

    def mixed_poisson(lam, n):
        return _nb_pmf(1.0 / k, 1.0 / (1.0 + lam), n)

    return LaplaceTransformObj(
        func=lambda s: (1.0 + s) ** (-1.0 / k),
        inverse=lambda v: v ** (-float(k)) - 1.0,
        descriptor=D.make("gamma_lt", k=k),
        mixed_poisson=mixed_poisson,
    )


def exp_lt(c: float = 1.0) -> LaplaceTransformObj:
    """LT ``exp(-c s)`` of the point mass at c > 0."""
    if not c > 0:
        raise InvalidParameterError(f"exp_lt needs c > 0, got {c}")

    def mixed_poisson(lam, n):
        m = np.arange(n)
        return np.exp(m * math.log(lam * c) - lam * c - special.gammaln(m + 1)) if lam > 0 else (m == 0).astype(float)

    return LaplaceTransformObj(
        func=lambda s: np.exp(-c * s),
        inverse=lambda v: -np.log(v) / c,
        descriptor=D.make("exp_lt", c=c),
        mixed_poisson=mixed_poisson,
    )


# -- PGFs --------------------------------------------------------------------


def _harris_series(a: float, k: int, n_max: int) -> np.ndarray:
    # s * a**(-1/k) * (1 - ((a-1)/a) s**k)**(-1/k), expanded binomially
    c = np.zeros(n_max + 1)
    if n_max < 1:
        return c
    n_terms = (n_max - 1) // k + 1
    c[1::k] = _nb_pmf(1.0 / k, 1.0 / a, n_terms)
    return c


def harris_pgf(params: HarrisParams) -> ProbGenFnObj:
    a, k = params.a, params.k
    return ProbGenFnObj(
        func=lambda s: s * (a - (a - 1.0) * s**k) ** (-1.0 / k),
        support_step=k,
        descriptor=D.make("harris", a=a, k=k),
        series=lambda n_max: _harris_series(a, k, n_max),
    )


def geometric_pgf(p: float) -> ProbGenFnObj:
    """PGF of the geometric law on {1, 2, ...}."""
    if not 0 < p < 1:
        raise InvalidParameterError(f"geometric p must lie in (0, 1), got {p}")

    def series(n_max):
        c = np.zeros(n_max + 1)
        n = np.arange(1, n_max + 1)
        c[1:] = p * (1 - p) ** (n - 1)
        return c

    return ProbGenFnObj(
        func=lambda s: p * s / (1.0 - (1.0 - p) * s),
        support_step=1,
        descriptor=D.make("geometric", p=p),
        series=series,
    )


def negative_binomial_pgf(r: float, q: float) -> ProbGenFnObj:
    if not r > 0 or not 0 < q < 1:
        raise InvalidParameterError(f"negative binomial needs r > 0 and 0 < q < 1, got r={r}, q={q}")
    return ProbGenFnObj(
        func=lambda s: (q / (1.0 - (1.0 - q) * s)) ** r,
        support_step=1,
        descriptor=D.make("negbin", r=r, q=q),
        series=lambda n_max: _nb_pmf(r, q, n_max + 1),
    )


def point_pgf(n: int) -> ProbGenFnObj:
    """PGF s**n of a count fixed at n."""

    def series(n_max):
        c = np.zeros(n_max + 1)
        if n <= n_max:
            c[n] = 1.0
        return c

    return ProbGenFnObj(func=lambda s: s**n, support_step=1, descriptor=D.make("point", c=n), series=series)


def semigroup_pgf(phi: LaplaceTransformObj, theta: float) -> ProbGenFnObj:
    """``phi(phi^{-1}(s) / theta)``; s = 0 is taken as the limit phi(inf) = 0."""
    if not theta > 0:
        raise InvalidParameterError(f"theta must be > 0, got {theta}")

    def func(s):
        safe = np.where(s > 0, s, 1.0)
        return np.where(s > 0, phi(phi.inv(safe) / theta), 0.0)

    series = None
    tag = phi.descriptor.tag
    if tag == "gamma_lt":
        k = int(phi.descriptor["k"])
        # (1 + (s**-k - 1)/theta)**(-1/k) = theta**(1/k) s (1 - (1-theta) s**k)**(-1/k)

        def series(n_max):
            c = np.zeros(n_max + 1)
            if n_max < 1:
                return c
            n_terms = (n_max - 1) // k + 1
            m = np.arange(n_terms)
            r = 1.0 / k
            ratios = np.concatenate([[1.0], (r + m[1:] - 1) / m[1:] * (1.0 - theta)])
            c[1::k] = theta**r * np.cumprod(ratios)
            return c

    elif tag == "exp_lt":
        # exp(log(s) / theta) = s**(1/theta); a series only for integer 1/theta
        power = 1.0 / theta
        if abs(power - round(power)) < 1e-12:
            series = point_pgf(int(round(power))).series

    return ProbGenFnObj(
        func=func,
        support_step=int(phi.descriptor["k"]) if tag == "gamma_lt" else 1,
        descriptor=D.make("semigroup", phi=phi.descriptor, theta=theta),
        series=series,
    )


def lemma41_pgf(phi: LaplaceTransformObj, theta: float, j: int, k: int) -> ProbGenFnObj:
    """``s**j * phi((1 - s**k) / theta)``: j plus k times a phi-mixed Poisson."""
    if not theta > 0:
        raise InvalidParameterError(f"theta must be > 0, got {theta}")
    if int(j) != j or j < 0:
        raise InvalidParameterError(f"j must be an integer >= 0, got {j}")
    if int(k) != k or k < 1:
        raise InvalidParameterError(f"k must be an integer >= 1, got {k}")
    j, k = int(j), int(k)

    series = None
    if phi.mixed_poisson is not None:

        def series(n_max):
            c = np.zeros(n_max + 1)
            if n_max < j:
                return c
            n_terms = (n_max - j) // k + 1
            c[j::k] = phi.mixed_poisson(1.0 / theta, n_terms)
            return c

    return ProbGenFnObj(
        func=lambda s: s**j * phi((1.0 - s**k) / theta),
        support_step=k,
        descriptor=D.make("lemma41", phi=phi.descriptor, theta=theta, j=j, k=k),
        series=series,
    )


# -- coefficient extraction --------------------------------------------------


def finite_difference_coefficients(pgf: ProbGenFnObj, n_max: int, levels: int = 3) -> np.ndarray:
    """Taylor coefficients at 0 from forward differences on [0, 1].

    Newton forward differences with step h give the n-th coefficient to
    O(h); ``levels`` rounds of Richardson extrapolation over h, h/2, ...
    cancel the leading error terms.  Conditioning degrades quickly with the
    order, so this is capped at ``FINITE_DIFF_MAX_ORDER``.
    """
    if n_max > FINITE_DIFF_MAX_ORDER:
        raise UnsupportedError(f"finite differencing limited to n_max <= {FINITE_DIFF_MAX_ORDER}")

    def diffs(h):
        row = np.asarray(pgf(h * np.arange(n_max + 1)), dtype=float)
        d = np.zeros(n_max + 1)
        for n in range(n_max + 1):
            d[n] = row[0] / (math.factorial(n) * h**n)
            row = np.diff(row)
        return d

    h = 0.5 / max(n_max, 1)
    table = [diffs(h / 2**i) for i in range(levels)]
    for lev in range(1, levels):
        table = [(2**lev * table[i + 1] - table[i]) / (2**lev - 1) for i in range(len(table) - 1)]
    return table[0]


def contour_coefficients(pgf: ProbGenFnObj, n_max: int, radius: float = 0.5, points: int = 256) -> Optional[np.ndarray]:
    """Taylor coefficients by the trapezoidal Cauchy integral on |s| = radius.

    Needs ``pgf.func`` to accept complex arguments and be analytic in the
    disc.  The integral is repeated with twice the nodes and ``None`` is
    returned when the two disagree (branch points, non-analytic input).
    """

    def attempt(m):
        z = radius * np.exp(2j * np.pi * np.arange(m) / m)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("error", np.exceptions.ComplexWarning)
                with np.errstate(all="ignore"):
                    vals = np.asarray(pgf.func(z), dtype=complex)
        except (TypeError, ValueError, ArithmeticError, Warning):
            return None
        if vals.shape != z.shape or not np.all(np.isfinite(vals)):
            return None
        return np.fft.fft(vals) / m / radius ** np.arange(m)

    c1, c2 = attempt(points), attempt(2 * points)
    if c1 is None or c2 is None:
        return None
    # compare the unscaled transforms to keep radius**-n out of the tolerance
    half = points // 2
    scale = radius ** np.arange(half)
    if np.max(np.abs((c1[:half] - c2[:half]) * scale)) > CONTOUR_AGREEMENT:
        return None
    if np.max(np.abs(c2[: n_max + 1].imag)) > CONTOUR_AGREEMENT:
        return None
    # the series must reproduce the function on the real line
    s = np.linspace(0.0, 0.8 * radius, 9)
    with np.errstate(all="ignore"):
        direct = np.asarray(pgf.func(s), dtype=float)
    recon = np.polynomial.polynomial.polyval(s, c2[:half].real)
    if not np.all(np.abs(recon - direct) < 1e-9):
        return None
    return c2[: n_max + 1].real


def pgf_coefficients(pgf: ProbGenFnObj, n_max: int) -> TruncatedSeries:
    """P(N = i) for i = 0..n_max, validated as a sub-probability vector."""
    if n_max < 0:
        raise InvalidParameterError("n_max must be >= 0")
    if pgf.series is not None:
        coefs = np.asarray(pgf.series(n_max), dtype=float)
    else:
        if n_max > FINITE_DIFF_MAX_ORDER:
            raise UnsupportedError(f"{pgf.descriptor}: no series recipe; generic extraction limited to n_max <= {FINITE_DIFF_MAX_ORDER}")
        coefs = contour_coefficients(pgf, n_max)
        if coefs is None:
            coefs = finite_difference_coefficients(pgf, n_max)
    if coefs.size and coefs.min() < -NEG_TOL:
        i = int(np.argmin(coefs))
        raise InvalidPGFError(f"{pgf.descriptor}: coefficient {i} is {coefs[i]:.3e} < 0", coefs)
    if coefs.sum() > 1 + MASS_TOL:
        raise InvalidPGFError(f"{pgf.descriptor}: coefficient mass {coefs.sum():.12f} exceeds 1", coefs)
    return TruncatedSeries(coefs)


@dataclass(frozen=True)
class PGFCertificate:
    descriptor: str
    n_max: int
    valid: bool
    min_coefficient: float
    mass: float
    notes: str = ""


def certify_pgf(pgf: ProbGenFnObj, n_max: int) -> PGFCertificate:
    """Spot-certify a candidate PGF by coefficient nonnegativity up to n_max."""
    try:
        series = pgf_coefficients(pgf, n_max)
    except InvalidPGFError as exc:
        c = exc.coefficients
        return PGFCertificate(str(pgf.descriptor), n_max, False, float(c.min()), float(c.sum()), str(exc))
    c = series.coefficients
    return PGFCertificate(str(pgf.descriptor), n_max, True, float(c.min()), float(c.sum()))


def coefficients_to_mass(pgf: ProbGenFnObj, mass: float = 1 - 1e-8, n_cap: int = 10**6) -> TruncatedSeries:
    """Grow the truncation order until the coefficients carry ``mass``."""
    n = 64
    while True:
        series = pgf_coefficients(pgf, n)
        if series.total() >= mass:
            return series
        if n >= n_cap:
            raise TruncationError(f"{pgf.descriptor}: mass {series.total():.3e} short of {mass} at n_max={n}")
        n = min(2 * n, n_cap)
