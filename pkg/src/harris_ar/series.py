"""Truncated power series in one variable, coefficient of s**i at index i."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True, eq=False)
class TruncatedSeries:
    coefficients: np.ndarray

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=float)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)

    @classmethod
    def zeros(cls, n_max: int) -> "TruncatedSeries":
        return cls(np.zeros(n_max + 1))

    @classmethod
    def monomial(cls, power: int, n_max: int, coef: float = 1.0) -> "TruncatedSeries":
        c = np.zeros(n_max + 1)
        if power <= n_max:
            c[power] = coef
        return cls(c)

    @property
    def n_max(self) -> int:
        return len(self.coefficients) - 1

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, i):
        return self.coefficients[i]

    def __iter__(self):
        return iter(self.coefficients)

    def _coerce(self, other) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            return other
        return TruncatedSeries.monomial(0, self.n_max, float(other))

    def truncate(self, n_max: int) -> "TruncatedSeries":
        c = np.zeros(n_max + 1)
        m = min(n_max, self.n_max) + 1
        c[:m] = self.coefficients[:m]
        return TruncatedSeries(c)

    def __add__(self, other):
        other = self._coerce(other)
        n = min(self.n_max, other.n_max)
        return TruncatedSeries(self.coefficients[: n + 1] + other.coefficients[: n + 1])

    __radd__ = __add__

    def __neg__(self):
        return TruncatedSeries(-self.coefficients)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, TruncatedSeries):
            return TruncatedSeries(self.coefficients * float(other))
        n = min(self.n_max, other.n_max)
        prod = np.convolve(self.coefficients[: n + 1], other.coefficients[: n + 1])
        return TruncatedSeries(prod[: n + 1])

    __rmul__ = __mul__

    def shift(self, j: int) -> "TruncatedSeries":
        """Multiply by s**j, keeping the truncation order."""
        c = np.zeros_like(self.coefficients)
        if j <= self.n_max:
            c[j:] = self.coefficients[: self.n_max + 1 - j]
        return TruncatedSeries(c)

    def compose_power(self, k: int) -> "TruncatedSeries":
        """Substitute s -> s**k."""
        c = np.zeros_like(self.coefficients)
        idx = np.arange(0, self.n_max + 1, k)
        c[idx] = self.coefficients[: len(idx)]
        return TruncatedSeries(c)

    def power(self, alpha: float) -> "TruncatedSeries":
        """Raise to a real power; requires a nonzero constant term.

        Uses the J. C. P. Miller recurrence, which is the binomial series
        expanded term by term.
        """
        c = self.coefficients
        if c[0] == 0:
            raise ValueError("real power needs a nonzero constant term")
        n_max = self.n_max
        b = np.zeros(n_max + 1)
        b[0] = c[0] ** alpha
        for n in range(1, n_max + 1):
            j = np.arange(1, n + 1)
            b[n] = np.dot(((alpha + 1) * j - n) * c[1 : n + 1], b[n - j]) / (n * c[0])
        return TruncatedSeries(b)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """self(inner(s)) by Horner's rule; inner may have any constant term."""
        n = min(self.n_max, inner.n_max)
        inner = inner.truncate(n)
        acc = TruncatedSeries.monomial(0, n, self.coefficients[-1])
        for a in self.coefficients[-2::-1]:
            acc = acc * inner + a
        return acc

    def evaluate(self, s):
        return np.polynomial.polynomial.polyval(s, self.coefficients)

    def total(self) -> float:
        return float(self.coefficients.sum())

    def mean(self) -> float:
        return float(np.dot(np.arange(len(self.coefficients)), self.coefficients))

    def __repr__(self):
        return f"TruncatedSeries(n_max={self.n_max}, coefficients={self.coefficients!r})"
