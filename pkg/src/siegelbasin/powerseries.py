"""Truncated complex power-series algebra: the substrate for the linearizer.

A series is a coefficient vector c0..cM over complex128.  All operations
truncate at the order of the result; nothing here tracks truncation error.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .errors import InvalidArgument, NonzeroConstantTerm, NotInvertible


@dataclass(frozen=True)
class TruncatedSeries:
    coeffs: np.ndarray  # complex128, length order+1
    order: int

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if self.order < 1 or c.shape != (self.order + 1,):
            raise InvalidArgument("coeffs must have length order+1, order >= 1")
        if not np.all(np.isfinite(c.view(float))):
            raise InvalidArgument("series coefficients must be finite")
        object.__setattr__(self, "coeffs", c)

    @staticmethod
    def from_coeffs(coeffs, order: int = None) -> "TruncatedSeries":
        c = np.asarray(coeffs, dtype=complex)
        if order is None:
            order = len(c) - 1
        out = np.zeros(order + 1, dtype=complex)
        m = min(len(c), order + 1)
        out[:m] = c[:m]
        return TruncatedSeries(out, order)

    @staticmethod
    def identity(order: int) -> "TruncatedSeries":
        c = np.zeros(order + 1, dtype=complex)
        c[1] = 1.0
        return TruncatedSeries(c, order)

    def truncate(self, order: int) -> "TruncatedSeries":
        return TruncatedSeries.from_coeffs(self.coeffs, order)

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        m = min(self.order, other.order)
        return TruncatedSeries(self.coeffs[: m + 1] + other.coeffs[: m + 1], m)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        m = min(self.order, other.order)
        return TruncatedSeries(self.coeffs[: m + 1] - other.coeffs[: m + 1], m)

    def __mul__(self, other: Union["TruncatedSeries", complex]) -> "TruncatedSeries":
        if isinstance(other, TruncatedSeries):
            m = min(self.order, other.order)
            prod = np.convolve(self.coeffs[: m + 1], other.coeffs[: m + 1])[: m + 1]
            return TruncatedSeries(prod, m)
        return TruncatedSeries(self.coeffs * complex(other), self.order)

    __rmul__ = __mul__

    def derivative(self) -> "TruncatedSeries":
        k = np.arange(1, self.order + 1)
        c = np.zeros(self.order + 1, dtype=complex)
        c[: self.order] = self.coeffs[1:] * k
        return TruncatedSeries(c, self.order)

    def eval(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=complex)
        out = np.full_like(xi, self.coeffs[-1])
        for c in self.coeffs[-2::-1]:
            out = out * xi + c
        return out


def ps_compose(outer: TruncatedSeries, inner: TruncatedSeries) -> TruncatedSeries:
    """Taylor coefficients of outer(inner(z)) through the common order."""
    if inner.coeffs[0] != 0:
        raise NonzeroConstantTerm("inner series must vanish at 0")
    m = min(outer.order, inner.order)
    o = outer.coeffs[: m + 1]
    acc = TruncatedSeries.from_coeffs([o[-1]], m)
    inner_m = inner.truncate(m)
    for c in o[-2::-1]:
        acc = acc * inner_m
        acc = TruncatedSeries(acc.coeffs + np.concatenate(([c], np.zeros(m, complex))), m)
    return acc


def ps_reverse(s: TruncatedSeries) -> TruncatedSeries:
    """Compositional inverse t with s(t(z)) = z + O(z^{M+1}).

    Newton iteration on series: t <- t - (s(t) - id)/(s'(t)), doubling the
    trusted order each step.
    """
    if s.coeffs[0] != 0:
        raise NonzeroConstantTerm("series must vanish at 0")
    c1 = s.coeffs[1]
    if c1 == 0:
        raise NotInvertible("linear coefficient vanishes")
    M = s.order
    t = TruncatedSeries.from_coeffs([0.0, 1.0 / c1], M)
    ds = s.derivative()
    trusted = 1  # t is exact through this order
    while trusted < M:
        resid = ps_compose(s, t) - TruncatedSeries.identity(M)
        denom = ps_compose(ds, t)
        t = t - resid * _ps_reciprocal(denom)
        trusted = 2 * trusted + 1
    return t


def _ps_reciprocal(s: TruncatedSeries) -> TruncatedSeries:
    """1/s as a truncated series; requires s(0) != 0."""
    if s.coeffs[0] == 0:
        raise NotInvertible("constant term vanishes")
    M = s.order
    inv = np.zeros(M + 1, dtype=complex)
    inv[0] = 1.0 / s.coeffs[0]
    for m in range(1, M + 1):
        inv[m] = -np.dot(s.coeffs[1 : m + 1], inv[m - 1 :: -1][: m]) / s.coeffs[0]
    return TruncatedSeries(inv, M)


def ps_eval_derivs(s: TruncatedSeries, xi, k: int = 2) -> Tuple[np.ndarray, ...]:
    """Simultaneous Horner evaluation of s and its first k derivatives."""
    if not 0 <= k <= 2:
        raise InvalidArgument("k must be 0, 1 or 2")
    xi = np.asarray(xi, dtype=complex)
    v = np.full_like(xi, s.coeffs[-1])
    d1 = np.zeros_like(xi)
    d2 = np.zeros_like(xi)
    for c in s.coeffs[-2::-1]:
        d2 = d2 * xi + 2.0 * d1
        d1 = d1 * xi + v
        v = v * xi + c
    return (v, d1, d2)[: k + 1]
