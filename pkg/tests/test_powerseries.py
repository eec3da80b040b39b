"""Truncated power series: ring operations, composition, reversion."""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegelbasin.errors import NonzeroConstantTerm, NotInvertible
from siegelbasin.powerseries import (
    TruncatedSeries,
    ps_compose,
    ps_eval_derivs,
    ps_reverse,
)


def _series(order, rng, decay=0.3, unit_linear=True):
    c = (rng.normal(size=order + 1) + 1j * rng.normal(size=order + 1))
    c *= decay ** np.arange(order + 1)
    c[0] = 0.0
    if unit_linear:
        c[1] = 1.0 + 0.3j
    return TruncatedSeries.from_coeffs(c)


def test_identity_and_eval():
    s = TruncatedSeries.identity(5)
    xi = np.array([0.1 + 0.2j, -0.3j])
    assert np.allclose(s.eval(xi), xi)


def test_mul_matches_polynomial_product():
    a = TruncatedSeries.from_coeffs([0, 1, 2, 3])
    b = TruncatedSeries.from_coeffs([0, 1, -1, 0])
    prod = a * b
    # (x + 2x^2 + 3x^3)(x - x^2) truncated at order 3 = x^2 + x^3
    assert np.allclose(prod.coeffs, [0, 0, 1, 1])


@given(st.integers(min_value=2, max_value=12), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=40, deadline=None)
def test_ring_distributivity(order, seed):
    rng = np.random.default_rng(seed)
    a, b, c = (_series(order, rng, unit_linear=False) for _ in range(3))
    lhs = a * (b + c)
    rhs = a * b + a * c
    assert np.allclose(lhs.coeffs, rhs.coeffs, atol=1e-12)


@given(st.integers(min_value=2, max_value=10), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=30, deadline=None)
def test_compose_with_identity(order, seed):
    rng = np.random.default_rng(seed)
    s = _series(order, rng)
    ident = TruncatedSeries.identity(order)
    assert np.allclose(ps_compose(s, ident).coeffs, s.coeffs, atol=1e-12)
    assert np.allclose(ps_compose(ident, s).coeffs, s.coeffs, atol=1e-12)


def test_compose_requires_zero_constant_term():
    s = TruncatedSeries.from_coeffs([0, 1, 1])
    t = TruncatedSeries.from_coeffs([0.5, 1, 0])
    with pytest.raises(NonzeroConstantTerm):
        ps_compose(s, t)


def test_derivative_product_rule():
    rng = np.random.default_rng(3)
    a, b = _series(8, rng), _series(8, rng)
    lhs = (a * b).derivative()
    rhs = a.derivative() * b + a * b.derivative()
    assert np.allclose(lhs.coeffs[:8], rhs.coeffs[:8], atol=1e-12)


@given(st.integers(min_value=2, max_value=16), st.integers(min_value=0, max_value=2**32 - 1))
@settings(max_examples=60, deadline=None)
def test_reversion_round_trip(order, seed):
    rng = np.random.default_rng(seed)
    s = _series(order, rng)
    t = ps_reverse(s)
    both = ps_compose(s, t)
    resid = both.coeffs - TruncatedSeries.identity(order).coeffs
    assert np.max(np.abs(resid)) < 1e-10


def test_reversion_known_closed_form():
    # s = x/(1-x) truncated; inverse is x/(1+x)
    order = 12
    s = TruncatedSeries.from_coeffs(np.r_[0.0, np.ones(order)])
    t = ps_reverse(s)
    expect = np.r_[0.0, [(-1.0) ** (k - 1) for k in range(1, order + 1)]]
    assert np.allclose(t.coeffs, expect, atol=1e-12)


def test_reversion_needs_nonzero_linear_term():
    with pytest.raises(NotInvertible):
        ps_reverse(TruncatedSeries.from_coeffs([0, 0, 1]))


def test_eval_derivs_against_finite_difference():
    rng = np.random.default_rng(11)
    s = _series(10, rng)
    xi = np.array([0.2 + 0.1j])
    v, d1, d2 = ps_eval_derivs(s, xi, 2)
    h = 1e-6
    fd1 = (s.eval(xi + h) - s.eval(xi - h)) / (2 * h)
    fd2 = (s.eval(xi + h) - 2 * v + s.eval(xi - h)) / h**2
    assert abs(d1[0] - fd1[0]) < 1e-8
    assert abs(d2[0] - fd2[0]) < 1e-4
