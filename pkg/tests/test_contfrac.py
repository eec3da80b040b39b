"""Continued fractions, convergents, and Kronecker-sequence discrepancy."""

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegelbasin.contfrac import (
    QN_upper,
    Surd,
    beta_prop31,
    cf_expand,
    ell_of_x,
    koksma_gap,
    kronecker_points,
    parse_surd,
    star_discrepancy,
    star_discrepancy_points,
)
from siegelbasin.errors import (
    InvalidArgument,
    NeedMoreQuotients,
    RationalRotation,
)

GOLDEN = "(-1+1*sqrt(5))/2"


def test_parse_surd_golden():
    s = parse_surd(GOLDEN)
    assert (s.p, s.q, s.d, s.r) == (-1, 1, 5, 2)
    assert abs(float(s) - (math.sqrt(5) - 1) / 2) < 1e-15


def test_parse_surd_rejects_garbage():
    for bad in ("", "sqrt(5)", "(1+sqrt(5))/2", "(1+2*sqrt(5))"):
        with pytest.raises(InvalidArgument):
            parse_surd(bad)


def test_perfect_square_is_rational():
    with pytest.raises(RationalRotation):
        Surd(1, 1, 9, 8)


def test_golden_quotients_all_one():
    rot = cf_expand(GOLDEN, 25)
    assert rot.partial_quotients == (1,) * 25
    # Fibonacci convergents
    assert rot.convergents[:5] == ((1, 1), (1, 2), (2, 3), (3, 5), (5, 8))


def test_sqrt2_minus_1_quotients():
    # sqrt(2) - 1 = [2, 2, 2, ...]
    rot = cf_expand("(-1+1*sqrt(2))/1", 12)
    assert rot.partial_quotients == (2,) * 12


def test_quotient_list_string_syntax():
    rot = cf_expand("[1,2]", 8)
    assert rot.partial_quotients == (1, 2, 1, 2, 1, 2, 1, 2)
    # alpha = [1,2,1,2,...] satisfies 2a^2 + 2a - 2 = 0 ... check numerically
    a = rot.alpha_f64
    assert abs(1 / (1 + 1 / (2 + a)) - a) < 1e-14


def test_quotient_list_periodic_surd_consistency():
    rot = cf_expand([3, 1, 2], 18)
    alpha = rot.alpha_fraction()
    for n in range(1, 18):
        p_n, q_n = rot.convergents[n - 1]
        assert abs(alpha - Fraction(p_n, q_n)) < Fraction(1, q_n * rot.q(n + 1))


@given(st.lists(st.integers(min_value=1, max_value=30), min_size=1, max_size=6))
@settings(max_examples=60, deadline=None)
def test_invariants_random_periodic(quots):
    rot = cf_expand(quots, 12)  # cf_expand re-checks all invariants itself
    for n in range(2, 13):
        det = rot.p(n) * rot.q(n - 1) - rot.p(n - 1) * rot.q(n)
        assert det == (-1) ** (n - 1)
        assert math.gcd(rot.p(n), rot.q(n)) == 1


def test_ell_of_x():
    rot = cf_expand(GOLDEN, 20)
    n0, ell = ell_of_x(rot, 1.0)
    assert (n0, ell) == (1, 1)
    # harmonic mean of (q_3, q_4) = 2*3*5/8 = 3.75
    n0, ell = ell_of_x(rot, 3.7)
    assert (n0, ell) == (3, 3)
    n0, ell = ell_of_x(rot, 3.8)
    assert (n0, ell) == (4, 5)
    with pytest.raises(NeedMoreQuotients):
        ell_of_x(rot, 1e9)
    with pytest.raises(InvalidArgument):
        ell_of_x(rot, 0.0)


def test_star_discrepancy_exact_small_cases():
    # centered uniform grid: Q = 1/(2N)
    for N in (1, 4, 10):
        pts = (np.arange(N) + 0.5) / N
        assert abs(star_discrepancy_points(pts) - 0.5 / N) < 1e-15
    assert star_discrepancy_points(np.array([0.0])) == 1.0


@given(st.lists(st.floats(min_value=0.0, max_value=0.999999),
                min_size=1, max_size=50))
@settings(max_examples=100, deadline=None)
def test_star_discrepancy_matches_brute_force(pts):
    pts = np.array(pts)
    q = star_discrepancy_points(pts)
    xs = np.linspace(0, 1, 2001)
    counts = np.array([(pts < x).sum() for x in xs]) / pts.size
    assert q >= np.max(np.abs(counts - xs)) - 1e-12
    assert 0 <= q <= 1


def test_prop31_offset_beats_the_bound():
    rot = cf_expand(GOLDEN, 18)
    for n in range(1, 12):
        N = rot.q(n)
        rep = star_discrepancy(rot, beta_prop31(rot, n), N)
        assert rep.bound_prop31 is not None
        assert rep.Q_exact < rep.bound_prop31


def test_QN_upper_is_an_upper_bound():
    rot = cf_expand(GOLDEN, 18)
    for N in (5, 13, 55):
        ub = QN_upper(rot, N, grid=32)
        # exact Q at any single beta dominates the infimum
        assert ub <= star_discrepancy(rot, 0.0, N).Q_exact + 1e-15
        assert ub > 0


def test_koksma_gap_bounds_quadrature_error():
    rot = cf_expand(GOLDEN, 25)
    rng = np.random.default_rng(7)
    a, b = rng.normal(size=3), rng.normal(size=3)

    def phi(x):
        out = np.zeros_like(x)
        for j in range(3):
            out += a[j] * np.cos(2 * np.pi * (j + 1) * x)
            out += b[j] * np.sin(2 * np.pi * (j + 1) * x)
        return out

    xs = np.linspace(0, 1, 1 << 14 | 1)
    dphi = np.gradient(phi(xs), xs)
    var = float(np.trapezoid(np.abs(dphi), xs)) * (1 + 1e-6)
    for N in (10, 100):
        nodes = kronecker_points(rot, 0.3, N)
        lhs, rhs = koksma_gap(nodes, phi, var)
        assert lhs < rhs
