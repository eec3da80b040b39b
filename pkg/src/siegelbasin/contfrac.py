"""Continued fractions of rotation numbers, Kronecker-sequence discrepancy,
the quadrature error bound driven by it, and the index functions n0(x), l(x).

All convergent arithmetic is exact (Python integers).  Rotation numbers are
never expanded from a bare double: inputs are quadratic surds (p+q*sqrt(d))/r
or explicit partial-quotient lists; a list is interpreted as the purely
periodic continued fraction it generates, which is itself a quadratic surd.
Convergents are 1-indexed: p1/q1 = 1/a1.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import InvalidArgument, NeedMoreQuotients, RationalRotation

# Extra bits used when comparing a surd against rationals.
_SQRT_PREC_BITS = 256


@dataclass(frozen=True)
class Surd:
    """(p + q*sqrt(d)) / r with integer p, q, d, r; d > 0 not a perfect square."""

    p: int
    q: int
    d: int
    r: int

    def __post_init__(self):
        if self.r == 0:
            raise InvalidArgument("surd denominator r must be nonzero")
        if self.d <= 0:
            raise RationalRotation("sqrt argument must be positive")
        s = math.isqrt(self.d)
        if s * s == self.d:
            raise RationalRotation("d is a perfect square: the surd is rational")
        if self.q == 0:
            raise RationalRotation("q = 0: the surd is rational")

    def value_fraction(self, bits: int = _SQRT_PREC_BITS) -> Fraction:
        """Rational approximation with error below 2**-(bits//2)."""
        scale = 1 << bits
        root = Fraction(math.isqrt(self.d * scale * scale), scale)
        return (self.p + self.q * root) / self.r

    def __float__(self) -> float:
        return float(self.value_fraction())


_SURD_RE = re.compile(
    r"^\(\s*(-?\d+)\s*([+-])\s*(\d+)\s*\*\s*sqrt\(\s*(\d+)\s*\)\s*\)\s*/\s*(-?\d+)$"
)


def parse_surd(text: str) -> Surd:
    """Parse the CLI syntax "(p+q*sqrt(d))/r"."""
    t = text.replace("−", "-").strip()
    m = _SURD_RE.match(t)
    if m is None:
        raise InvalidArgument(f"cannot parse surd {text!r}; expected (p+q*sqrt(d))/r")
    p, sign, q, d, r = m.groups()
    qv = int(q) if sign == "+" else -int(q)
    return Surd(int(p), qv, int(d), int(r))


def _surd_cf_quotients(s: Surd, count: int) -> List[int]:
    """First `count` partial quotients of s in (0,1), exactly.

    Runs the classical (P + sqrt(D))/Q recursion with Q dividing D - P*P.
    The leading quotient floor(s) = 0 is consumed and not returned.
    """
    # Normalise to (P + sqrt(D))/Q, absorbing the sign of q into P and Q.
    # The recursion below tolerates Q < 0 as long as Q divides D - P*P.
    if s.q > 0:
        P, D, Q = s.p, s.q * s.q * s.d, s.r
    else:
        P, D, Q = -s.p, s.q * s.q * s.d, -s.r
    if (D - P * P) % Q != 0:
        P, D, Q = P * abs(Q), D * Q * Q, Q * abs(Q)
    sqrtD = math.isqrt(D)

    def floor_div(pp: int, qq: int) -> int:
        # floor((pp + sqrt(D)) / qq); sqrt(D) is irrational.
        if qq > 0:
            return (pp + sqrtD) // qq
        return (-pp - sqrtD - 1) // (-qq)

    a0 = floor_div(P, Q)
    if a0 != 0:
        raise InvalidArgument("surd does not lie in (0,1)")
    # One step of the recursion to pass to the reciprocal of the fractional part.
    quotients: List[int] = []
    P = a0 * Q - P
    Q = (D - P * P) // Q
    for _ in range(count):
        a = floor_div(P, Q)
        quotients.append(a)
        P = a * Q - P
        Q = (D - P * P) // Q
    return quotients


def _periodic_list_surd(quotients: Sequence[int]) -> Surd:
    """Quadratic surd whose CF is the purely periodic [0; a1..aK, a1..aK, ...]."""
    p_prev, q_prev = 1, 0  # p_0, q_0 in the 1-indexed convention below
    p_cur, q_cur = 0, 1
    for a in quotients:
        p_cur, p_prev = a * p_cur + p_prev, p_cur
        q_cur, q_prev = a * q_cur + q_prev, q_cur
    # alpha = (pK * (1/alpha) + p_{K-1}) / (qK * (1/alpha) + q_{K-1})
    # => q_{K-1} alpha^2 + (qK - p_{K-1}) alpha - pK = 0
    A, B, C = q_prev, q_cur - p_prev, -p_cur
    disc = B * B - 4 * A * C
    return Surd(-B, 1, disc, 2 * A)


@dataclass(frozen=True)
class RotationNumber:
    """An irrational alpha0 in (0,1) with its partial quotients and convergents."""

    source: Union[Surd, Tuple[int, ...]]
    partial_quotients: Tuple[int, ...]
    convergents: Tuple[Tuple[int, int], ...]  # (p_n, q_n), 1-indexed via [n-1]
    alpha_f64: float
    surd: Surd = field(repr=False, default=None)

    @property
    def K(self) -> int:
        return len(self.partial_quotients)

    def p(self, n: int) -> int:
        return self.convergents[n - 1][0]

    def q(self, n: int) -> int:
        return self.convergents[n - 1][1]

    @property
    def lambda0(self) -> complex:
        return complex(np.exp(2j * np.pi * self.alpha_f64))

    def alpha_fraction(self, bits: int = _SQRT_PREC_BITS) -> Fraction:
        return self.surd.value_fraction(bits)


def cf_expand(source: Union[str, Surd, Sequence[int]], K: int) -> RotationNumber:
    """Expand a rotation-number descriptor into K quotients and convergents.

    `source` is a Surd (or its string syntax) or an explicit quotient list;
    a list shorter than K is continued periodically.
    """
    if K < 2:
        raise InvalidArgument("K must be at least 2")
    if isinstance(source, str):
        text = source.strip()
        if text.startswith("["):
            if not text.endswith("]"):
                raise InvalidArgument(f"cannot parse quotient list {source!r}")
            try:
                source = [int(tok) for tok in text[1:-1].split(",") if tok.strip()]
            except ValueError:
                raise InvalidArgument(f"cannot parse quotient list {source!r}")
        else:
            source = parse_surd(source)
    if isinstance(source, Surd):
        surd = source
        quotients = _surd_cf_quotients(surd, K)
        src: Union[Surd, Tuple[int, ...]] = surd
    else:
        qs = tuple(int(a) for a in source)
        if not qs or any(a < 1 for a in qs):
            raise InvalidArgument("quotient list must be nonempty positive integers")
        surd = _periodic_list_surd(qs)
        quotients = [qs[i % len(qs)] for i in range(K)]
        src = qs
    if any(a < 1 for a in quotients):
        raise RationalRotation("continued fraction terminated before K quotients")

    convergents: List[Tuple[int, int]] = []
    p_prev, q_prev = 1, 0
    p_cur, q_cur = 0, 1
    for a in quotients:
        p_cur, p_prev = a * p_cur + p_prev, p_cur
        q_cur, q_prev = a * q_cur + q_prev, q_cur
        convergents.append((p_cur, q_cur))

    alpha = float(surd)
    rot = RotationNumber(src, tuple(quotients), tuple(convergents), alpha, surd)
    _check_invariants(rot)
    return rot


def _check_invariants(rot: RotationNumber) -> None:
    conv = rot.convergents
    for n in range(2, len(conv) + 1):
        p_n, q_n = conv[n - 1]
        p_m, q_m = conv[n - 2]
        if q_n <= q_m and n > 2:
            raise InvalidArgument(f"q_n not increasing at n={n}")
        det = p_n * q_m - p_m * q_n
        if det != -((-1) ** n):
            raise InvalidArgument(f"determinant identity broken at n={n}")
        if math.gcd(p_n, q_n) != 1:
            raise InvalidArgument(f"gcd(p_n,q_n) != 1 at n={n}")
    alpha = rot.alpha_fraction()
    # alpha is known to ~2^-(PREC_BITS) * q/r; this margin dominates that
    # error yet stays far below any 1/(q_n q_{n+1}) reachable in practice
    margin = Fraction(1, 1 << (_SQRT_PREC_BITS - 32))
    for n in range(1, len(conv)):
        p_n, q_n = conv[n - 1]
        q_next = conv[n][1]
        gap = abs(alpha - Fraction(p_n, q_n))
        if gap >= Fraction(1, q_n * q_next) - margin:
            raise InvalidArgument(f"approximation inequality broken at n={n}")


def ell_of_x(rot: RotationNumber, x: float) -> Tuple[int, int]:
    """Minimal n0 with 2 q_n q_{n+1} / (q_n + q_{n+1}) >= x, and l = q_{n0}."""
    if x <= 0:
        raise InvalidArgument("x must be positive")
    best = 0.0
    for n in range(1, rot.K):
        qn, qnext = rot.q(n), rot.q(n + 1)
        hm = 2 * qn * qnext / (qn + qnext)
        best = max(best, hm)
        if hm >= x:
            return n, qn
    raise NeedMoreQuotients(
        f"harmonic means reach only {best:.6g} < {x:.6g}", max_harmonic_mean=best
    )


def kronecker_points(rot: RotationNumber, beta: float, N: int) -> np.ndarray:
    """x_n = frac(alpha0 * n + beta), n = 0..N-1."""
    if N < 1:
        raise InvalidArgument("N must be >= 1")
    n = np.arange(N, dtype=float)
    return np.mod(rot.alpha_f64 * n + beta, 1.0)


def star_discrepancy_points(points: np.ndarray) -> float:
    """Exact sup over [0,1] of |F(x) - x| for F(x) = #{x_n < x}/N.

    F is a step function; the sup is attained (as a one-sided limit) at a
    jump point, so the finite candidate set below is exhaustive.
    """
    pts = np.sort(np.asarray(points, dtype=float))
    N = pts.size
    if N < 1:
        raise InvalidArgument("empty point set")
    i = np.arange(1, N + 1)
    up = np.max(i / N - pts)        # right limit at each jump
    down = np.max(pts - (i - 1) / N)  # value at each jump
    return float(max(up, down, 0.0))


@dataclass(frozen=True)
class DiscrepancyReport:
    alpha: RotationNumber
    beta: float
    N: int
    Q_exact: float
    Q_upper: float
    bound_prop31: Optional[float]


def _prop31_index(rot: RotationNumber, N: int) -> Optional[int]:
    for n in range(1, rot.K):
        if rot.q(n) == N:
            return n
    return None


def beta_prop31(rot: RotationNumber, n: int) -> float:
    """The offset beta0 = (1/q_n - (-1)^n gamma)/2 with
    gamma strictly between q_n*|alpha - p_n/q_n| and 1/q_{n+1}."""
    alpha = rot.alpha_fraction()
    p_n, q_n = rot.convergents[n - 1]
    q_next = rot.q(n + 1)
    lo = q_n * abs(alpha - Fraction(p_n, q_n))
    hi = Fraction(1, q_next)
    gamma = (lo + hi) / 2
    return float((Fraction(1, q_n) - (-1) ** n * gamma) / 2)


def star_discrepancy(rot: RotationNumber, beta: float, N: int) -> DiscrepancyReport:
    """Exact star discrepancy of the Kronecker sequence with offset beta."""
    q_exact = star_discrepancy_points(kronecker_points(rot, beta, N))
    n = _prop31_index(rot, N)
    bound = None
    if n is not None:
        bound = 0.5 * (1.0 / rot.q(n) + 1.0 / rot.q(n + 1))
    return DiscrepancyReport(rot, beta, N, q_exact, q_exact, bound)


def QN_upper(rot: RotationNumber, N: int, grid: int = 64) -> float:
    """Certified upper bound for Q_N = inf_beta Q_{beta,N}.

    Each candidate offset is scored with the exact Q_{beta,N}, so the minimum
    is a true upper bound for the infimum.  When N = q_n the candidate set
    includes the offset from the discrepancy proposition, which guarantees
    Q < (1/q_n + 1/q_{n+1})/2.
    """
    if N < 1 or grid < 1:
        raise InvalidArgument("N and grid must be >= 1")
    betas = [(k + 0.5) / grid for k in range(grid)]
    n = _prop31_index(rot, N)
    if n is not None:
        betas.append(beta_prop31(rot, n))
    return min(
        star_discrepancy_points(kronecker_points(rot, b, N)) for b in betas
    )


def koksma_gap(
    phi_nodes: Sequence[float],
    phi: Callable[[np.ndarray], np.ndarray],
    variation: float,
    quad_points: int = 1 << 14,
) -> Tuple[float, float]:
    """Both sides of the quadrature bound |int phi - mean phi(x_n)| < Q * Var.

    `variation` is int_0^1 |phi'| supplied by the caller; the integral of phi
    is computed internally by composite Simpson on a fine uniform grid.
    """
    nodes = np.asarray(phi_nodes, dtype=float)
    if nodes.size == 0:
        raise InvalidArgument("empty node list")
    xs = np.linspace(0.0, 1.0, quad_points + 1)
    ys = np.asarray(phi(xs), dtype=float)
    h = 1.0 / quad_points
    integral = h / 3.0 * (
        ys[0] + ys[-1] + 4.0 * ys[1:-1:2].sum() + 2.0 * ys[2:-1:2].sum()
    )
    mean = float(np.mean(np.asarray(phi(nodes), dtype=float)))
    lhs = abs(integral - mean)
    rhs = star_discrepancy_points(nodes) * variation
    return lhs, rhs
