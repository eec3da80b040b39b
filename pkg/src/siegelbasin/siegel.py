"""Siegel linearization of a polynomial map with an irrationally neutral
fixed point at 0.

The normalized linearizer psi_hat solves psi_hat(lambda0*xi) = f0(psi_hat(xi))
with psi_hat(0)=0, psi_hat'(0)=1, as a truncated series.  A truncated series
cannot see the full Siegel disk, so every computation runs on a validated
sub-disk of radius rho_w on which the conjugacy residual is below tol_conj;
a nominal radius r in (0,1) always means |xi| = r*rho_w here.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .contfrac import RotationNumber
from .errors import (
    DerivativeVanishes,
    InvalidArgument,
    InvalidMultiplier,
    LinearizationUnusable,
    NotInBasin,
    OutsideModel,
    SmallDivisorBreakdown,
)
from .powerseries import TruncatedSeries, ps_eval_derivs, ps_reverse

SMALL_DIVISOR_CUTOFF = 1e-13
_RESIDUAL_ANGLES = 256


def schroder_series(
    f0_coeffs: Sequence[complex], lambda0: complex, M: int
) -> Tuple[TruncatedSeries, float]:
    """Solve the conjugacy psi(lambda0 xi) = f0(psi(xi)) term by term.

    Matching the xi^m coefficient gives (lambda0^m - lambda0) c_m = (terms in
    c_2..c_{m-1}); returns the series and the smallest divisor encountered.
    """
    f0 = np.asarray(f0_coeffs, dtype=complex)
    if M < 2:
        raise InvalidArgument("M must be >= 2")
    if f0[0] != 0:
        raise InvalidArgument("f0 must fix the origin")
    if abs(f0[1] - lambda0) > 1e-12:
        raise InvalidArgument("linear coefficient of f0 must equal lambda0")
    c = np.zeros(M + 1, dtype=complex)
    c[1] = 1.0
    min_div = np.inf
    lam_pow = lambda0  # lambda0^m, updated in the loop
    for m in range(2, M + 1):
        lam_pow *= lambda0
        div = lam_pow - lambda0
        if abs(div) < SMALL_DIVISOR_CUTOFF:
            raise SmallDivisorBreakdown(
                f"|lambda0^{m} - lambda0| = {abs(div):.3e} below cutoff", m=m
            )
        min_div = min(min_div, abs(div))
        # coefficient of xi^m in the nonlinear part of f0 composed with psi_{<m}
        psi_m = c[:m]  # degrees 0..m-1; c_m enters only linearly via lambda0*c_m
        power = psi_m.copy()  # psi^k truncated at degree m
        rhs = 0.0 + 0.0j
        for k in range(2, len(f0)):
            power = np.convolve(power, psi_m)[: m + 1]
            if f0[k] != 0 and len(power) > m:
                rhs += f0[k] * power[m]
        c[m] = rhs / div
    return TruncatedSeries(c, M), float(min_div)


@dataclass(frozen=True)
class SiegelModel:
    lambda0: complex
    rot: RotationNumber
    psi_hat: TruncatedSeries
    rho_w: float
    tol_conj: float
    f0_coeffs: np.ndarray
    min_divisor: float = 0.0
    residual_table: Tuple[Tuple[float, float], ...] = ()
    psi_rev: TruncatedSeries = field(repr=False, default=None)

    def f0(self, z):
        return np.polyval(self.f0_coeffs[::-1], np.asarray(z, dtype=complex))

    def psi(self, xi):
        return self.psi_hat.eval(xi)


def conjugacy_residual(
    psi_hat: TruncatedSeries,
    f0_coeffs: np.ndarray,
    lambda0: complex,
    rho: float,
    angles: int = _RESIDUAL_ANGLES,
) -> float:
    xi = rho * np.exp(2j * np.pi * np.arange(angles) / angles)
    lhs = psi_hat.eval(lambda0 * xi)
    rhs = np.polyval(f0_coeffs[::-1], psi_hat.eval(xi))
    return float(np.max(np.abs(lhs - rhs)))


def working_radius(
    psi_hat: TruncatedSeries,
    f0_coeffs: np.ndarray,
    lambda0: complex,
    tol_conj: float,
    samples: int = 200,
) -> float:
    """Largest rho on a geometric grid with conjugacy residual <= tol_conj on
    |xi| = rho and psi_hat' nonvanishing on the sampled rho-disk."""
    if tol_conj <= 0:
        raise LinearizationUnusable("tol_conj must be positive")
    c = np.abs(psi_hat.coeffs)
    with np.errstate(divide="ignore"):
        ests = [c[m] ** (-1.0 / m) for m in range(2, psi_hat.order + 1) if c[m] > 0]
    rho_max = min(ests) if ests else 1.0
    grid = rho_max * 0.99 ** np.arange(samples)
    for rho in grid:
        if conjugacy_residual(psi_hat, f0_coeffs, lambda0, rho) > tol_conj:
            continue
        rr, tt = np.meshgrid(np.linspace(0.05, 1.0, 20), np.linspace(0, 2 * np.pi, 64))
        xi = rho * rr * np.exp(1j * tt)
        _, d1 = ps_eval_derivs(psi_hat, xi, 1)
        if np.min(np.abs(d1)) < 1e-12:
            continue
        return float(rho)
    raise LinearizationUnusable("no radius on the grid satisfies tol_conj")


def build_model(
    f0_coeffs: Sequence[complex],
    rot: RotationNumber,
    M: int = 64,
    tol_conj: float = 1e-9,
) -> SiegelModel:
    lambda0 = rot.lambda0
    f0 = np.asarray(f0_coeffs, dtype=complex)
    psi_hat, min_div = schroder_series(f0, lambda0, M)
    nonlinear = np.any(np.abs(f0[2:]) > 0) if len(f0) > 2 else False
    if nonlinear:
        rho_w = working_radius(psi_hat, f0, lambda0, tol_conj)
    else:
        rho_w = 1.0  # linear map: the conjugacy is exact everywhere
    table = []
    for r in np.arange(0.1, 0.95, 0.1):
        res = conjugacy_residual(psi_hat, f0, lambda0, r * rho_w)
        if res > tol_conj:
            raise LinearizationUnusable(
                f"residual {res:.3e} > tol at r={r:.1f}"
            )
        table.append((float(r), res))
    model = SiegelModel(
        lambda0=lambda0,
        rot=rot,
        psi_hat=psi_hat,
        rho_w=rho_w,
        tol_conj=tol_conj,
        f0_coeffs=f0,
        min_divisor=min_div,
        residual_table=tuple(table),
        psi_rev=ps_reverse(psi_hat),
    )
    return model


def level_curve(model: SiegelModel, r: float, n: int) -> np.ndarray:
    """Samples psi_hat(r * rho_w * e^{2 pi i k/n}), k = 0..n-1, of L_r."""
    xi = r * model.rho_w * np.exp(2j * np.pi * np.arange(n) / n)
    return model.psi(xi)


def phi_invert_many(
    model: SiegelModel, z, max_iter: int = 50, rtol: float = 1e-12
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized Newton inversion of psi_hat; returns (xi, ok_mask)."""
    z = np.asarray(z, dtype=complex)
    xi = model.psi_rev.eval(z)
    # Seed sanity: the reversion may misbehave outside its own radius.
    bad_seed = ~np.isfinite(xi) | (np.abs(xi) > 1.5 * model.rho_w)
    xi = np.where(bad_seed, z, xi)
    tol = rtol * np.maximum(1.0, np.abs(z))
    converged = np.zeros(z.shape, dtype=bool)
    for _ in range(max_iter):
        v, d1 = ps_eval_derivs(model.psi_hat, xi, 1)
        resid = v - z
        converged = np.abs(resid) <= tol
        if np.all(converged):
            break
        step = np.where(np.abs(d1) > 1e-14, resid / np.where(d1 == 0, 1, d1), 0.0)
        xi = np.where(converged, xi, xi - step)
    ok = converged & (np.abs(xi) <= model.rho_w * (1 + 1e-9))
    return xi, ok


def phi_invert(model: SiegelModel, z: complex) -> complex:
    """xi with psi_hat(xi) = z; raises OutsideModel on failure."""
    xi, ok = phi_invert_many(model, np.asarray([z], dtype=complex))
    if not ok[0]:
        raise OutsideModel(f"phi inversion failed for z={z!r}")
    return complex(xi[0])


def H_eval(model: SiegelModel, xi) -> np.ndarray:
    """H(xi) = 1 + xi psi''(xi)/psi'(xi); scale-invariant under rescaling."""
    xi = np.asarray(xi, dtype=complex)
    if np.any(np.abs(xi) > 0.95 * model.rho_w * (1 + 1e-12)):
        raise InvalidArgument("|xi| must be <= 0.95 rho_w")
    _, d1, d2 = ps_eval_derivs(model.psi_hat, xi, 2)
    if np.any(np.abs(d1) < 1e-14):
        raise DerivativeVanishes("psi' vanishes at a sample point")
    return 1.0 + xi * d2 / d1


def integral_means(
    model: SiegelModel, t: float, r_list: Sequence[float], nodes: int = 1 << 12
) -> Tuple[np.ndarray, float]:
    """Circle integrals of |psi'|^t at nominal radii r_list, plus a heuristic
    least-squares estimate of the integral-means growth exponent."""
    theta = 2 * np.pi * np.arange(nodes) / nodes
    e = np.exp(1j * theta)
    values = []
    for r in r_list:
        if not 0 < r < 0.95:
            raise InvalidArgument("radii must lie in (0, 0.95)")
        _, d1 = ps_eval_derivs(model.psi_hat, r * model.rho_w * e, 1)
        values.append(float(np.mean(np.abs(d1) ** t) * 2 * np.pi))
    values = np.array(values)
    x = -np.log(1.0 - np.asarray(r_list, dtype=float))
    slope = float(np.polyfit(x, np.log(values), 1)[0])
    return values, slope


def koenigs_attracting(
    f, lam: complex, z: complex, tol: float = 1e-10, n_max: int = 200000
) -> complex:
    """Koenigs function at z for an attracting multiplier lam, via the limit
    of lam^{-n} f^n(z); f is a callable z -> f(z)."""
    if not 0 < abs(lam) < 1:
        raise InvalidMultiplier("need 0 < |lam| < 1")
    if z == 0:
        return 0.0
    w = complex(z)
    val = w
    inv = 1.0 / lam
    scale = 1.0 + 0.0j
    for n in range(1, n_max + 1):
        w = complex(f(w))
        scale *= inv
        new = scale * w
        if abs(new - val) <= tol:
            return new
        val = new
        if not np.isfinite(w.real) or abs(w) > 1e6:
            break
    raise NotInBasin(f"orbit of {z!r} did not stabilise within {n_max} steps")


def koenigs_attracting_many(
    f, lam: complex, z: np.ndarray, tol: float = 1e-10, n_max: int = 200000
) -> np.ndarray:
    """Vectorized Koenigs limit; NaN where the orbit fails to stabilise."""
    if not 0 < abs(lam) < 1:
        raise InvalidMultiplier("need 0 < |lam| < 1")
    w = np.asarray(z, dtype=complex).copy()
    val = w.copy()
    done = w == 0
    scale = 1.0 + 0.0j
    inv = 1.0 / lam
    for n in range(1, n_max + 1):
        w = np.asarray(f(w), dtype=complex)
        scale *= inv
        new = scale * w
        close = np.abs(new - val) <= tol
        done |= close
        val = np.where(done, val, new)
        if np.all(done):
            return np.where(z == 0, 0.0, val)
        diverged = ~np.isfinite(w.real) | (np.abs(w) > 1e6)
        if np.all(done | diverged):
            break
    val = np.where(done, val, np.nan + 0j)
    return np.where(np.asarray(z) == 0, 0.0, val)
