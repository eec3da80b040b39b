"""Empirical dynamics: orbit classification, basin rasters, end-to-end
certificate validation by iteration, kernel-radius curves, Koenigs
convergence checks, and the two counterexample experiments.

"Immediate basin membership" is operationalized as an attracted orbit plus
connectivity to 0 along sampled radial paths; this is a desk-scale proxy
for the Fatou-component definition and is conservative for PASS criteria.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .contfrac import RotationNumber
from .errors import InvalidArgument, OriginNotAttracted, OutsideModel
from .family import AnalyticFamily, StolzAngle, stolz_points
from .siegel import (
    SiegelModel,
    koenigs_attracting_many,
    level_curve,
    phi_invert_many,
)

UNDECIDED, ATTRACTED, ESCAPED = 0, 1, 2


@dataclass(frozen=True)
class OrbitOutcome:
    classification: int  # UNDECIDED / ATTRACTED / ESCAPED
    steps: int
    final_point: complex
    trap_radius: float


def trap_radius(fam: AnalyticFamily, lam: complex) -> float:
    """Largest r with sum_{k>=2} |a_k| r^{k-1} <= (1-|lam|)/2, so that the
    orbit contracts by kappa = (1+|lam|)/2 inside |z| <= r."""
    if abs(lam) >= 1:
        raise InvalidArgument("attraction semantics need |lam| < 1")
    a = np.abs(fam.z_coeffs(lam))
    target = (1.0 - abs(lam)) / 2.0
    if np.all(a[2:] == 0):
        return np.inf  # linear map: global contraction
    ks = np.arange(2, len(a))

    def g(r):
        return float(np.sum(a[2:] * r ** (ks - 1)))

    lo, hi = 0.0, 1.0
    while g(hi) < target and hi < 1e6:
        lo, hi = hi, 2 * hi
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if g(mid) <= target:
            lo = mid
        else:
            hi = mid
    return lo


def default_escape_radius(fam: AnalyticFamily, lam: complex) -> float:
    return 1.0 + max(2.0, float(np.sum(np.abs(fam.z_coeffs(lam)[2:]))))


def classify_orbit_many(fam: AnalyticFamily, lam: complex, z,
                        n_max: int, escape_R: Optional[float] = None
                        ) -> Tuple[np.ndarray, np.ndarray, float]:
    """Vectorized attraction/escape test; returns (status, steps, r_trap)."""
    r_trap = trap_radius(fam, lam)
    R = default_escape_radius(fam, lam) if escape_R is None else escape_R
    R = min(R, fam.domain_radius)
    w = np.asarray(z, dtype=complex).copy()
    status = np.zeros(w.shape, dtype=np.int8)
    steps = np.zeros(w.shape, dtype=np.int64)
    coeffs = fam.z_coeffs(lam)[::-1]
    status[np.abs(w) <= r_trap] = ATTRACTED
    status[np.abs(w) > R] = ESCAPED
    for n in range(1, n_max + 1):
        live = status == UNDECIDED
        if not np.any(live):
            break
        w[live] = np.polyval(coeffs, w[live])
        aw = np.abs(w)
        newly_attracted = live & (aw <= r_trap)
        newly_escaped = live & ((aw > R) | ~np.isfinite(aw))
        status[newly_attracted] = ATTRACTED
        status[newly_escaped] = ESCAPED
        steps[newly_attracted | newly_escaped] = n
        steps[status == UNDECIDED] = n
    return status, steps, (r_trap if np.isfinite(r_trap) else np.inf)


def classify_orbit(fam: AnalyticFamily, lam: complex, z: complex,
                   n_max: int = 10000,
                   escape_R: Optional[float] = None) -> OrbitOutcome:
    arr = np.asarray([z], dtype=complex)
    status, steps, r_trap = classify_orbit_many(fam, lam, arr, n_max, escape_R)
    coeffs = fam.z_coeffs(lam)[::-1]
    fp = complex(z)
    for _ in range(int(steps[0])):
        fp = complex(np.polyval(coeffs, fp))
    return OrbitOutcome(int(status[0]), int(steps[0]), fp, float(r_trap))


@dataclass(frozen=True)
class BasinRaster:
    center: complex
    half_width: float
    width: int
    height: int
    classification: np.ndarray  # int8 (H, W)
    mask: np.ndarray  # bool (H, W): immediate-basin component of 0
    steps: np.ndarray


def basin_raster(fam: AnalyticFamily, lam: complex, center: complex,
                 half_width: float, res: Tuple[int, int],
                 n_max: int = 1000) -> BasinRaster:
    """Classify a pixel grid and flood-fill the 4-connected attracted
    component containing the origin."""
    W, H = res
    xs = np.linspace(center.real - half_width, center.real + half_width, W)
    ys = np.linspace(center.imag - half_width, center.imag + half_width, H)
    zz = xs[None, :] + 1j * ys[:, None]
    status, steps, _ = classify_orbit_many(fam, lam, zz, n_max)
    j0 = int(np.argmin(np.abs(xs - 0.0)))
    i0 = int(np.argmin(np.abs(ys - 0.0)))
    if status[i0, j0] != ATTRACTED:
        raise OriginNotAttracted("origin pixel not classified attracted")
    mask = np.zeros_like(status, dtype=bool)
    queue = deque([(i0, j0)])
    mask[i0, j0] = True
    while queue:
        i, j = queue.popleft()
        for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
            ii, jj = i + di, j + dj
            if 0 <= ii < H and 0 <= jj < W and not mask[ii, jj] \
                    and status[ii, jj] == ATTRACTED:
                mask[ii, jj] = True
                queue.append((ii, jj))
    return BasinRaster(center, half_width, W, H, status, mask, steps)


@dataclass(frozen=True)
class InclusionReport:
    passed: bool
    max_radius: float
    band_ok: bool
    n_lambda: int
    n_boundary: int
    failures: Tuple[str, ...] = ()

    def to_dict(self) -> dict:
        return {
            "schema": "siegel-cert/1",
            "passed": self.passed, "max_radius": self.max_radius,
            "band_ok": self.band_ok, "n_lambda": self.n_lambda,
            "n_boundary": self.n_boundary, "failures": list(self.failures),
        }


def inclusion_check(model: SiegelModel, fam: AnalyticFamily, cert,
                    n_lambda: int = 9, n_boundary: int = 256,
                    eps_fraction: float = 0.9) -> InclusionReport:
    """Iterate boundary samples of L_{r0} exactly N times under sector
    parameters at |lambda-lambda0| = eps_fraction * eps_star and test
    |phi(f^N(z))| <= r0, plus the annulus band along the way."""
    r0, N, tau = cert.r0, cert.N, cert.tau
    sector = StolzAngle(fam.lambda0, cert.Theta)
    lams = stolz_points(sector, eps_fraction * cert.eps_star, n_lambda)
    z0 = level_curve(model, r0, n_boundary)
    lo, hi = r0 * np.exp(-tau), r0 * np.exp(tau)
    max_radius = 0.0
    band_ok = True
    failures: List[str] = []
    for lam in lams:
        coeffs = fam.z_coeffs(lam)[::-1]
        w = z0.copy()
        for j in range(1, N + 1):
            w = np.polyval(coeffs, w)
            xi, ok = phi_invert_many(model, w)
            if not np.all(ok):
                failures.append(f"phi inversion failed at step {j}, "
                                f"lambda={lam:.6g}")
                band_ok = False
                break
            rad = np.abs(xi) / model.rho_w
            if j < N and (np.min(rad) <= lo or np.max(rad) >= hi):
                band_ok = False
                failures.append(f"band violated at step {j}, lambda={lam:.6g}")
        else:
            max_radius = max(max_radius, float(np.max(np.abs(xi) / model.rho_w)))
            continue
    passed = band_ok and max_radius <= r0 * (1.0 + 1e-6) and not failures
    return InclusionReport(passed, max_radius, band_ok, n_lambda, n_boundary,
                           tuple(failures))


def kernel_radius(model: SiegelModel, fam: AnalyticFamily, lam: complex,
                  r_grid: Sequence[float], n_boundary: int = 64,
                  n_max: int = 20000) -> float:
    """Largest grid radius whose level curve, together with sampled radial
    segments joining it to 0, classifies entirely attracted."""
    r_max = 0.0
    fractions = np.linspace(0.25, 1.0, 4)
    angles = np.exp(2j * np.pi * np.arange(n_boundary) / n_boundary)
    for r in sorted(r_grid):
        xi = (r * model.rho_w) * np.outer(fractions, angles).ravel()
        pts = model.psi(xi)
        status, _, _ = classify_orbit_many(fam, lam, pts, n_max)
        if np.all(status == ATTRACTED):
            r_max = float(r)
        else:
            break
    return r_max


def koenigs_convergence(fam: AnalyticFamily, lam_seq: Sequence[complex],
                        model: SiegelModel, r_compact: float,
                        n_samples: int = 32, tol: float = 1e-10,
                        n_max: int = 200000) -> List[float]:
    """sup gaps |phi_n - phi_0| over samples of the compact level set
    S'_{r_compact}; NaN marks a parameter whose samples left the basin."""
    z = level_curve(model, r_compact, n_samples)
    xi0, ok = phi_invert_many(model, z)
    if not np.all(ok):
        raise OutsideModel("level-curve samples failed to invert")
    gaps = []
    for lam in lam_seq:
        coeffs = fam.z_coeffs(lam)[::-1]
        phi_n = koenigs_attracting_many(
            lambda w: np.polyval(coeffs, w), lam, z, tol=tol, n_max=n_max)
        if np.any(~np.isfinite(phi_n.real)):
            gaps.append(float("nan"))
        else:
            gaps.append(float(np.max(np.abs(phi_n - xi0))))
    return gaps


@dataclass(frozen=True)
class Example2Report:
    n: int
    q: int
    p: int
    growth_ok: bool
    l_closed: float
    l_fd: float
    multiplier_gap: float
    comparison_fixed_residual: float
    z_star: Optional[complex]
    newton_residual: Optional[float]
    in_D3: Optional[bool]

    def to_dict(self) -> dict:
        d = {
            "schema": "siegel-cert/1",
            "n": self.n, "q": self.q, "p": self.p,
            "growth_ok": self.growth_ok, "l_closed": self.l_closed,
            "l_fd": self.l_fd, "multiplier_gap": self.multiplier_gap,
            "comparison_fixed_residual": self.comparison_fixed_residual,
            "z_star": None if self.z_star is None
            else [self.z_star.real, self.z_star.imag],
            "newton_residual": self.newton_residual,
            "in_D3": self.in_D3,
        }
        return d


def _iterate_poly(coeffs_rev: np.ndarray, z: complex, times: int) -> complex:
    w = complex(z)
    for _ in range(times):
        w = complex(np.polyval(coeffs_rev, w))
    return w


def example2_check(rot: RotationNumber, n: int,
                   attempt_newton: bool = True) -> Example2Report:
    """Counterexample experiment: the degree-(q_n+1) family whose basins
    fail to converge when the quotients grow superexponentially.

    Compares the closed-form multiplier of the rational-rotation comparison
    map at its exact fixed point 1/2 against a Richardson-extrapolated finite
    difference, then Newton-locates the nearby fixed point of the true q_n-th
    iterate; |z_*| < 3/4 certifies that D_3 is not inside the basin.
    """
    if not 1 <= n < rot.K:
        raise InvalidArgument("need 1 <= n < K")
    p, q = rot.convergents[n - 1]
    if q > 16:
        raise InvalidArgument("q_n too large for iterate computation")
    q_next = rot.q(n + 1)
    growth_ok = q_next >= 2 ** q
    denom = 1.0 + 0.5 ** q
    lam0 = rot.lambda0
    lam_tilde = np.exp(2j * np.pi * p / q)
    # coefficient vectors for f(z) = mult*(z + z^{q+1})/denom, highest first
    def coeffs_rev(mult: complex) -> np.ndarray:
        c = np.zeros(q + 2, dtype=complex)
        c[1] = mult / denom
        c[q + 1] = mult / denom
        return c[::-1]

    f_rev = coeffs_rev(lam0)
    ft_rev = coeffs_rev(lam_tilde)

    fixed_resid = abs(_iterate_poly(ft_rev, 0.5, q) - 0.5)
    l_closed = float(((1.0 + (q + 1) * 0.5 ** q) / denom) ** q)

    def g_tilde(z: complex) -> complex:
        return _iterate_poly(ft_rev, z, q)

    def central(h: float) -> complex:
        return (g_tilde(0.5 + h) - g_tilde(0.5 - h)) / (2.0 * h)

    d1, d2 = central(1e-4), central(5e-5)
    l_fd_c = (4.0 * d2 - d1) / 3.0  # Richardson: O(h^4)
    l_fd = float(abs(l_fd_c))
    multiplier_gap = abs(l_fd_c - l_closed)

    z_star = None
    newton_residual = None
    in_D3 = None
    if attempt_newton:
        df_rev = np.polyder(f_rev)
        z = 0.5 + 0.0j
        for _ in range(100):
            w, dw = z, 1.0 + 0.0j
            for _ in range(q):
                dw = complex(np.polyval(df_rev, w)) * dw
                w = complex(np.polyval(f_rev, w))
            Fz, dFz = w - z, dw - 1.0
            if abs(dFz) < 1e-14:
                break
            step = Fz / dFz
            z -= step
            if abs(step) < 1e-13:
                break
            if not np.isfinite(z.real) or abs(z) > 10:
                z = None
                break
        if z is not None and abs(z - 0.5) < 0.25:
            resid = abs(_iterate_poly(f_rev, z, q) - z)
            if np.isfinite(resid) and resid < 1e-9:
                z_star = z
                newton_residual = float(resid)
                in_D3 = bool(abs(z) < 0.75)
    return Example2Report(n, q, p, growth_ok, l_closed, l_fd,
                          float(multiplier_gap), float(fixed_resid),
                          z_star, newton_residual, in_D3)
