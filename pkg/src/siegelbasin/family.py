"""One-parameter analytic families f_lambda with f_lambda(0)=0 and
f_lambda'(0)=lambda, their lambda-derivative u at lambda0, the modulus of
continuity omega_r, and Stolz-angle parameter sampling.

Families are polynomials in z whose coefficients are polynomials in lambda.
Three constructors cover the cases used in practice: a linear pair
(1-t) f0 + t f1, a multiplier-scaled polynomial lambda z + sum a_k z^k, and
fully custom coefficient polynomials.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import (
    DegeneratePerturbation,
    InvalidArgument,
    InvalidMultiplier,
    OutsideDomain,
    PoleInModulus,
)

# omega_r sampling densities; the 1.05 inflation keeps certificates
# conservative against sampling gaps.
_OMEGA_XI_ANGLES = 64
_OMEGA_XI_RADII = 8
_OMEGA_LAM_ANGLES = 64
OMEGA_SAFETY = 1.05


@dataclass(frozen=True)
class AnalyticFamily:
    """Coefficient matrix C[k][j]: coefficient of z^k lambda^j."""

    mode: str  # "linear_pair" | "multiplier_scaled" | "custom"
    coeff_matrix: np.ndarray  # complex, shape (degree+1, lam_degree+1)
    lambda0: complex
    domain_radius: float = np.inf  # R_U; U is the |z| < R_U disk (inf = plane)
    param_radius: float = 1.0  # dist(lambda0, boundary of W): delta^*
    lambda_ref: Optional[complex] = None  # lambda_{n*} for linear_pair mode
    degenerate: bool = False  # linear pair with f1 = f0: u is undefined

    def __post_init__(self):
        C = np.asarray(self.coeff_matrix, dtype=complex)
        object.__setattr__(self, "coeff_matrix", C)
        if np.max(np.abs(C[0])) > 1e-14:
            raise InvalidArgument("family must satisfy f_lambda(0) = 0")
        if self.degenerate:
            return
        # f'(0) = C[1] . lambda^j must be the monomial lambda
        lin = C[1].copy()
        lin[1] -= 1.0
        if np.max(np.abs(lin)) > 1e-12:
            raise InvalidMultiplier("family must satisfy f_lambda'(0) = lambda")

    @property
    def degree(self) -> int:
        return self.coeff_matrix.shape[0] - 1

    def z_coeffs(self, lam: complex) -> np.ndarray:
        powers = lam ** np.arange(self.coeff_matrix.shape[1])
        return self.coeff_matrix @ powers

    def is_affine_in_lambda(self) -> bool:
        return self.coeff_matrix.shape[1] <= 2


def multiplier_scaled(higher_coeffs: Sequence[complex], lambda0: complex,
                      domain_radius: float = np.inf) -> AnalyticFamily:
    """f_lambda(z) = lambda z + a_2 z^2 + ... + a_d z^d (a_k fixed)."""
    a = np.asarray(higher_coeffs, dtype=complex)
    C = np.zeros((len(a) + 2, 2), dtype=complex)
    C[1, 1] = 1.0
    C[2:, 0] = a
    return AnalyticFamily("multiplier_scaled", C, lambda0, domain_radius)


def linear_pair(f0_coeffs: Sequence[complex], f1_coeffs: Sequence[complex],
                lambda0: complex, lambda1: complex,
                domain_radius: float = np.inf) -> AnalyticFamily:
    """f_lambda = (1-t) f0 + t f1 with t = (lambda-lambda0)/(lambda1-lambda0)."""
    f0 = np.asarray(f0_coeffs, dtype=complex)
    f1 = np.asarray(f1_coeffs, dtype=complex)
    d = max(len(f0), len(f1))
    f0 = np.pad(f0, (0, d - len(f0)))
    f1 = np.pad(f1, (0, d - len(f1)))
    if lambda1 == lambda0:
        if np.max(np.abs(f1 - f0)) > 0:
            raise DegeneratePerturbation("lambda1 = lambda0 with f1 != f0")
        # f_lambda = f0 for every lambda; u is undefined.
        C = np.zeros((d, 2), dtype=complex)
        C[:, 0] = f0
        return AnalyticFamily("linear_pair", C, lambda0, domain_radius,
                              lambda_ref=lambda1, degenerate=True)
    # f_lambda = f0 + (lambda - lambda0) * (f1 - f0)/(lambda1 - lambda0)
    slope = (f1 - f0) / (lambda1 - lambda0)
    C = np.zeros((d, 2), dtype=complex)
    C[:, 0] = f0 - slope * lambda0
    C[:, 1] = slope
    return AnalyticFamily("linear_pair", C, lambda0, domain_radius,
                          lambda_ref=lambda1)


def custom_family(coeff_matrix, lambda0: complex,
                  domain_radius: float = np.inf) -> AnalyticFamily:
    return AnalyticFamily("custom", np.asarray(coeff_matrix, dtype=complex),
                          lambda0, domain_radius)


def eval_f(fam: AnalyticFamily, lam: complex, z):
    """Horner evaluation of f_lambda at z (scalar or array)."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= fam.domain_radius):
        raise OutsideDomain("|z| must be below the domain radius")
    return np.polyval(fam.z_coeffs(lam)[::-1], z)


def eval_dz(fam: AnalyticFamily, lam: complex, z):
    """d/dz of f_lambda at z."""
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= fam.domain_radius):
        raise OutsideDomain("|z| must be below the domain radius")
    c = fam.z_coeffs(lam)
    dc = c[1:] * np.arange(1, len(c))
    return np.polyval(dc[::-1], z)


def u_coeffs(fam: AnalyticFamily) -> np.ndarray:
    """Coefficients of u(z) = d f_lambda(z)/d lambda at lambda0."""
    if fam.degenerate:
        raise DegeneratePerturbation("u is undefined for a degenerate pair")
    j = np.arange(fam.coeff_matrix.shape[1])
    powers = np.where(j >= 1, j * fam.lambda0 ** np.maximum(j - 1, 0), 0.0)
    return fam.coeff_matrix @ powers


def u_eval(fam: AnalyticFamily, z):
    z = np.asarray(z, dtype=complex)
    return np.polyval(u_coeffs(fam)[::-1], z)


def u_eval_dz(fam: AnalyticFamily, z):
    z = np.asarray(z, dtype=complex)
    c = u_coeffs(fam)
    dc = c[1:] * np.arange(1, len(c))
    return np.polyval(dc[::-1], z)


@dataclass(frozen=True)
class StolzAngle:
    vertex: complex
    theta: float  # half-angle, in (0, pi/2)
    eps_max: float = np.inf

    def __post_init__(self):
        if not 0 < self.theta < np.pi / 2:
            raise InvalidArgument("half-angle must lie in (0, pi/2)")

    def contains(self, lam: complex) -> bool:
        if abs(lam - self.vertex) >= self.eps_max:
            return False
        w = 1.0 - lam / self.vertex
        if w == 0:
            return False
        return abs(np.angle(w)) < self.theta


def stolz_points(sector: StolzAngle, eps: float, k: int,
                 inset: float = 1e-3) -> np.ndarray:
    """k parameters at |lambda - vertex| = eps spread across the sector,
    covering the (inset) boundary rays and the bisector."""
    if eps > sector.eps_max:
        raise InvalidArgument("eps exceeds the sector reach")
    if k == 1:
        phis = np.array([0.0])
    else:
        phis = np.linspace(-(sector.theta - inset), sector.theta - inset, k)
    return sector.vertex * (1.0 - eps * np.exp(1j * phis))


def modulus_omega(fam: AnalyticFamily, model, r: float, delta: float,
                  xi_angles: int = _OMEGA_XI_ANGLES,
                  xi_radii: int = _OMEGA_XI_RADII,
                  lam_angles: int = _OMEGA_LAM_ANGLES) -> float:
    """Sampled sup of |1 - f_lambda(z)/f_lambda0(z)| over z in S_r and
    |lambda - lambda0| <= delta, inflated by the sampling-safety factor.

    The sup over lambda is attained on the circle |lambda-lambda0| = delta
    (maximum principle); interior xi radii are included for safety.  The
    removable singularity at xi = 0 contributes |1 - lambda/lambda0|.
    """
    if delta < 0:
        raise InvalidArgument("delta must be >= 0")
    if delta == 0:
        return 0.0
    if delta > fam.param_radius:
        raise InvalidArgument("delta exceeds the parameter-domain radius")
    lam0 = fam.lambda0
    lams = lam0 + delta * np.exp(2j * np.pi * np.arange(lam_angles) / lam_angles)
    rr = np.linspace(1.0 / xi_radii, 1.0, xi_radii)
    tt = 2 * np.pi * np.arange(xi_angles) / xi_angles
    xi = (r * model.rho_w) * np.outer(rr, np.exp(1j * tt)).ravel()
    z = model.psi(xi)
    f0z = np.polyval(fam.z_coeffs(lam0)[::-1], z)
    if np.any(np.abs(f0z) < 1e-300):
        raise PoleInModulus("f_lambda0 vanishes at a nonzero sample")
    sup = max(abs(1.0 - lam / lam0) for lam in lams)  # xi = 0 limit
    for lam in lams:
        flz = np.polyval(fam.z_coeffs(lam)[::-1], z)
        sup = max(sup, float(np.max(np.abs(1.0 - flz / f0z))))
    return OMEGA_SAFETY * sup


def omega_inverse(fam: AnalyticFamily, model, r: float, s: float,
                  tol: float = 1e-9) -> float:
    """Bisection solve of omega_r(delta) = s; returns the saturation value
    delta^* = param_radius when s is beyond reach.  The returned delta always
    satisfies omega_r(delta) <= s (conservative side)."""
    if s <= 0:
        raise InvalidArgument("s must be positive")
    delta_star = fam.param_radius
    if modulus_omega(fam, model, r, delta_star) <= s:
        return delta_star
    lo, hi = 0.0, delta_star
    while hi - lo > tol * delta_star:
        mid = 0.5 * (lo + hi)
        if modulus_omega(fam, model, r, mid) <= s:
            lo = mid
        else:
            hi = mid
    return lo


def family_to_dict(fam: AnalyticFamily) -> dict:
    return {
        "mode": fam.mode,
        "degree": fam.degree,
        "coeff_matrix": [[[c.real, c.imag] for c in row] for row in fam.coeff_matrix],
        "lambda0": [fam.lambda0.real, fam.lambda0.imag],
        "domain_radius": None if np.isinf(fam.domain_radius) else fam.domain_radius,
        "param_radius": fam.param_radius,
    }


def family_from_dict(d: dict) -> AnalyticFamily:
    C = np.array([[complex(a, b) for a, b in row] for row in d["coeff_matrix"]])
    lam0 = complex(*d["lambda0"])
    R = d.get("domain_radius")
    fam = AnalyticFamily(d["mode"], C, lam0,
                         np.inf if R is None else float(R),
                         float(d.get("param_radius", 1.0)))
    return fam


def load_family(path: str) -> AnalyticFamily:
    with open(path) as fh:
        return family_from_dict(json.load(fh))
