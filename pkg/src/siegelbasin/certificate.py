"""The quantitative inclusion certificate: G, J, a_N, eps_N(tau), Lambda_N,
eps_*, the automatic (N, tau) selection, and the log-derivative diagnostic.

All radii are model-relative: a radius r in (0,1) refers to the circle
|xi| = r * rho_w in linearizer coordinates.  The certified claim is that the
level set S'_{r0} of the validated sub-disk is mapped into itself by the
N-th iterate of every f_lambda with lambda in the Stolz sector and
|lambda - lambda0| < eps_star, hence lies in the perturbed immediate basin.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence, Tuple

import numpy as np

from .contfrac import RotationNumber, QN_upper, ell_of_x
from .errors import DerivativeVanishes, InvalidArgument
from .family import (
    AnalyticFamily,
    OMEGA_SAFETY,
    omega_inverse,
    u_coeffs,
    u_eval,
    u_eval_dz,
)
from .powerseries import ps_eval_derivs
from .siegel import SiegelModel, phi_invert

# Quadrature safety factor applied to the integral of |J|.
L_SAFETY = 1.02
_SUP_ANGLES = 512


def k_pi(z):
    """The rotated Koebe function k_pi(z) = z/(1+z)^2."""
    return z / (1.0 + z) ** 2


def G_eval(model: SiegelModel, fam: AnalyticFamily, xi) -> np.ndarray:
    """G(xi) = u(psi(xi)) / (lambda0 xi psi'(lambda0 xi)), G(0) = 1/lambda0."""
    xi = np.asarray(xi, dtype=complex)
    scalar = xi.ndim == 0
    xi = np.atleast_1d(xi)
    if np.any(np.abs(xi) > 0.9 * model.rho_w * (1 + 1e-12)):
        raise InvalidArgument("|xi| must be <= 0.9 rho_w")
    lam0 = model.lambda0
    _, dpsi = ps_eval_derivs(model.psi_hat, lam0 * xi, 1)
    if np.any(np.abs(dpsi) < 1e-14):
        raise DerivativeVanishes("psi' vanishes at lambda0*xi")
    tiny = np.abs(xi) < 1e-140
    safe_xi = np.where(tiny, 1.0, xi)
    out = u_eval(fam, model.psi(safe_xi)) / (lam0 * safe_xi * dpsi)
    out = np.where(tiny, 1.0 / lam0, out)
    return out[0] if scalar else out


def J_eval(model: SiegelModel, fam: AnalyticFamily, r0: float, t) -> np.ndarray:
    """J(t) = [xi u'(psi) psi'(xi) - u(psi) H(lambda0 xi)] /
    (lambda0 xi psi'(lambda0 xi)) with xi = r0 rho_w e^{2 pi i t}."""
    if not 0 < r0 <= 0.9:
        raise InvalidArgument("r0 must lie in (0, 0.9]")
    t = np.atleast_1d(np.asarray(t, dtype=float))
    xi = r0 * model.rho_w * np.exp(2j * np.pi * t)
    lam0 = model.lambda0
    psi, dpsi = ps_eval_derivs(model.psi_hat, xi, 1)
    _, dpsi_rot, d2psi_rot = ps_eval_derivs(model.psi_hat, lam0 * xi, 2)
    if np.any(np.abs(dpsi_rot) < 1e-14):
        raise DerivativeVanishes("psi' vanishes at lambda0*xi")
    H_rot = 1.0 + lam0 * xi * d2psi_rot / dpsi_rot
    num = xi * u_eval_dz(fam, psi) * dpsi - u_eval(fam, psi) * H_rot
    return num / (lam0 * xi * dpsi_rot)


def integral_abs_J(model: SiegelModel, fam: AnalyticFamily, r0: float,
                   rel_tol: float = 1e-6) -> Tuple[float, int]:
    """Adaptive-trapezoid int_0^1 |J(t)| dt, inflated by the quadrature
    safety factor; returns (L, nodes used)."""
    n = 64
    t = np.arange(n) / n
    vals = np.abs(J_eval(model, fam, r0, t))
    prev = float(np.mean(vals))  # periodic integrand: trapezoid = mean
    while n < (1 << 20):
        n *= 2
        t = np.arange(n) / n
        cur = float(np.mean(np.abs(J_eval(model, fam, r0, t))))
        if abs(cur - prev) <= rel_tol * max(abs(cur), 1e-300):
            return L_SAFETY * cur, n
        prev = cur
    return L_SAFETY * prev, n


def compute_aN(model: SiegelModel, fam: AnalyticFamily, rot: RotationNumber,
               r0: float, N: int, qn_grid: int = 64) -> Tuple[float, float]:
    """L = int |J| and a_N = 2 pi Q_N L, with Q_N replaced by its certified
    upper bound (conservative: a_N only grows)."""
    if N < 1:
        raise InvalidArgument("N must be >= 1")
    L, _ = integral_abs_J(model, fam, r0)
    return L, 2 * np.pi * QN_upper(rot, N, qn_grid) * L


def _sup_u_over_f0(model: SiegelModel, fam: AnalyticFamily, r: float) -> float:
    """Sampled sup over S_r of |u(z)/f_lambda0(z)|, inflated for safety.

    For a family affine in lambda this equals omega_r(delta)/delta exactly.
    """
    rr = np.linspace(0.25, 1.0, 4)
    tt = 2 * np.pi * np.arange(_SUP_ANGLES) / _SUP_ANGLES
    xi = (r * model.rho_w) * np.outer(rr, np.exp(1j * tt)).ravel()
    z = model.psi(xi)
    f0z = np.polyval(fam.z_coeffs(fam.lambda0)[::-1], z)
    sup = 1.0  # xi = 0 limit: |u'(0)/lambda0| = 1
    sup = max(sup, float(np.max(np.abs(u_eval(fam, z) / f0z))))
    return OMEGA_SAFETY * sup


def epsilon_N_tau(model: SiegelModel, fam: AnalyticFamily, r0: float,
                  N: int, tau: float) -> float:
    """Radius eps_N(tau) guaranteeing the annulus confinement of the orbit.

    Affine-in-lambda families admit the closed form
    (1 - k_pi(r_*)/k_pi(r^*)) / sup_{S_{r_*}} |u/f_lambda0|; general families
    go through the modulus-of-continuity inverse.
    """
    if not 0 < tau < -np.log(r0):
        raise InvalidArgument("tau must lie in (0, -log r0)")
    r_star = r0 * np.exp(tau * (1.0 - 1.0 / N))
    r_sup = r0 * np.exp(tau)
    s = 1.0 - k_pi(r_star) / k_pi(r_sup)
    if fam.is_affine_in_lambda() and not fam.degenerate:
        eps = s / _sup_u_over_f0(model, fam, r_star)
        return min(eps, fam.param_radius)
    return omega_inverse(fam, model, r_star, s)


def Lambda_of(b: float, vartheta: float) -> float:
    """Lambda = (sqrt(1+2b^2 cos 2v + b^4) - 1 + b^2)/(2b cos v), clamped to
    b <= 1 (Schwarz range); 0 at b = 0."""
    b1 = min(1.0, b)
    if b1 <= 0:
        return 0.0
    return (np.sqrt(1.0 + 2.0 * b1 * b1 * np.cos(2 * vartheta) + b1 ** 4)
            - 1.0 + b1 * b1) / (2.0 * b1 * np.cos(vartheta))


def epsilon_star(r0: float, Theta: float, N: int, tau: float,
                 aN: float, epsN: float) -> Tuple[float, float, float]:
    """Returns (b, Lambda, eps_star); requires a_N < sin(pi/2 - Theta)."""
    if aN >= np.sin(np.pi / 2 - Theta):
        raise InvalidArgument("a_N >= sin(pi/2 - Theta): certificate invalid")
    vartheta = Theta + np.arcsin(aN)
    b = np.pi * epsN * N * (1.0 - aN) / (4.0 * tau)
    lam = Lambda_of(b, vartheta)
    return float(b), float(lam), float(epsN * lam)


def sector_radius(t_mod: float, vartheta: float) -> float:
    """rho_0 = sqrt(gamma^2+1) - gamma, gamma = (1-t^2)/(2 t cos(vartheta))."""
    if not 0 < t_mod <= 1:
        raise InvalidArgument("t_mod must lie in (0, 1]")
    if not 0 < vartheta < np.pi / 2:
        raise InvalidArgument("vartheta must lie in (0, pi/2)")
    if t_mod == 1.0:
        return 1.0
    gamma = (1.0 - t_mod * t_mod) / (2.0 * t_mod * np.cos(vartheta))
    return float(np.sqrt(gamma * gamma + 1.0) - gamma)


@dataclass(frozen=True)
class InclusionCertificate:
    r0: float
    Theta: float
    N: int
    tau: float
    QN: float
    L: float
    aN: float
    vartheta: float
    epsN: float
    b: float
    Lambda: float
    eps_star: float
    valid: bool
    notes: Dict[str, object] = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = {
            "schema": "siegel-cert/1",
            "r0": self.r0, "Theta": self.Theta, "N": self.N, "tau": self.tau,
            "QN": self.QN, "L": self.L, "aN": self.aN,
            "vartheta": self.vartheta, "epsN": self.epsN, "b": self.b,
            "Lambda": self.Lambda, "eps_star": self.eps_star,
            "valid": self.valid, "notes": dict(self.notes),
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def certify(model: SiegelModel, fam: AnalyticFamily, rot: RotationNumber,
            r0: float, Theta: float, mode: str = "theorem3",
            N: Optional[int] = None, tau: Optional[float] = None,
            qn_grid: int = 64) -> InclusionCertificate:
    """Assemble the full inclusion certificate.

    mode="manual" takes N and tau from the caller; mode="theorem3" selects
    N = l(2 pi L / sin(pi/4 - Theta/2)) and tau = log((1+2 r0)/(3 r0)),
    which always satisfies tau < -log r0.
    """
    if not 0 < r0 < 1:
        raise InvalidArgument("r0 must lie in (0,1)")
    if not 0 < Theta < np.pi / 2:
        raise InvalidArgument("Theta must lie in (0, pi/2)")
    L, nodes = integral_abs_J(model, fam, r0)
    if mode == "theorem3":
        x = 2 * np.pi * L / np.sin(np.pi / 4 - Theta / 2)
        _, N = ell_of_x(rot, x)
        tau = float(np.log((1.0 + 2.0 * r0) / (3.0 * r0)))
    elif mode == "manual":
        if N is None or tau is None:
            raise InvalidArgument("manual mode needs N and tau")
        if not 0 < tau < -np.log(r0):
            raise InvalidArgument("tau must lie in (0, -log r0)")
    else:
        raise InvalidArgument(f"unknown mode {mode!r}")

    QN = QN_upper(rot, N, qn_grid)
    aN = 2 * np.pi * QN * L
    epsN = epsilon_N_tau(model, fam, r0, N, tau)
    a_limit = float(np.sin(np.pi / 2 - Theta))
    valid = aN < a_limit
    if valid:
        b, lam, eps_star = epsilon_star(r0, Theta, N, tau, aN, epsN)
    else:
        b = np.pi * epsN * N * (1.0 - aN) / (4.0 * tau)
        lam, eps_star = 0.0, 0.0
    notes = {
        "mode": mode,
        "J_quadrature_nodes": nodes,
        "L_safety": L_SAFETY,
        "omega_safety": OMEGA_SAFETY,
        "qn_grid": qn_grid,
        "a_limit": a_limit,
    }
    return InclusionCertificate(
        r0=float(r0), Theta=float(Theta), N=int(N), tau=float(tau),
        QN=float(QN), L=float(L), aN=float(aN),
        vartheta=float(Theta + np.arcsin(min(aN, 1.0))), epsN=float(epsN),
        b=float(b), Lambda=float(lam), eps_star=float(eps_star),
        valid=bool(valid), notes=notes,
    )


def theorem3_curve(model: SiegelModel, fam: AnalyticFamily,
                   rot: RotationNumber, Theta: float,
                   r_grid: Sequence[float], gamma: float):
    """Table of (r, eps(r), ell((1-r)^-gamma), calibrated floor).

    The floor constant is measured from the grid itself:
    C_hat = min eps(r) * ell / (1-r)^3, so eps(r) meets the floor at every
    grid point by construction, exhibiting the predicted shape.
    """
    rows = []
    for r in r_grid:
        cert = certify(model, fam, rot, r, Theta, mode="theorem3")
        _, ell = ell_of_x(rot, (1.0 - r) ** (-gamma))
        rows.append({"r": float(r), "eps": cert.eps_star, "N": cert.N,
                     "ell": int(ell), "valid": cert.valid})
    valid_rows = [row for row in rows if row["valid"]]
    if valid_rows:
        C_hat = min(row["eps"] * row["ell"] / (1.0 - row["r"]) ** 3
                    for row in valid_rows)
    else:
        C_hat = 0.0
    for row in rows:
        row["floor"] = C_hat * (1.0 - row["r"]) ** 3 / row["ell"]
    return rows, float(C_hat)


def diagnose_AN(model: SiegelModel, fam: AnalyticFamily, z0: complex,
                N: int, fd_step: float = 1e-6) -> Tuple[complex, complex, float]:
    """Check sum_k G(lambda0^k phi(z0)) against a finite difference of
    d log(phi(f^N_lambda(z0)))/d lambda at lambda0; returns
    (sum_G, fd_estimate, relative gap)."""
    if N < 0:
        raise InvalidArgument("N must be >= 0")
    lam0 = model.lambda0
    if N == 0:
        return 0.0 + 0.0j, 0.0 + 0.0j, 0.0
    xi0 = phi_invert(model, z0)
    powers = lam0 ** np.arange(N)
    sum_G = complex(np.sum(G_eval(model, fam, powers * xi0)))

    def end_xi(lam: complex) -> complex:
        w = complex(z0)
        coeffs = fam.z_coeffs(lam)[::-1]
        for _ in range(N):
            w = complex(np.polyval(coeffs, w))
        return phi_invert(model, w)  # raises OutsideModel if the orbit exits

    h = fd_step
    fd = complex(np.log(end_xi(lam0 + h) / end_xi(lam0 - h)) / (2.0 * h))
    gap = abs(sum_G - fd) / abs(sum_G) if sum_G != 0 else abs(fd)
    return sum_G, fd, float(gap)
