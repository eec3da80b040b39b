"""Certificate quantities: G, J, a_N, Lambda, eps_star, and certify()."""

import numpy as np
import pytest

from siegelbasin.certificate import (
    G_eval,
    J_eval,
    Lambda_of,
    certify,
    compute_aN,
    diagnose_AN,
    epsilon_star,
    k_pi,
    sector_radius,
    theorem3_curve,
)
from siegelbasin.contfrac import cf_expand
from siegelbasin.errors import InvalidArgument
from siegelbasin.family import multiplier_scaled
from siegelbasin.siegel import build_model

GOLDEN = "(-1+1*sqrt(5))/2"


@pytest.fixture(scope="module")
def rot():
    return cf_expand(GOLDEN, 20)


@pytest.fixture(scope="module")
def model(rot):
    return build_model([0, rot.lambda0, 1.0], rot, M=64)


@pytest.fixture(scope="module")
def fam(rot):
    return multiplier_scaled([1.0], rot.lambda0)


def test_G_at_origin(model, fam, rot):
    g0 = G_eval(model, fam, np.array([0.0j]))[0]
    assert abs(g0 - 1.0 / rot.lambda0) < 1e-13


def test_G_circle_mean_residue(model, fam, rot):
    xi = 0.5 * model.rho_w * np.exp(2j * np.pi * np.arange(4096) / 4096)
    mean = np.mean(G_eval(model, fam, xi))
    assert abs(mean - 1.0 / rot.lambda0) < 1e-12


def test_J_is_angular_derivative_of_G(model, fam):
    # J(t) = (1/2пi... ) matches d/dt G(r0 rho_w e^{2 pi i t}) structure:
    # check against a finite difference of G along the circle
    r0 = 0.5
    t = np.array([0.123, 0.45, 0.77])
    h = 1e-6
    xi = lambda tt: r0 * model.rho_w * np.exp(2j * np.pi * tt)
    fd = (G_eval(model, fam, xi(t + h)) - G_eval(model, fam, xi(t - h))) / (2 * h)
    J = J_eval(model, fam, r0, t)
    assert np.max(np.abs(J - fd / (2j * np.pi))) < 1e-7


def test_aN_positive_and_scales_with_QN(model, fam, rot):
    L, a5 = compute_aN(model, fam, rot, 0.5, 5)
    L2, a8 = compute_aN(model, fam, rot, 0.5, 8)
    assert L == pytest.approx(L2)
    assert a5 > 0 and a8 > 0


def test_lambda_of_limits():
    assert Lambda_of(0.0, 0.3) == 0.0
    for b in (0.2, 0.7, 1.0, 3.0):
        val = Lambda_of(b, 0.3)
        assert 0 < val <= 1.0


def test_lambda_monotone_in_b():
    for theta in (0.1, 0.5, 1.0):
        vals = [Lambda_of(b, theta) for b in np.linspace(0.01, 1.0, 50)]
        assert all(x < y + 1e-15 for x, y in zip(vals, vals[1:]))


def test_k_pi_koebe_values():
    assert k_pi(0.0) == 0.0
    assert k_pi(1.0) == pytest.approx(0.25)


def test_sector_radius_identity():
    rng = np.random.default_rng(42)
    for _ in range(100):
        t = rng.uniform(0.05, 0.95)
        vt = rng.uniform(0.01, np.pi / 2 - 0.01)
        rho = sector_radius(t, vt)
        lhs = np.cos(vt)
        rhs = rho * (1 - t**2) / (t * (1 - rho**2))
        assert abs(lhs - rhs) < 1e-12


def test_epsilon_star_components(model, fam, rot):
    cert = certify(model, fam, rot, 0.5, np.pi / 4, mode="theorem3")
    assert cert.valid
    b, lam, eps = epsilon_star(cert.r0, cert.Theta, cert.N, cert.tau,
                               cert.aN, cert.epsN)
    assert eps == pytest.approx(cert.eps_star)
    assert cert.eps_star == pytest.approx(cert.epsN * cert.Lambda)


def test_certify_manual_mode(model, fam, rot):
    cert = certify(model, fam, rot, 0.5, np.pi / 4, mode="manual",
                   N=5, tau=0.3)
    assert cert.N == 5 and cert.tau == 0.3
    with pytest.raises(InvalidArgument):
        certify(model, fam, rot, 0.5, np.pi / 4, mode="manual", N=5, tau=2.0)
    with pytest.raises(InvalidArgument):
        certify(model, fam, rot, 1.5, np.pi / 4)
    with pytest.raises(InvalidArgument):
        certify(model, fam, rot, 0.5, np.pi)


def test_certify_deterministic(model, fam, rot):
    a = certify(model, fam, rot, 0.5, np.pi / 4).to_json()
    b = certify(model, fam, rot, 0.5, np.pi / 4).to_json()
    assert a == b
    assert '"schema": "siegel-cert/1"' in a


def test_diagnose_AN_zero_steps(model, fam):
    s, fd, gap = diagnose_AN(model, fam, 0.05 + 0.0j, 0)
    assert s == 0 and fd == 0 and gap == 0


def test_theorem3_curve_floor(model, fam, rot):
    rows, c_hat = theorem3_curve(model, fam, rot, np.pi / 4,
                                 [0.5, 0.7], gamma=1.6)
    assert c_hat > 0
    for row in rows:
        assert row["eps"] >= row["floor"] * (1 - 1e-12)
