"""Orbit classification, rasters, inclusion checks, and the counterexamples."""

import numpy as np
import pytest

from siegelbasin.certificate import certify
from siegelbasin.contfrac import cf_expand
from siegelbasin.errors import InvalidArgument, OriginNotAttracted
from siegelbasin.family import multiplier_scaled
from siegelbasin.siegel import build_model
from siegelbasin.verify import (
    ATTRACTED,
    ESCAPED,
    basin_raster,
    classify_orbit,
    example2_check,
    inclusion_check,
    kernel_radius,
    koenigs_convergence,
    trap_radius,
)

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


def test_origin_attracted_immediately(fam, rot):
    out = classify_orbit(fam, 0.9 * rot.lambda0, 0.0j)
    assert out.classification == ATTRACTED and out.steps == 0


def test_quadratic_trap_radius(fam, rot):
    # for lam z + z^2 the trap condition is |z| <= (1-|lam|)/2
    lam = 0.9 * rot.lambda0
    assert trap_radius(fam, lam) == pytest.approx(0.05, rel=1e-10)
    with pytest.raises(InvalidArgument):
        trap_radius(fam, rot.lambda0)


def test_far_points_escape(fam, rot):
    lam = 0.9 * rot.lambda0
    out = classify_orbit(fam, lam, 2.5 + 0.0j, n_max=50)
    assert out.classification == ESCAPED


def test_raster_linear_family(rot):
    linfam = multiplier_scaled([], rot.lambda0)
    ras = basin_raster(linfam, 0.5 * rot.lambda0, 0j, 2.0, (32, 32), n_max=500)
    assert ras.mask.all()  # global attraction for a linear map


def test_raster_trap_guarantee(fam, rot):
    lam = 0.5 * rot.lambda0
    ras = basin_raster(fam, lam, 0j, 0.6, (64, 64), n_max=2000)
    xs = np.linspace(-0.6, 0.6, 64)
    zz = xs[None, :] + 1j * xs[:, None]
    inside = np.abs(zz) <= 0.25
    assert ras.mask[inside].all()


def test_raster_origin_not_attracted(fam, rot):
    with pytest.raises(OriginNotAttracted):
        # window far from 0: the pixel nearest the origin escapes
        basin_raster(fam, 0.9 * rot.lambda0, 5.0 + 0j, 0.5, (8, 8), n_max=50)


def test_inclusion_report_inflated_eps(model, fam, rot):
    cert = certify(model, fam, rot, 0.5, np.pi / 4)
    rep = inclusion_check(model, fam, cert, n_lambda=3, n_boundary=32,
                          eps_fraction=10.0)
    # no PASS claim outside the certified radius -- only that a report exists
    assert rep.n_lambda == 3
    assert isinstance(rep.passed, bool)
    assert rep.to_dict()["schema"] == "siegel-cert/1"


def test_kernel_radius_linear_family(rot):
    linfam = multiplier_scaled([], rot.lambda0)
    linmodel = build_model([0, rot.lambda0], rot, M=8)
    grid = np.linspace(0.1, 0.9, 9)
    assert kernel_radius(linmodel, linfam, 0.9 * rot.lambda0, grid) == 0.9


def test_koenigs_convergence_linear(rot):
    linfam = multiplier_scaled([], rot.lambda0)
    linmodel = build_model([0, rot.lambda0], rot, M=8)
    gaps = koenigs_convergence(linfam, [0.9 * rot.lambda0], linmodel, 0.5,
                               n_samples=8)
    assert gaps[0] < 1e-9


def test_example2_multiplier_closed_form(rot):
    rep = example2_check(rot, 3)  # q_3 = 3
    assert rep.comparison_fixed_residual < 1e-12
    assert rep.l_closed > 1
    assert rep.multiplier_gap < 1e-8


def test_example2_rejects_big_q(rot):
    with pytest.raises(InvalidArgument):
        example2_check(rot, 9)  # q_9 = 55 > 16


def test_example2_growth_list():
    rot2 = cf_expand("[1,1,512]", 5)
    rep = example2_check(rot2, 2)
    assert rep.growth_ok
    assert rep.z_star is not None
    assert abs(rep.z_star - 0.5) < 0.1
    assert rep.in_D3
