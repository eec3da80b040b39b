#!/usr/bin/env python3
"""Convergence and collapse experiments on the golden-mean quadratic.

Three sweeps, CSV on stdout:
  kernel    -- kernel radius along the radial approach lam0*(1-1/n)
  collapse  -- kernel radius along near-parabolic multipliers at the
               convergent angles p_n/q_n (basins shrink to the origin)
  koenigs   -- sup |phi_n - phi_0| on the half-radius level set

Usage: python3 scripts/convergence_experiments.py {kernel|collapse|koenigs}
"""

import sys

import numpy as np

from siegelbasin.contfrac import cf_expand
from siegelbasin.family import multiplier_scaled
from siegelbasin.siegel import build_model
from siegelbasin.verify import kernel_radius, koenigs_convergence


def main() -> int:
    which = sys.argv[1] if len(sys.argv) > 1 else "kernel"
    rot = cf_expand("(-1+1*sqrt(5))/2", 25)
    model = build_model([0, rot.lambda0, 1.0], rot, M=64)
    fam = multiplier_scaled([1.0], rot.lambda0)
    grid = np.linspace(0.05, 0.95, 19)

    if which == "kernel":
        print("n,r_max")
        for n in (4, 8, 16, 32, 64, 128):
            lam = rot.lambda0 * (1 - 1.0 / n)
            print(f"{n},{kernel_radius(model, fam, lam, grid)}")
    elif which == "collapse":
        print("n,q_n,mu_n,r_max")
        for n in (2, 3, 4, 5):
            p_n, q_n = rot.p(n), rot.q(n)
            mu = 1.0 - 8.0 ** (-q_n)
            lam = mu * np.exp(2j * np.pi * p_n / q_n)
            print(f"{n},{q_n},{mu!r},"
                  f"{kernel_radius(model, fam, lam, grid, n_max=200000)}")
    elif which == "koenigs":
        ns = (4, 8, 16, 32, 64, 128)
        lams = [rot.lambda0 * (1 - 1.0 / n) for n in ns]
        gaps = koenigs_convergence(fam, lams, model, 0.5)
        print("n,gap")
        for n, g in zip(ns, gaps):
            print(f"{n},{g!r}")
    else:
        print(f"unknown experiment {which!r}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
