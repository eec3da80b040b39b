#!/usr/bin/env python3
"""Certificate sweep for the golden-mean quadratic: eps(r) curve, the
r0 = 0.5 certificate JSON, and the end-to-end inclusion report.

Usage: python3 scripts/certificate_sweep.py [outdir]
"""

import json
import sys
from pathlib import Path

import numpy as np

from siegelbasin.certificate import certify, theorem3_curve
from siegelbasin.contfrac import cf_expand
from siegelbasin.family import multiplier_scaled
from siegelbasin.siegel import build_model
from siegelbasin.verify import inclusion_check


def main() -> int:
    outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "out")
    outdir.mkdir(parents=True, exist_ok=True)

    rot = cf_expand("(-1+1*sqrt(5))/2", 25)
    model = build_model([0, rot.lambda0, 1.0], rot, M=64)
    fam = multiplier_scaled([1.0], rot.lambda0)

    cert = certify(model, fam, rot, r0=0.5, Theta=np.pi / 4)
    (outdir / "certificate.json").write_text(cert.to_json() + "\n")
    print(f"eps_star = {cert.eps_star:.6e}  (N={cert.N}, tau={cert.tau:.4f})")

    report = inclusion_check(model, fam, cert)
    (outdir / "inclusion.json").write_text(
        json.dumps(report.to_dict(), indent=2, sort_keys=True) + "\n")
    print(f"inclusion check: {'PASS' if report.passed else 'FAIL'} "
          f"(max radius {report.max_radius:.6f})")

    rows, c_hat = theorem3_curve(model, fam, rot, np.pi / 4,
                                 [0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8,
                                  0.85, 0.9], gamma=1.6)
    with open(outdir / "epsilon_curve.csv", "w") as fh:
        fh.write("r,eps,N,ell,floor\n")
        for row in rows:
            fh.write(f"{row['r']},{row['eps']!r},{row['N']},{row['ell']},"
                     f"{row['floor']!r}\n")
    print(f"epsilon curve written; calibrated C_hat = {c_hat:.4e}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
