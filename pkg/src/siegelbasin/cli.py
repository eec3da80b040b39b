"""Batch front end: subcommands wiring the toolkit into reproducible
experiments with machine-readable outputs (JSON / CSV / PGM).

Exit codes: 0 success, 1 domain error (single-line diagnostic on stderr),
2 usage error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import List, Optional, Sequence

import numpy as np

from .certificate import certify, theorem3_curve
from .contfrac import beta_prop31, cf_expand, star_discrepancy
from .errors import SiegelBasinError
from .family import AnalyticFamily, load_family, multiplier_scaled
from .siegel import build_model, level_curve
from .verify import (
    basin_raster,
    example2_check,
    inclusion_check,
    kernel_radius,
    koenigs_convergence,
)

SCHEMA = "siegel-cert/1"


def _parse_coeffs(text: str) -> np.ndarray:
    try:
        return np.array([complex(tok.replace(" ", ""))
                         for tok in text.split(",")], dtype=complex)
    except ValueError:
        raise SiegelBasinError(f"cannot parse coefficient list {text!r}")


def _parse_floats(text: str) -> List[float]:
    return [float(tok) for tok in text.split(",")]


def _parse_ints(text: str) -> List[int]:
    return [int(tok) for tok in text.split(",")]


def _emit_text(args, text: str) -> None:
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _emit_csv(args, header: Sequence[str], rows: Sequence[Sequence]) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    _emit_text(args, buf.getvalue())


def _emit_json(args, obj: dict) -> None:
    _emit_text(args, json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _rotation(args):
    return cf_expand(args.surd, args.k)


def _family(args, rot) -> AnalyticFamily:
    if getattr(args, "family", None):
        return load_family(args.family)
    higher = _parse_coeffs(args.coeffs)
    return multiplier_scaled(higher, rot.lambda0)


def _model(args, rot):
    higher = None
    if getattr(args, "family", None):
        fam = load_family(args.family)
        higher = fam.z_coeffs(rot.lambda0)[2:]
    else:
        higher = _parse_coeffs(args.coeffs)
    f0 = np.concatenate(([0.0, rot.lambda0], higher))
    return build_model(f0, rot, M=args.order, tol_conj=args.tol)


def _add_rotation_flags(p, k_default=20):
    p.add_argument("--surd", required=True,
                   help='rotation descriptor: "(p+q*sqrt(d))/r" or "[a1,a2,...]"')
    p.add_argument("--k", type=int, default=k_default,
                   help="number of continued-fraction quotients")


def _add_model_flags(p):
    p.add_argument("--coeffs", default="1",
                   help="higher coefficients a2,a3,... of f0 (complex literals)")
    p.add_argument("--family", default=None,
                   help="path to a family descriptor JSON (overrides --coeffs)")
    p.add_argument("--order", type=int, default=64, help="truncation order M")
    p.add_argument("--tol", type=float, default=1e-9,
                   help="conjugacy residual tolerance")


def _cmd_contfrac(args) -> int:
    rot = _rotation(args)
    rows = []
    for n in range(1, rot.K + 1):
        q_beta, bound = "", ""
        if n < rot.K and rot.q(n) <= args.max_disc_q:
            rep = star_discrepancy(rot, beta_prop31(rot, n), rot.q(n))
            q_beta = f"{rep.Q_exact:.12g}"
            bound = f"{rep.bound_prop31:.12g}"
        rows.append([n, rot.partial_quotients[n - 1], rot.p(n), rot.q(n),
                     q_beta, bound])
    _emit_csv(args, ["n", "a_n", "p_n", "q_n", "Q_beta0_qn", "bound_prop"],
              rows)
    return 0


def _cmd_linearize(args) -> int:
    rot = _rotation(args)
    model = _model(args, rot)
    dump = {
        "schema": SCHEMA,
        "lambda0": [model.lambda0.real, model.lambda0.imag],
        "rho_w": model.rho_w,
        "min_divisor": model.min_divisor,
        "order": int(model.psi_hat.order),
        "coefficients": [[c.real, c.imag] for c in model.psi_hat.coeffs],
        "residual_table": [[r, res] for r, res in model.residual_table],
    }
    _emit_json(args, dump)
    if args.curve_out:
        z = level_curve(model, args.curve_r, args.curve_n)
        with open(args.curve_out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["k", "re", "im"])
            for k, zz in enumerate(z):
                w.writerow([k, repr(zz.real), repr(zz.imag)])
    return 0


def _cmd_certify(args) -> int:
    rot = _rotation(args)
    model = _model(args, rot)
    fam = _family(args, rot)
    cert = certify(model, fam, rot, r0=args.r0, Theta=args.theta,
                   mode=args.mode, N=args.big_n, tau=args.tau)
    _emit_text(args, cert.to_json() + "\n")
    return 0


def _cmd_epsilon_curve(args) -> int:
    rot = _rotation(args)
    model = _model(args, rot)
    fam = _family(args, rot)
    rows, c_hat = theorem3_curve(model, fam, rot, args.theta,
                                 _parse_floats(args.r_grid), args.gamma)
    _emit_csv(args, ["r", "eps", "N", "ell", "valid", "floor", "C_hat"],
              [[row["r"], repr(row["eps"]), row["N"], row["ell"],
                int(row["valid"]), repr(row["floor"]), repr(c_hat)]
               for row in rows])
    return 0


def _cmd_verify_inclusion(args) -> int:
    rot = _rotation(args)
    model = _model(args, rot)
    fam = _family(args, rot)
    cert = certify(model, fam, rot, r0=args.r0, Theta=args.theta,
                   mode=args.mode, N=args.big_n, tau=args.tau)
    report = inclusion_check(model, fam, cert, n_lambda=args.n_lambda,
                             n_boundary=args.n_boundary,
                             eps_fraction=args.eps_fraction)
    out = report.to_dict()
    out["certificate"] = cert.to_dict()
    _emit_json(args, out)
    return 0 if report.passed else 1


def _cmd_basin(args) -> int:
    rot = _rotation(args)
    fam = _family(args, rot)
    if args.lam is not None:
        lam = complex(args.lam.replace(" ", ""))
    else:
        lam = rot.lambda0 * (1.0 - args.lam_scale)
    W, H = (int(tok) for tok in args.res.split("x"))
    ras = basin_raster(fam, lam, complex(args.center.replace(" ", "")),
                       args.half_width, (W, H), n_max=args.n_max)
    img = np.where(ras.mask, 255, 0).astype(np.uint8)
    header = f"P5\n{W} {H}\n255\n".encode("ascii")
    with open(args.out, "wb") as fh:
        fh.write(header)
        fh.write(img.tobytes())
    return 0


def _cmd_kernel_curve(args) -> int:
    rot = _rotation(args)
    model = _model(args, rot)
    fam = _family(args, rot)
    r_grid = _parse_floats(args.r_grid)
    rows = []
    for n in _parse_ints(args.n_list):
        lam = rot.lambda0 * (1.0 - 1.0 / n)
        r_max = kernel_radius(model, fam, lam, r_grid,
                              n_boundary=args.n_boundary, n_max=args.n_max)
        rows.append([n, repr(lam.real), repr(lam.imag), repr(r_max)])
    _emit_csv(args, ["n", "lam_re", "lam_im", "r_max"], rows)
    return 0


def _cmd_koenigs_converge(args) -> int:
    rot = _rotation(args)
    model = _model(args, rot)
    fam = _family(args, rot)
    ns = _parse_ints(args.n_list)
    lams = [rot.lambda0 * (1.0 - 1.0 / n) for n in ns]
    gaps = koenigs_convergence(fam, lams, model, args.r_compact,
                               n_samples=args.n_samples, tol=args.tol_limit)
    _emit_csv(args, ["n", "gap"], [[n, repr(g)] for n, g in zip(ns, gaps)])
    return 0


def _cmd_example1(args) -> int:
    rot = _rotation(args)
    model = _model(args, rot)
    fam = _family(args, rot)
    r_grid = _parse_floats(args.r_grid)
    rows = []
    for n in _parse_ints(args.n_list):
        p_n, q_n = rot.p(n), rot.q(n)
        # witness multipliers must approach the circle much faster than the
        # angles approach alpha, or the repelling cycle never closes in on 0
        mu = 1.0 - 8.0 ** (-q_n)
        lam = mu * np.exp(2j * np.pi * p_n / q_n)
        r_max = kernel_radius(model, fam, lam, r_grid,
                              n_boundary=args.n_boundary, n_max=args.n_max)
        rows.append([n, q_n, repr(mu), repr(r_max)])
    _emit_csv(args, ["n", "q_n", "mu_n", "r_max"], rows)
    return 0


def _cmd_example2(args) -> int:
    rot = _rotation(args)
    report = example2_check(rot, args.n)
    _emit_json(args, report.to_dict())
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="siegelbasin",
        description="Siegel-disk linearization, basin-inclusion certificates, "
                    "and convergence experiments.")
    ap.add_argument("--seed", type=int, default=0,
                    help="seed for any randomized sampling (defaults fixed)")
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("contfrac",
                       help="convergents and discrepancy table (CSV)")
    _add_rotation_flags(p, k_default=10)
    p.add_argument("--max-disc-q", type=int, default=100000,
                   help="skip discrepancy columns for q_n above this")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_contfrac)

    p = sub.add_parser("linearize", help="Siegel model JSON dump")
    _add_rotation_flags(p)
    _add_model_flags(p)
    p.add_argument("--curve-out", default=None,
                   help="also write level-curve samples CSV (columns k,re,im)")
    p.add_argument("--curve-r", type=float, default=0.5)
    p.add_argument("--curve-n", type=int, default=256)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_linearize)

    for name, fn, extra in (("certify", _cmd_certify, False),
                            ("verify-inclusion", _cmd_verify_inclusion, True)):
        p = sub.add_parser(name, help=f"{name} report (JSON)")
        _add_rotation_flags(p)
        _add_model_flags(p)
        p.add_argument("--r0", type=float, required=True)
        p.add_argument("--theta", type=float, default=np.pi / 4)
        p.add_argument("--mode", choices=("theorem3", "manual"),
                       default="theorem3")
        p.add_argument("--N", dest="big_n", type=int, default=None)
        p.add_argument("--tau", type=float, default=None)
        if extra:
            p.add_argument("--n-lambda", type=int, default=9)
            p.add_argument("--n-boundary", type=int, default=256)
            p.add_argument("--eps-fraction", type=float, default=0.9)
        p.add_argument("--out", default=None)
        p.set_defaults(func=fn)

    p = sub.add_parser("epsilon-curve", help="eps(r) along a radius grid (CSV)")
    _add_rotation_flags(p)
    _add_model_flags(p)
    p.add_argument("--theta", type=float, default=np.pi / 4)
    p.add_argument("--r-grid", default="0.5,0.6,0.7,0.8,0.9")
    p.add_argument("--gamma", type=float, default=1.6)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_epsilon_curve)

    p = sub.add_parser("basin", help="immediate-basin mask raster (PGM P5)")
    _add_rotation_flags(p)
    _add_model_flags(p)
    p.add_argument("--lam", default=None, help="parameter as a complex literal")
    p.add_argument("--lam-scale", type=float, default=1e-3,
                   help="use lam = lambda0*(1-s) when --lam is absent")
    p.add_argument("--center", default="0")
    p.add_argument("--half-width", type=float, default=1.5)
    p.add_argument("--res", default="256x256")
    p.add_argument("--n-max", type=int, default=20000)
    p.add_argument("--out", required=True)
    p.set_defaults(func=_cmd_basin)

    p = sub.add_parser("kernel-curve",
                       help="kernel radius along lam = lambda0*(1-1/n) (CSV)")
    _add_rotation_flags(p)
    _add_model_flags(p)
    p.add_argument("--n-list", default="4,8,16,32,64")
    p.add_argument("--r-grid", default=",".join(
        f"{r:.3f}" for r in np.linspace(0.05, 0.95, 19)))
    p.add_argument("--n-boundary", type=int, default=64)
    p.add_argument("--n-max", type=int, default=100000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_kernel_curve)

    p = sub.add_parser("koenigs-converge",
                       help="sup-gaps |phi_n - phi_0| on a compact (CSV)")
    _add_rotation_flags(p)
    _add_model_flags(p)
    p.add_argument("--n-list", default="4,8,16,32,64")
    p.add_argument("--r-compact", type=float, default=0.5)
    p.add_argument("--n-samples", type=int, default=32)
    p.add_argument("--tol-limit", type=float, default=1e-10)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_koenigs_converge)

    p = sub.add_parser("example1",
                       help="basin collapse along rational approach (CSV)")
    _add_rotation_flags(p)
    _add_model_flags(p)
    p.add_argument("--n-list", default="2,3,4,5")
    p.add_argument("--r-grid", default=",".join(
        f"{r:.3f}" for r in np.linspace(0.05, 0.95, 19)))
    p.add_argument("--n-boundary", type=int, default=32)
    p.add_argument("--n-max", type=int, default=50000)
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_example1)

    p = sub.add_parser("example2",
                       help="superexponential-quotient counterexample (JSON)")
    _add_rotation_flags(p, k_default=5)
    p.add_argument("--n", type=int, required=True, help="convergent index")
    p.add_argument("--out", default=None)
    p.set_defaults(func=_cmd_example2)
    return ap


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as e:
        return 2 if e.code not in (0, None) else 0
    np.random.seed(args.seed)
    try:
        return args.func(args)
    except SiegelBasinError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
