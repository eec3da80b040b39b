"""CLI subcommands: exit codes, output formats, determinism."""

import json

import pytest

from siegelbasin.cli import main

GOLDEN = "(-1+1*sqrt(5))/2"


def test_contfrac_table(capsys):
    assert main(["contfrac", "--surd", GOLDEN, "--k", "6"]) == 0
    out = capsys.readouterr().out
    lines = out.strip().splitlines()
    assert lines[0] == "n,a_n,p_n,q_n,Q_beta0_qn,bound_prop"
    assert len(lines) == 7
    assert lines[1].startswith("1,1,1,1,")


def test_usage_error_exit_2(capsys):
    assert main(["certify", "--bogus-flag"]) == 2
    assert main(["no-such-subcommand"]) == 2


def test_domain_error_exit_1(capsys):
    rc = main(["certify", "--surd", GOLDEN, "--coeffs", "1", "--r0", "1.5"])
    assert rc == 1
    assert "r0 must lie in (0,1)" in capsys.readouterr().err


def test_rational_rotation_exit_1(capsys):
    rc = main(["contfrac", "--surd", "(1+1*sqrt(9))/8", "--k", "5"])
    assert rc == 1


def test_certify_json_deterministic(tmp_path):
    args = ["certify", "--surd", GOLDEN, "--coeffs", "1", "--r0", "0.5"]
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    assert main(args + ["--out", str(p1)]) == 0
    assert main(args + ["--out", str(p2)]) == 0
    assert p1.read_bytes() == p2.read_bytes()
    cert = json.loads(p1.read_text())
    assert cert["schema"] == "siegel-cert/1"
    assert cert["valid"] is True


def test_linearize_outputs(tmp_path, capsys):
    curve = tmp_path / "curve.csv"
    rc = main(["linearize", "--surd", GOLDEN, "--coeffs", "1",
               "--curve-out", str(curve), "--curve-n", "16"])
    assert rc == 0
    dump = json.loads(capsys.readouterr().out)
    assert dump["schema"] == "siegel-cert/1"
    assert 0 < dump["rho_w"] < 1
    lines = curve.read_text().strip().splitlines()
    assert lines[0] == "k,re,im"
    assert len(lines) == 17


def test_basin_pgm_format(tmp_path):
    out = tmp_path / "basin.pgm"
    rc = main(["basin", "--surd", GOLDEN, "--coeffs", "1",
               "--lam-scale", "0.05", "--res", "16x12",
               "--half-width", "0.5", "--n-max", "2000", "--out", str(out)])
    assert rc == 0
    data = out.read_bytes()
    assert data.startswith(b"P5\n16 12\n255\n")
    assert len(data) == len(b"P5\n16 12\n255\n") + 16 * 12


def test_example2_json(capsys):
    assert main(["example2", "--surd", "[1,1,512]", "--n", "2"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["schema"] == "siegel-cert/1"
    assert rep["growth_ok"] is True
    assert rep["in_D3"] is True


def test_koenigs_csv(capsys):
    rc = main(["koenigs-converge", "--surd", GOLDEN, "--coeffs", "1",
               "--n-list", "4,8", "--n-samples", "8"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "n,gap"
    assert len(lines) == 3


def test_verify_inclusion_passes(capsys):
    rc = main(["verify-inclusion", "--surd", GOLDEN, "--coeffs", "1",
               "--r0", "0.5", "--n-lambda", "3", "--n-boundary", "32"])
    assert rc == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["passed"] is True
    assert rep["certificate"]["valid"] is True
