"""
CLI: report contents, exit codes and byte-for-byte determinism.
"""

import io
import json
import math

import pytest

from lib import cli


def run(*argv):
    """(exit code, stdout text)"""
    stream = io.StringIO()
    code = cli.run(list(argv), stream=stream)
    return code, stream.getvalue()


def run_json(*argv):
    code, out = run(*argv)
    return code, (json.loads(out) if out else None)


# =============================================================================
# CERTIFY
# =============================================================================

def test_certify_json():
    code, report = run_json("certify", "--lambdas", "0,1,2", "--r", "1")
    assert code == 0
    assert report["schema_version"] == 1
    assert report["command"] == "certify"
    assert report["L"] == "-1/2"
    assert report["b"] == ["1", "1/2"]
    assert report["d"] == ["2", "-1/2"]
    assert report["B"] == "3/2"


def test_certify_every_r():
    code, report = run_json("certify", "--lambdas", "0,1,2")
    assert code == 0
    assert report["L"] == ["-1/2", "-1/2", "-1/2"]
    assert report["all_negative"] is True


@pytest.mark.parametrize("argv,expected", [
    (["--lambdas", "0,1,1", "--r", "1"], 3),
    (["--lambdas", "0,1", "--r", "1"], 3),
    (["--lambdas", "0,x,2", "--r", "1"], 2),
    (["--lambdas", "0,1,2", "--r", "4"], 2),
    (["--lambdas", "0,1/0,2", "--r", "1"], 2),
])
def test_certify_exit_codes(argv, expected):
    code, out = run("certify", *argv)
    assert code == expected
    assert out == ""


def test_certify_csv_and_text():
    code, out = run("certify", "--lambdas", "0,1,2", "--r", "1", "--output", "csv")
    assert code == 0
    assert out.splitlines() == ["r,index,b,c,d", "1,2,1,1,2", "1,3,1/2,-1/4,-1/2"]
    assert "\r" not in out

    code, out = run("certify", "--lambdas", "0,1,2", "--r", "1", "--output", "text")
    assert code == 0
    assert "L(r) certificate" in out
    assert "-1/2" in out


def test_out_file(tmp_path):
    target = tmp_path / "reports" / "cert.json"
    code, out = run("certify", "--lambdas", "0,1,2", "--r", "2", "--out", str(target))
    assert code == 0
    assert out == ""
    assert json.loads(target.read_text())["L"] == "-1/2"


# =============================================================================
# SCAN
# =============================================================================

def test_scan_reports_no_violations():
    code, report = run_json("scan", "--n", "3..5", "--trials", "15", "--seed", "42")
    assert code == 0
    assert report["violations"] == 0
    assert report["certificates"] == 15 * (3 + 4 + 5)
    assert report["n_range"] == [3, 5]
    assert report["offending"] == []
    assert report["per_n"]["4"]["trials"] == 15


def test_scan_is_deterministic():
    first = run("scan", "--n", "3..4", "--trials", "10", "--seed", "42")
    second = run("scan", "--n", "3..4", "--trials", "10", "--seed", "42")
    assert first == second
    other = run("scan", "--n", "3..4", "--trials", "10", "--seed", "43")
    assert other[1] != first[1]


def test_scan_workers_do_not_change_the_report():
    serial = run("scan", "--n", "3..4", "--trials", "8", "--seed", "5")
    parallel = run("scan", "--n", "3..4", "--trials", "8", "--seed", "5", "--workers", "2")
    assert serial == parallel


def test_scan_seed_from_environment(monkeypatch):
    monkeypatch.setenv("RIGIDITYKIT_SEED", "42")
    _, report = run_json("scan", "--n", "3", "--trials", "3")
    assert report["seed"] == 42


@pytest.mark.parametrize("argv", [
    ["--trials", "0"],
    ["--n", "2..4", "--trials", "3"],
    ["--n", "3..17", "--trials", "3"],
    ["--n", "5..3", "--trials", "3"],
    ["--n", "three", "--trials", "3"],
    ["--seed", "-1", "--trials", "3"],
])
def test_scan_rejects_bad_config(argv):
    code, out = run("scan", *argv)
    assert code == 2
    assert out == ""


# =============================================================================
# DERIVATIVES AND STOKES
# =============================================================================

def test_derivatives():
    code, report = run_json("derivatives", "--lambdas", "0,1,2", "--fj", "6")
    assert code == 0
    for path in ("generic", "closed_form", "cofactor"):
        assert report[path]["lambda_derivs"] == ["1", "-2", "1"]
    assert report["max_discrepancy"] == "0"
    assert report["moments_hold"] is True


def test_derivatives_zero_and_five_nodes():
    _, report = run_json("derivatives", "--lambdas", "0,1,2", "--fj", "0")
    assert report["closed_form"]["lambda_derivs"] == ["0", "0", "0"]
    _, report = run_json("derivatives", "--lambdas", "0,1,2,3,4", "--fj", "1")
    assert report["max_discrepancy"] == "0"


def test_derivatives_float_kind():
    code, report = run_json("derivatives", "--lambdas", "0,1,2", "--fj", "6", "--kind", "float")
    assert code == 0
    assert report["closed_form"]["lambda_derivs"] == pytest.approx([1.0, -2.0, 1.0])
    assert report["max_discrepancy"] < 1e-12


@pytest.mark.parametrize("f,A,rigid", [
    ("6,0,0", "-2", False),
    ("0,0,0", "0", True),
    ("6,6,6", "-6", False),
])
def test_stokes(f, A, rigid):
    code, report = run_json("stokes", "--lambdas", "0,1,2", "--f", f)
    assert code == 0
    assert report["A"] == A
    assert report["A_via_triple_sum"] == A
    assert report["is_rigid"] is rigid


def test_stokes_length_mismatch():
    code, _ = run("stokes", "--lambdas", "0,1,2", "--f", "1,2")
    assert code == 2


# =============================================================================
# HYPERSURFACES
# =============================================================================

@pytest.mark.parametrize("n", ["4", "6"])
def test_isoparametric_remark(n):
    code, report = run_json("isoparametric", "--n", n, "--g", n, "--samples", "100")
    assert code == 0
    assert report["samples"] == 100
    assert report["max_abs_R"] <= 1e-9
    assert report["holds"] is True


def test_isoparametric_csv_columns():
    code, out = run("isoparametric", "--n", "4", "--g", "4", "--samples", "100", "--output", "csv")
    assert code == 0
    lines = out.splitlines()
    assert lines[0] == "theta,l1,l2,l3,l4,H,S,R"
    assert len(lines) == 101


def test_isoparametric_minimal():
    code, report = run_json("isoparametric", "--n", "3", "--g", "3", "--minimal")
    assert code == 0
    assert report["theta_star"] == pytest.approx(math.pi / 6, abs=1e-10)
    assert report["S"] == pytest.approx(6.0, abs=1e-10)


def test_isoparametric_needs_multiplicities():
    assert run("isoparametric", "--n", "4", "--g", "2")[0] == 2
    code, report = run_json("isoparametric", "--n", "4", "--g", "2", "--m", "1,3", "--samples", "10")
    assert code == 0
    assert report["holds"] is False
    assert report["simple"] is False


def test_clifford():
    code, report = run_json("clifford", "--n", "4", "--r", "1")
    assert code == 0
    assert report["p1"] == pytest.approx(0.0, abs=1e-12)
    assert report["p2"] == pytest.approx(4.0, abs=1e-12)
    assert report["theta_star"] == pytest.approx(math.pi / 6, abs=1e-10)

    _, report = run_json("clifford", "--n", "2", "--r", "1")
    assert report["spectrum"] == pytest.approx([1.0, -1.0])

    assert run("clifford", "--n", "4", "--r", "4")[0] == 2


@pytest.mark.parametrize("n,r", [(2, 1), (5, 2), (10, 3), (16, 9)])
def test_clifford_holds_to_twelve_digits(n, r):
    code, report = run_json("clifford", "--n", str(n), "--r", str(r))
    assert code == 0
    assert report["tolerance"] == 1e-12
    assert abs(report["p1"]) <= 1e-12
    assert abs(report["p2"] - n) <= 1e-12
    assert report["holds"] is True


def test_clifford_tolerance_comes_from_settings(tmp_path, monkeypatch):
    path = tmp_path / "settings.json"
    path.write_text(json.dumps({"tolerances": {"remark": 10.0, "clifford": 1e-30}}))
    monkeypatch.setenv("RIGIDITYKIT_SETTINGS", str(path))
    code, report = run_json("clifford", "--n", "7", "--r", "3")
    assert report["tolerance"] == 1e-30
    assert report["holds"] is (abs(report["p1"]) <= 1e-30 and abs(report["p2"] - 7) <= 1e-30)
    assert code == (0 if report["holds"] else 1)


# =============================================================================
# MULTIPLICITIES AND CASES
# =============================================================================

def test_multiplicities():
    code, report = run_json("multiplicities", "--values", "2,-1", "--c", "0,6")
    assert code == 0
    assert report["profile"]["multiplicities"] == [1, 2]
    assert run("multiplicities", "--values", "1,2", "--c", "0,1")[0] == 2
    assert run("multiplicities", "--values", "0,2", "--c", "2,4")[0] == 3


def test_multiplicities_float():
    code, report = run_json("multiplicities", "--values", "2.0,-1.0", "--c", "0,6", "--kind", "float")
    assert code == 0
    assert report["profile"]["multiplicities"] == [1, 2]


def test_cases():
    code, report = run_json("cases")
    assert code == 0
    assert report["cases"] == [{"n": 4, "g": 4}, {"n": 6, "g": 6}]


def test_unknown_command_and_bad_choice():
    assert run("nope")[0] == 2
    assert run("cases", "--output", "xml")[0] == 2
