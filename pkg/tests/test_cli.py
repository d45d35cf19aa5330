import json
import subprocess
import sys

import pytest

from tsmkit.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


# ---------------------------------------------------------------------------
# validate


def test_validate_heisenberg(capsys):
    code, out, _ = run_cli(capsys, "validate", "--group", "heisenberg:1", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["passed"] is True
    assert data["metivier"]["certified"] is True


def test_validate_plain_output(capsys):
    code, out, _ = run_cli(capsys, "validate", "--group", "quaternionic")
    assert code == 0
    assert "passed: True" in out


def test_validate_unknown_group(capsys):
    code, _, err = run_cli(capsys, "validate", "--group", "nonexistent")
    assert code == 2
    assert "error:" in err


# ---------------------------------------------------------------------------
# reduce


def test_reduce_quaternionic(capsys):
    code, out, _ = run_cli(
        capsys, "reduce", "--group", "quaternionic", "--lam", "3,4,0", "--json"
    )
    assert code == 0
    data = json.loads(out)
    assert data["mu"] == pytest.approx([5.0, 5.0], abs=1e-10)
    assert max(data["residual_orth"], data["residual_conj"]) <= 1e-10
    assert len(data["A"]) == 4


def test_reduce_degenerate_direction(capsys):
    code, _, err = run_cli(capsys, "reduce", "--group", "quaternionic", "--lam", "0,0,0")
    assert code == 1
    assert "reduction failed" in err


def test_reduce_bad_direction_text(capsys):
    code, _, err = run_cli(capsys, "reduce", "--group", "heisenberg:1", "--lam", "abc")
    assert code == 2
    assert "error:" in err


# ---------------------------------------------------------------------------
# mean


def test_mean_gaussian(capsys):
    code, out, _ = run_cli(
        capsys,
        "mean",
        "--group",
        "heisenberg:1",
        "--lam",
        "1",
        "--z",
        "0.3+0.2j",
        "--radius",
        "1.0",
        "--function",
        "gaussian:1",
        "--json",
    )
    assert code == 0
    data = json.loads(out)
    assert data["kind"] == "product"
    assert abs(data["value_im"]) < 1.0  # parsed a finite complex value
    assert data["stderr"] is None


def test_mean_reduced_route_matches_structural(capsys):
    args = [
        "mean",
        "--group",
        "heisenberg:1",
        "--lam",
        "1",
        "--z",
        "0.3+0.2j",
        "--radius",
        "1.0",
        "--json",
    ]
    code, out, _ = run_cli(capsys, *args)
    assert code == 0
    structural = json.loads(out)
    code, out, _ = run_cli(capsys, *args, "--reduced")
    assert code == 0
    reduced = json.loads(out)
    assert structural["value_re"] == pytest.approx(reduced["value_re"], abs=1e-10)
    assert structural["value_im"] == pytest.approx(reduced["value_im"], abs=1e-10)


def test_mean_laguerre_function(capsys):
    code, out, _ = run_cli(
        capsys,
        "mean",
        "--group",
        "heisenberg:1",
        "--lam",
        "1",
        "--z",
        "0.2+0.1j",
        "--radius",
        "0.8",
        "--function",
        "laguerre:1",
        "--json",
    )
    assert code == 0
    json.loads(out)


def test_mean_unknown_function(capsys):
    code, _, err = run_cli(
        capsys,
        "mean",
        "--group",
        "heisenberg:1",
        "--lam",
        "1",
        "--z",
        "0.2",
        "--radius",
        "1.0",
        "--function",
        "hermite:2",
    )
    assert code == 2
    assert "unknown mean integrand" in err


# ---------------------------------------------------------------------------
# ode-check


def test_ode_check_passes(capsys):
    code, out, _ = run_cli(capsys, "ode-check", "--p", "2", "--q", "1", "--json")
    assert code == 0
    data = json.loads(out)
    assert data["passed"] is True
    assert data["residual"] <= 1e-12


def test_ode_check_negative_nu_pair(capsys):
    code, out, _ = run_cli(
        capsys, "ode-check", "--p", "1", "--q", "1", "--nu1", "-1.0", "--nu2", "-1.0", "--json"
    )
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_ode_check_rejects_empty_grade(capsys):
    code, _, err = run_cli(capsys, "ode-check", "--p", "0", "--q", "0", "--json")
    assert code == 2
    assert "p + q" in err


# ---------------------------------------------------------------------------
# verify


def test_verify_single_suite(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--suite", "boundary", "--group", "heisenberg:1"
    )
    assert code == 0
    assert "suite boundary: PASS" in out
    assert "[ok ]" in out


def test_verify_quiet(capsys):
    code, out, _ = run_cli(
        capsys, "verify", "--suite", "boundary", "--group", "heisenberg:1", "--quiet"
    )
    assert code == 0
    assert "[ok ]" not in out
    assert out.strip().startswith("suite boundary: PASS")


def test_verify_requires_suite_or_config(capsys):
    code, _, err = run_cli(capsys, "verify")
    assert code == 2
    assert "give --suite" in err


def test_verify_config_file(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suite": "structure", "group": "quaternionic", "seed": 3}))
    code, out, _ = run_cli(capsys, "verify", "--config", str(cfg), "--quiet")
    assert code == 0
    assert "suite structure: PASS" in out


def test_verify_config_suite_conflict(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"suite": "structure"}))
    code, _, err = run_cli(capsys, "verify", "--suite", "reduce", "--config", str(cfg))
    assert code == 2
    assert "conflicts" in err


def test_verify_missing_config(capsys):
    code, _, err = run_cli(capsys, "verify", "--config", "/nonexistent/cfg.json")
    assert code == 2
    assert "error:" in err


def test_verify_writes_json_report(capsys, tmp_path):
    out_path = tmp_path / "report.json"
    code, _, _ = run_cli(
        capsys,
        "verify",
        "--suite",
        "structure",
        "--group",
        "heisenberg:1",
        "--quiet",
        "--out",
        str(out_path),
    )
    assert code == 0
    payload = json.loads(out_path.read_text())
    assert payload["passed"] is True
    assert payload["reports"][0]["suite"] == "structure"


def test_verify_writes_csv_report(capsys, tmp_path):
    out_path = tmp_path / "report.csv"
    code, _, _ = run_cli(
        capsys,
        "verify",
        "--suite",
        "boundary",
        "--group",
        "heisenberg:1",
        "--quiet",
        "--out",
        str(out_path),
        "--format",
        "csv",
    )
    assert code == 0
    lines = out_path.read_text().strip().splitlines()
    assert lines[0].startswith("suite,key,")
    assert all(line.split(",")[0] == "boundary" for line in lines[1:])


def test_verify_digest_is_stable_across_runs_and_threads(capsys):
    def digest_from(out):
        return out.strip().rsplit("digest ", 1)[1].rstrip(")")

    args = ["verify", "--suite", "reduce", "--group", "quaternionic", "--seed", "5", "--quiet"]
    _, out1, _ = run_cli(capsys, *args)
    _, out2, _ = run_cli(capsys, *args)
    assert digest_from(out1) == digest_from(out2)
    _, out3, _ = run_cli(capsys, *args, "--threads", "4")
    assert digest_from(out1) == digest_from(out3)


# ---------------------------------------------------------------------------
# process-level entry point


def test_console_entry_point_runs():
    proc = subprocess.run(
        [sys.executable, "-m", "tsmkit.cli", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "tsmkit" in proc.stdout
