import json
import math
import subprocess
import sys

import pytest

from ghzw_roof.cli import EXIT_IO, EXIT_OK, EXIT_USAGE, EXIT_VERIFY, OUTDIR_ENV, RunConfig, UsageError, main


def run(capsys, *args):
    code = main(list(args))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_eval_ghz(capsys):
    code, out, _ = run(capsys, "eval", "--p", "1", "--phi", "0", "--r", "1")
    doc = json.loads(out)
    assert code == EXIT_OK
    assert doc["value"] == 1.0 and doc["region"] == "TETRA_GHZ"


@pytest.mark.parametrize("p, value, region", [(0.3, 0.0, "ZERO_POLYTOPE"), (0.8, None, "TETRA_GHZ")])
def test_eval_axis(capsys, axis, p, value, region):
    code, out, _ = run(capsys, "eval", "--p", str(p), "--axis")
    doc = json.loads(out)
    assert code == EXIT_OK and doc["region"] == region
    assert doc["value"] == pytest.approx(axis(p) if value is None else value, abs=1e-6)
    assert sum(m["weight"] for m in doc["decomposition"]) == pytest.approx(1.0, abs=1e-8)


def test_eval_surface_point_matches_pure_tangle(capsys):
    code, out, _ = run(capsys, "eval", "--p", "0.8", "--phi", "0", "--r", "1")
    assert code == EXIT_OK
    from ghzw_roof.tangle import sqrt_tau3_analytic

    assert json.loads(out)["value"] == pytest.approx(sqrt_tau3_analytic(0.8, 0.0), abs=1e-8)


@pytest.mark.parametrize(
    "args",
    [
        ["eval", "--p", "1.5"],
        ["eval", "--p", "0.5", "--r", "2"],
        ["eval", "--p", "nan"],
        ["eval"],
        ["nonsense"],
        ["surface", "--n-theta", "4"],
        ["curves", "--samples", "3"],
        ["verify", "--only", "12"],
        ["verify", "--tol-scale", "0"],
    ],
)
def test_usage_errors(capsys, args):
    code, _, err = run(capsys, *args)
    assert code == EXIT_USAGE
    assert "error" in err


def test_io_error(capsys):
    code, _, err = run(capsys, "structure", "--out", "/proc/forbidden/structure.json")
    assert code == EXIT_IO and "cannot write" in err


def test_run_config_validation():
    with pytest.raises(UsageError):
        RunConfig("surface", n_theta=2)
    with pytest.raises(UsageError):
        RunConfig("surface", fmt="xml")


def test_outputs_are_byte_identical(capsys, tmp_path, monkeypatch):
    monkeypatch.setenv(OUTDIR_ENV, str(tmp_path / "a"))
    assert run(capsys, "surface", "--n-theta", "8", "--n-phi", "12")[0] == EXIT_OK
    assert run(capsys, "curves", "--samples", "41")[0] == EXIT_OK
    assert run(capsys, "structure")[0] == EXIT_OK
    monkeypatch.setenv(OUTDIR_ENV, str(tmp_path / "b"))
    run(capsys, "surface", "--n-theta", "8", "--n-phi", "12")
    run(capsys, "curves", "--samples", "41")
    run(capsys, "structure")
    for name in ("surface.json", "curves.json", "structure.json"):
        a = (tmp_path / "a" / name).read_bytes()
        assert a == (tmp_path / "b" / name).read_bytes()
        json.loads(a)


def test_surface_csv_with_features(capsys, tmp_path):
    target = tmp_path / "s.csv"
    assert run(capsys, "surface", "--n-theta", "8", "--n-phi", "12", "--format", "csv", "--out", str(target))[0] == EXIT_OK
    assert target.read_text().startswith("theta,phi,region")
    assert json.loads((tmp_path / "s_features.json").read_text())["zero_states"]


def test_structure_fields(capsys, tmp_path):
    target = tmp_path / "st.json"
    run(capsys, "structure", "--out", str(target))
    doc = json.loads(target.read_text())
    assert doc["p0"]["computed"] == pytest.approx(4 * 2 ** (1 / 3) / (3 + 4 * 2 ** (1 / 3)), abs=1e-9)
    assert doc["lower_circle"]["distance"]["computed"] == pytest.approx(0.0711148, abs=5e-4)


def test_verify_pass_and_forced_fail(capsys, tmp_path):
    report = tmp_path / "r.json"
    code, out, _ = run(capsys, "verify", "--only", "1", "5", "--report", str(report))
    assert code == EXIT_OK
    assert out.count("[PASS]") == 2
    doc = json.loads(report.read_text())
    assert [c["id"] for c in doc["criteria"]] == [1, 5]
    code, out, _ = run(capsys, "verify", "--only", "1", "5", "--tol-scale", "1e-20")
    assert code == EXIT_VERIFY
    assert "[FAIL]" in out
    again = run(capsys, "verify", "--only", "1", "5", "--tol-scale", "1e-20")
    assert again[0] == EXIT_VERIFY


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ghzw_roof", "eval", "--p", "1"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["value"] == 1.0
    bad = subprocess.run([sys.executable, "-m", "ghzw_roof", "eval", "--p", "-1"], capture_output=True, text=True)
    assert bad.returncode == 2
