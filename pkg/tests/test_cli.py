"""End-to-end tests that drive the installed entry point in a subprocess."""
import json
import os
import shutil
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from modal_lab.document import decode_matrix

ROOT = Path(__file__).resolve().parents[1]
FIX = ROOT / "fixtures"


def cli(*args, env=None):
    full_env = {k: v for k, v in os.environ.items() if k != "MODAL_LAB_SEED"}
    full_env.update(env or {})
    return subprocess.run([sys.executable, "-m", "modal_lab", *map(str, args)],
                          capture_output=True, env=full_env, cwd=ROOT)


def cli_json(*args, **kw):
    proc = cli(*args, "--out", "json", **kw)
    return proc, (json.loads(proc.stdout) if proc.stdout else None)


def test_modal_qubit_example():
    proc, rep = cli_json("modal", "--input", FIX / "qubit.json", "--algebra", "full", "--state", "mixed")
    assert proc.returncode == 0
    r = rep["results"]
    assert (r["modal_dim"], r["trivial"], r["orthodox_dim"]) == (2, False, 1)
    assert rep["summary"]["total"] == len(rep["claims"]) == rep["summary"]["passed"]
    assert "duration_s" not in rep


def test_nested_factors_scenario():
    proc, rep = cli_json("scenario", "--scenario", "nested_factors")
    assert proc.returncode == 0
    witness = rep["results"]["artifacts"]["witness"]
    assert np.allclose(decode_matrix(witness, "w", []), np.kron(np.diag([1, -1]), np.eye(4)))


def test_verify_exit_zero():
    proc, rep = cli_json("verify", "--seed", "42")
    assert proc.returncode == 0, proc.stdout.decode()
    assert rep["summary"]["failed"] == 0 and rep["summary"]["total"] == 12


@pytest.mark.parametrize("args", [
    ("generate", "--input", FIX / "qutrit.json", "--algebra", "block"),
    ("commutant", "--input", FIX / "chain222.json", "--algebra", "outer"),
    ("center", "--input", FIX / "qutrit.json", "--algebra", "block"),
    ("centralizer", "--input", FIX / "qutrit.json", "--algebra", "full", "--state", "degenerate"),
    ("support", "--input", FIX / "qutrit.json", "--algebra", "full", "--state", "pure_ish"),
    ("orthodox", "--input", FIX / "qubit.json", "--algebra", "full", "--state", "plus"),
    ("decompose", "--input", FIX / "chain222.json", "--algebra", "outer", "--state", "ghz"),
    ("doubles", "--input", FIX / "pair22.json", "--algebra", "system", "--state", "schmidt"),
    ("kms-check", "--input", FIX / "qutrit.json", "--algebra", "block", "--state", "coherent"),
    ("scenario", "--scenario", "measurement", "--coefficients", "0.6,0.4"),
    ("scenario", "--scenario", "triviality", "--dim", "3", "--samples", "4"),
    ("scenario", "--scenario", "correlation", "--input", FIX / "pair22.json", "--state", "schmidt"),
])
def test_commands_succeed(args):
    proc, rep = cli_json(*args)
    assert proc.returncode == 0, proc.stderr.decode() + proc.stdout.decode()
    assert rep["command"] == args[0] and rep["summary"]["failed"] == 0


def test_reported_values():
    _, rep = cli_json("centralizer", "--input", FIX / "qutrit.json", "--algebra", "full", "--state", "degenerate")
    assert rep["results"]["dim"] == 5
    _, rep = cli_json("support", "--input", FIX / "qutrit.json", "--algebra", "full", "--state", "pure_ish")
    assert np.allclose(decode_matrix(rep["results"]["projection"], "p", []), np.diag([1, 1, 0]))
    _, rep = cli_json("doubles", "--input", FIX / "pair22.json", "--algebra", "system", "--state", "schmidt")
    assert sorted(round(t["joint"], 12) for t in rep["results"]["table"]) == [0, 0.3, 0.7, 1]
    _, rep = cli_json("decompose", "--input", FIX / "qubit.json", "--algebra", "full", "--state", "mixed")
    assert np.allclose(sorted(rep["results"]["weights"]), [0.3, 0.7])


def test_failed_claim_exit_one():
    # at eq_tol = 1e-300 rounding residuals fail membership checks
    proc = cli("modal", "--input", FIX / "qutrit.json", "--algebra", "full", "--state", "coherent",
               "--tol", "1e-300")
    assert proc.returncode == 1
    assert b"[FAIL]" in proc.stdout


@pytest.mark.parametrize("args, message", [
    (("modal", "--input", "missing.json", "--algebra", "full", "--state", "mixed"), b"cannot read"),
    (("modal", "--input", FIX / "qubit.json", "--algebra", "nope", "--state", "mixed"), b"no algebra named"),
    (("modal", "--input", FIX / "qubit.json", "--algebra", "full"), b"needs --state"),
    (("doubles", "--input", FIX / "pair22.json", "--algebra", "system", "--state", "product"), b"not faithful"),
    (("kms-check", "--input", FIX / "qubit.json", "--algebra", "full", "--state", "plus"), b"not faithful"),
    (("scenario", "--scenario", "unknown"), b"unknown scenario"),
    (("scenario", "--scenario", "measurement", "--coefficients", "0.5,0.4"), b"coefficients"),
    (("frobnicate",), b"invalid choice"),
])
def test_input_errors_exit_two(args, message):
    proc = cli(*args)
    assert proc.returncode == 2
    assert message in proc.stderr
    assert proc.stdout == b""


def test_parse_diagnostics(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"ambient": {"dim": 2}, "states": {"rho": {"density": [[0.5, 0], [0, 0.4]]}}}))
    proc = cli("support", "--input", bad, "--algebra", "x", "--state", "rho")
    assert proc.returncode == 2 and b"states.rho" in proc.stderr


def test_bad_env_seed():
    proc = cli("verify", env={"MODAL_LAB_SEED": "abc"})
    assert proc.returncode == 2 and b"MODAL_LAB_SEED" in proc.stderr


def test_determinism_and_env_seed():
    args = ("kms-check", "--input", FIX / "qutrit.json", "--algebra", "full", "--state", "generic")
    a = cli(*args, "--seed", 5, "--out", "json")
    b = cli(*args, "--seed", 5, "--out", "json")
    assert a.stdout == b.stdout
    c = cli(*args, "--out", "json", env={"MODAL_LAB_SEED": "5"})
    ra, rc = json.loads(a.stdout), json.loads(c.stdout)
    assert ra["results"] == rc["results"] and rc["seed"] == 5
    d = cli(*args, "--seed", 6, "--out", "json")
    assert json.loads(d.stdout)["results"]["values"] != ra["results"]["values"]


def test_t_samples_flag():
    _, rep = cli_json("kms-check", "--input", FIX / "qubit.json", "--algebra", "full", "--state", "mixed",
                      "--t-samples=-1,0,0.5,2")
    assert rep["results"]["t_samples"] == [-1.0, 0.0, 0.5, 2.0]
    assert len(rep["results"]["values"]) == 4


def test_output_file_and_text(tmp_path):
    out = tmp_path / "report.txt"
    proc = cli("center", "--input", FIX / "qutrit.json", "--algebra", "block", "--output", out)
    assert proc.returncode == 0 and proc.stdout == b""
    text = out.read_text()
    assert "summary: 1 passed, 0 failed, 1 claims" in text and "duration:" in text


def test_timing_flag_adds_duration():
    _, rep = cli_json("center", "--input", FIX / "qutrit.json", "--algebra", "block", "--timing")
    assert rep["duration_s"] >= 0


def test_emitted_basis_round_trips():
    from modal_lab.document import parse

    _, rep = cli_json("generate", "--input", FIX / "qutrit.json", "--algebra", "block")
    basis = [decode_matrix(m, "b", []) for m in rep["results"]["basis"]]
    # feed the emitted basis back in as generators: same algebra
    doc = parse(json.dumps({"ambient": {"dim": 3}, "algebras": {"g": rep["results"]["basis"]}}))
    assert doc.algebra("g").dim == rep["results"]["dim"] == len(basis)


def test_console_script_installed():
    exe = shutil.which("modal-lab")
    if exe is None:
        pytest.skip("console script not on PATH")
    proc = subprocess.run([exe, "center", "--input", FIX / "qubit.json", "--algebra", "full"],
                          capture_output=True, cwd=ROOT)
    assert proc.returncode == 0
