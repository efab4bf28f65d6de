import json

import numpy as np
import pytest

from splab.cli import main
from splab.io import load_matrix, save_matrix


def run_cli(*args):
    return main(list(args))


def test_eig_round_trip(tmp_path):
    a_path = tmp_path / "a.json"
    out = tmp_path / "eig.json"
    assert run_cli("example", "example11", "--eps", "1e-4", "--out", str(a_path)) == 0
    assert run_cli("eig", "--input", str(a_path), "--out", str(out)) == 0
    obj = json.loads(out.read_text())
    lam = [complex(re, im) for re, im in obj["lambda"]]
    assert lam[0] == pytest.approx(1.01, abs=1e-12)
    assert lam[2] == pytest.approx(0.5, abs=1e-12)
    from splab.io import obj_to_matrix
    from splab.linalg import eig
    x_back = obj_to_matrix(obj["X"])
    direct = eig(load_matrix(a_path)).x
    assert np.max(np.abs(x_back - direct)) <= 1e-15


def test_eig_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("1, 2\n3, oops\n")
    assert run_cli("eig", "--input", str(bad)) == 1


def test_report_success_and_flags(tmp_path, capsys):
    a_path = tmp_path / "a.json"
    rep_path = tmp_path / "rep.json"
    run_cli("example", "example11", "--eps", "1e-4", "--out", str(a_path))
    code = run_cli("report", "--input", str(a_path), "--perturb", "gaussian:1e-6",
                   "--select", "topk:2", "--seed", "42", "--out", str(rep_path))
    assert code == 0
    obj = json.loads(rep_path.read_text())
    assert obj["classical_valid"] is True
    assert float(obj["measured_sin"]) < 1e-5
    assert obj["match_strategy"] == "same-selector"


def test_report_zero_perturbation(tmp_path):
    a_path = tmp_path / "a.json"
    rep_path = tmp_path / "rep.json"
    run_cli("example", "example11", "--eps", "1e-4", "--out", str(a_path))
    save_matrix(tmp_path / "zero.json", np.zeros((3, 3), dtype=np.complex128))
    code = run_cli("report", "--input", str(a_path), "--perturb",
                   f"file:{tmp_path / 'zero.json'}", "--select", "topk:2",
                   "--out", str(rep_path))
    assert code == 0
    obj = json.loads(rep_path.read_text())
    assert float(obj["measured_sin"]) <= 1e-12
    assert float(obj["new_value_perj"]) == 0.0


def test_report_gap_violation_exits_2_but_writes(tmp_path):
    a_path = tmp_path / "a.json"
    da_path = tmp_path / "da.json"
    rep_path = tmp_path / "rep.json"
    save_matrix(a_path, np.diag([2.0, 1.0]).astype(np.complex128))
    save_matrix(da_path, np.diag([-1.0, 0.0]).astype(np.complex128))
    code = run_cli("report", "--input", str(a_path), "--perturb",
                   f"file:{da_path}", "--select", "topk:1", "--out", str(rep_path))
    assert code == 2
    obj = json.loads(rep_path.read_text())
    assert obj["gap_ok"] is False
    assert obj["new_value_perj"] == "inf"
    assert obj["delta_lambda"] == "0"


def test_numerical_failure_exits_3(tmp_path):
    # a defective (Jordan-block) input cannot be eigendecomposed to tolerance
    jordan = tmp_path / "jordan.json"
    save_matrix(jordan, np.array([[1.0, 1.0], [0.0, 1.0]], dtype=np.complex128))
    assert run_cli("eig", "--input", str(jordan)) == 3


def test_usage_errors_exit_1(tmp_path):
    assert run_cli("nosuchcommand") == 1
    assert run_cli("verify", "nosuchsuite") == 1
    a_path = tmp_path / "a.json"
    run_cli("example", "example11", "--eps", "1e-4", "--out", str(a_path))
    assert run_cli("report", "--input", str(a_path), "--perturb", "wat:1",
                   "--select", "topk:2") == 1
    assert run_cli("report", "--input", str(a_path), "--perturb", "gaussian:1e-6",
                   "--select", "bogus") == 1
    assert run_cli("example", "example11", "--eps", "2.0",
                   "--out", str(tmp_path / "x.json")) == 1
    assert run_cli("eig", "--input", str(tmp_path / "missing.json")) == 1


def test_verify_suite_small(tmp_path):
    out = tmp_path / "v.json"
    assert run_cli("verify", "lemma32", "--cases", "10", "--seed", "42",
                   "--out", str(out)) == 0
    records = json.loads(out.read_text())
    assert len(records) == 10
    assert all(rec["pass"] for rec in records)
    assert {"case_id", "seed", "residual", "threshold", "pass"} <= set(records[0])


def test_verify_scaling_and_contour(tmp_path):
    assert run_cli("verify", "scaling", "--out", str(tmp_path / "s.json")) == 0
    assert run_cli("verify", "contour", "--out", str(tmp_path / "c.json")) == 0


def test_sweep_table1_deterministic_bytes(tmp_path):
    out1, out2 = tmp_path / "t1.csv", tmp_path / "t2.csv"
    args = ("sweep", "table1", "--eps-list", "1e-2,1e-6", "--norm", "1e-6",
            "--seed", "42")
    assert run_cli(*args, "--out", str(out1)) == 0
    assert run_cli(*args, "--out", str(out2)) == 0
    assert out1.read_bytes() == out2.read_bytes()


def test_sweep_tightness_json_summary(tmp_path):
    out = tmp_path / "t.json"
    assert run_cli("sweep", "tightness", "--r", "2", "--format", "json",
                   "--out", str(out)) == 0
    obj = json.loads(out.read_text())
    assert "summary" in obj
    assert abs(float(obj["summary"]["slope_adjusted"]) + 2.0) <= 0.2


def test_sweep_special_and_v2necessity(tmp_path):
    assert run_cli("sweep", "special", "--eps", "1e-4", "--eps1", "1e-6",
                   "--out", str(tmp_path / "sp.json")) == 0
    assert run_cli("sweep", "v2necessity", "--delta", "0.05", "--delta1", "0.005",
                   "--eps", "1e-6", "--out", str(tmp_path / "v2.json")) == 0
    rec = json.loads((tmp_path / "v2.json").read_text())[0]
    assert rec["measured_le_bound"] is True
    assert rec["measured_exceeds_reduced"] is True


def test_report_nearest_match_strategy(tmp_path):
    a_path = tmp_path / "a.json"
    rep_path = tmp_path / "rep.json"
    run_cli("example", "example11", "--eps", "1e-4", "--out", str(a_path))
    code = run_cli("report", "--input", str(a_path), "--perturb", "gaussian:1e-6",
                   "--select", "topk:2", "--match", "nearest", "--seed", "42",
                   "--out", str(rep_path))
    assert code == 0
    assert json.loads(rep_path.read_text())["match_strategy"] == "nearest-assignment"


def test_tol_overrides_are_applied(tmp_path):
    a_path = tmp_path / "a.json"
    run_cli("example", "example11", "--eps", "1e-4", "--out", str(a_path))
    # kappa2(X) ~ 100 here, so a cap of 10 must reject the decomposition
    assert run_cli("eig", "--input", str(a_path), "--tol", "kappa_cap=10") == 3
    assert run_cli("eig", "--input", str(a_path), "--tol", "kappa_cap=1e6",
                   "--tol", "tol_eig=1e-8", "--out", str(tmp_path / "e.json")) == 0
    assert run_cli("eig", "--input", str(a_path), "--tol", "nonsense=1") == 1


def test_seed_env_var_used_when_flag_absent(tmp_path, monkeypatch):
    a_path = tmp_path / "a.json"
    run_cli("example", "example11", "--eps", "1e-4", "--out", str(a_path))
    r1, r2, r3 = (tmp_path / f"r{i}.json" for i in range(3))
    monkeypatch.setenv("SPLAB_SEED", "7")
    run_cli("report", "--input", str(a_path), "--perturb", "gaussian:1e-6",
            "--select", "topk:2", "--out", str(r1))
    run_cli("report", "--input", str(a_path), "--perturb", "gaussian:1e-6",
            "--select", "topk:2", "--seed", "42", "--out", str(r2))
    monkeypatch.delenv("SPLAB_SEED")
    run_cli("report", "--input", str(a_path), "--perturb", "gaussian:1e-6",
            "--select", "topk:2", "--seed", "7", "--out", str(r3))
    a = json.loads(r1.read_text())["measured_sin"]
    b = json.loads(r2.read_text())["measured_sin"]
    c = json.loads(r3.read_text())["measured_sin"]
    assert a == c
    assert a != b
