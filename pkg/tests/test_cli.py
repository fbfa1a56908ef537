"""CLI contract: exit codes, JSON schema, build round-trip, verify."""
import json

import numpy as np
import pytest

from blockenc.circuit import count_resources, parse_circuit_text
from blockenc.cli import main

REPORT_KEYS = {"config", "qubits", "t_count", "t_depth", "breakdown",
               "formula", "match", "ledger_refs"}


@pytest.fixture
def matrix_csv(tmp_path):
    def write(a, name="matrix.csv"):
        path = tmp_path / name
        path.write_text("\n".join(",".join(f"{x:.12g}" for x in row)
                                  for row in np.atleast_2d(a)))
        return str(path)
    return write


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_estimate_prerotated_example(capsys):
    code, out, _ = run_cli(capsys, "estimate", "--n", "4", "--epsilon", "0.01",
                           "--alpha", "993.8", "--method", "prerotated",
                           "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert set(payload) == REPORT_KEYS
    # 10n + 8 R_y - 4 with R_y = 62
    assert payload["t_depth"] == 532
    assert payload["config"]["ry"] == 62


def test_estimate_constraint_error(capsys):
    code, _, err = run_cli(capsys, "estimate", "--method", "prerotated",
                           "--qram", "ss", "--n", "2", "--alpha", "5")
    assert code == 2
    assert "pre-rotated" in err


def test_estimate_table4_evaluation(capsys):
    code, out, _ = run_cli(capsys, "estimate", "--n", "2", "--lambda", "1",
                           "--t", "8", "--ry", "30", "--method", "fixed",
                           "--qram", "ss", "--alpha", "5.0", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    from blockenc.resources import evaluate
    want = evaluate("be_ss", n=2, t=8, lam=1, ry=30)
    assert payload["qubits"] == want.qubits
    assert payload["t_count"] == want.t_count


def test_estimate_qnorm_report(capsys, matrix_csv):
    path = matrix_csv(np.array([[3.0, 0.0], [0.0, 4.0]]))
    code, out, _ = run_cli(capsys, "estimate", "--matrix", path,
                           "--norm", "qnorm:1.0", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert abs(payload["mu_p"] - 4.0) < 1e-9


def test_build_round_trip(capsys, matrix_csv, tmp_path):
    path = matrix_csv(np.eye(2))
    out_path = tmp_path / "circuit.txt"
    code, out, _ = run_cli(capsys, "build", "--matrix", path, "--method",
                           "fixed", "--qram", "ss", "--lambda", "1",
                           "--t", "4", "--out", str(out_path))
    assert code == 0
    parsed = parse_circuit_text(out_path.read_text())
    report = json.loads(out_path.with_suffix(".report.json").read_text())
    assert set(report) >= REPORT_KEYS
    counted = count_resources(parsed, ry_cost=report["config"]["ry"])
    assert counted.qubits == report["qubits"]
    assert counted.t_count == report["t_count"]
    assert counted.t_depth == report["t_depth"]
    assert report["match"] is True


def test_build_padding_report(capsys, matrix_csv):
    rng = np.random.default_rng(0)
    path = matrix_csv(rng.standard_normal((3, 5)))
    code, out, _ = run_cli(capsys, "build", "--matrix", path, "--t", "3",
                           "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["config"]["original_shape"] == [3, 5]
    assert payload["config"]["padded_shape"] == [8, 8]


def test_build_prerotated_qubits_match_table5(capsys, matrix_csv):
    rng = np.random.default_rng(1)
    path = matrix_csv(rng.standard_normal((4, 4)))
    code, out, _ = run_cli(capsys, "build", "--matrix", path, "--method",
                           "prerotated", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["qubits"] == 4 * 16 - 3 * 4 + 2 * 2 - 1
    assert payload["match"] is True


def test_build_ragged_csv_rejected(capsys, tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,2\n3\n")
    code, _, err = run_cli(capsys, "build", "--matrix", str(path))
    assert code == 2
    assert "ragged" in err


def test_verify_pass_fixed(capsys, matrix_csv):
    rng = np.random.default_rng(2)
    path = matrix_csv(rng.standard_normal((4, 4)))
    code, out, _ = run_cli(capsys, "verify", "--matrix", path, "--method",
                           "fixed", "--qram", "ss", "--lambda", "2",
                           "--t", "8", "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["passed"] is True
    assert payload["error"] <= payload["bound"]


def test_verify_pass_prerotated(capsys, matrix_csv):
    rng = np.random.default_rng(3)
    path = matrix_csv(rng.standard_normal((4, 4)))
    code, out, _ = run_cli(capsys, "verify", "--matrix", path, "--method",
                           "prerotated", "--format", "json")
    assert code == 0
    assert json.loads(out)["passed"] is True


def test_verify_corrupted_angle_fails(capsys, matrix_csv):
    rng = np.random.default_rng(4)
    path = matrix_csv(rng.standard_normal((4, 4)))
    code, out, _ = run_cli(capsys, "verify", "--matrix", path, "--method",
                           "fixed", "--qram", "ss", "--lambda", "1",
                           "--t", "8", "--corrupt-angle", "--format", "json")
    assert code == 1
    assert json.loads(out)["passed"] is False


def test_verify_rejects_large_n(capsys, matrix_csv):
    path = matrix_csv(np.eye(16))
    code, _, err = run_cli(capsys, "verify", "--matrix", path, "--t", "4")
    assert code == 2
    assert "desk-scale" in err


def test_tables_command(capsys):
    code, out, _ = run_cli(capsys, "tables")
    assert code == 0
    assert "all 18 match" in out


def test_sweep_command(capsys):
    code, out, _ = run_cli(capsys, "sweep", "--n-max", "2", "--no-be",
                           "--format", "json")
    assert code == 0
    payload = json.loads(out)
    assert payload["unexplained"] == 0
