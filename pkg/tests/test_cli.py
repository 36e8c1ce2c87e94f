import json

import numpy as np

from qhekit.catalog import build_qotp_scheme
from qhekit.cli import main
from qhekit.layout import Layout
from qhekit.linalg import basis_ket
from qhekit.localiser import LocalisationProblem
from qhekit.serialize import problem_to_json, scheme_to_json


def run_cli(*argv):
    return main(list(argv))


def read_json(path):
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def test_check_tag_evaluate_all_pass(tmp_path):
    out = tmp_path / "report.json"
    code = run_cli(
        "check", "--builder", "tag-evaluate", "--params", "n=1", "S=I,X,Z",
        "--format", "json", "--out", str(out),
    )
    assert code == 0
    payload = read_json(out)
    assert set(payload["reports"]) == {"security", "completeness", "theorem1"}
    assert all(r["verdict"] == "pass" for r in payload["reports"].values())


def test_check_identity_security_fails(capsys):
    code = run_cli("check", "--builder", "identity", "--params", "n=1", "--which", "security")
    assert code == 2
    assert "security: fail" in capsys.readouterr().out


def test_check_qotp_theorem1_inapplicable(tmp_path):
    out = tmp_path / "r.json"
    code = run_cli(
        "check", "--builder", "qotp", "--params", "n=1", "--which", "theorem1",
        "--format", "json", "--out", str(out),
    )
    assert code == 3
    payload = read_json(out)
    assert payload["reports"]["theorem1"]["reason"] == "message-correlated-with-retained-key"


def test_check_malformed_scheme_file(tmp_path, capsys):
    bad = tmp_path / "scheme.json"
    bad.write_text(json.dumps({"registers": [["input", 2]]}))
    code = run_cli("check", "--scheme", str(bad))
    assert code == 1
    assert "missing field" in capsys.readouterr().err


def test_localise_constructed_secure(tmp_path):
    out = tmp_path / "result.json"
    code = run_cli(
        "localise", "--builder", "constructed-secure", "--params", "dims=2,2,2", "seed=7",
        "--format", "json", "--out", str(out),
    )
    assert code == 0
    payload = read_json(out)
    assert payload["verdict"] == "pass"
    assert payload["reconstruction_residual"] <= 1e-8


def test_localise_leaky_refused(tmp_path):
    out = tmp_path / "refusal.json"
    code = run_cli(
        "localise", "--builder", "leaky", "--params", "dims=2,2,2", "seed=1",
        "--format", "json", "--out", str(out),
    )
    assert code == 2
    payload = read_json(out)
    assert payload["reason"] == "leakage-detected"
    assert payload["max_deviation"] >= 0.99


def test_localise_identity_problem_file(tmp_path):
    layout = Layout((("A1", 2), ("A2", 2), ("B", 2)))
    problem = LocalisationProblem(
        layout, np.eye(8, dtype=complex), basis_ket(2, 0), basis_ket(2, 0)
    )
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(problem_to_json(problem)))
    out = tmp_path / "result.json"
    code = run_cli("localise", "--problem", str(path), "--format", "json", "--out", str(out))
    assert code == 0
    assert read_json(out)["rank"] == 1


def test_audit_set_size(capsys):
    assert run_cli("audit", "--set-size", "4") == 0
    assert "qubits_required: 2" in capsys.readouterr().out


def test_audit_classical_two_bits(tmp_path):
    out = tmp_path / "audit.json"
    assert run_cli("audit", "--classical-bits", "2", "--format", "json", "--out", str(out)) == 0
    payload = read_json(out)
    assert payload["set_size"] == 24
    assert payload["log2_ceil"] == 5
    assert payload["exponential_bound_holds"] is True


def test_audit_classical_one_bit_reports_exception(capsys):
    assert run_cli("audit", "--classical-bits", "1") == 0
    assert "exponential_bound_holds: false" in capsys.readouterr().out


def test_audit_oversize_rejected(capsys):
    assert run_cli("audit", "--classical-bits", "7") == 1
    assert "1..6" in capsys.readouterr().err


def test_export_scheme_round_trip(tmp_path):
    out = tmp_path / "scheme.json"
    code = run_cli("export-scheme", "--builder", "qotp", "--params", "n=1", "--out", str(out))
    assert code == 0
    payload = read_json(out)
    reference = scheme_to_json(build_qotp_scheme(1))
    assert json.dumps(payload, sort_keys=True) == json.dumps(reference, sort_keys=True)
    # the exported file loads and checks cleanly
    assert run_cli("check", "--scheme", str(out), "--which", "security") == 0


def test_list_catalog_plain(capsys):
    assert run_cli("list-catalog") == 0
    out = capsys.readouterr().out
    assert "identity-1" in out and "expected" in out


def test_list_catalog_verify_exit_zero(capsys):
    assert run_cli("list-catalog", "--verify") == 0
    assert "all verdicts match" in capsys.readouterr().out


def test_reports_deterministic_across_runs(tmp_path):
    a = tmp_path / "a.json"
    b = tmp_path / "b.json"
    args = ("check", "--builder", "qotp", "--params", "n=1", "--format", "json")
    assert run_cli(*args, "--out", str(a)) == 3
    assert run_cli(*args, "--out", str(b)) == 3
    assert a.read_text() == b.read_text()


def test_bad_tolerance_rejected(capsys):
    assert run_cli("check", "--builder", "qotp", "--params", "n=1", "--tol", "security=-1") == 1
    assert "positive" in capsys.readouterr().err


def test_tolerance_override_changes_verdict():
    # With an absurdly loose tolerance even the identity scheme "passes".
    assert run_cli(
        "check", "--builder", "identity", "--params", "n=1",
        "--which", "security", "--tol", "security=2.0",
    ) == 0
