"""
End-to-end tests of the command-line front end (analyze, broadcast, verify).
"""
import json
from pathlib import Path

import pytest

from app.exceptions import NumericalViolation
from app.main import EXIT_NUMERICAL, EXIT_OK, EXIT_USAGE, main, parse_config
from app.services.cloning import BroadcastResult
from app.services.entanglement import EntanglementReport
from app.services.verification import VerificationReport

FIXTURES = Path(__file__).parent / "fixtures"


def _run(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def _status_of(output: str, name: str) -> str:
    for line in output.splitlines():
        if line.startswith(name + " "):
            return line.split()[-1]
    raise AssertionError(f"no row named {name}")


# --- analyze -------------------------------------------------------------------

def test_analyze_ghz(capsys):
    code, out, _ = _run(capsys, "analyze", "--ghz")
    assert code == EXIT_OK
    assert "E3        1" in out
    assert "E2(1,2)   0.333333333333 (= 1/3)" in out
    assert "M_xyy(1,2,3) = -1" in out


def test_analyze_ghz_state_file_matches_builtin(capsys):
    _, builtin, _ = _run(capsys, "analyze", "--ghz")
    _, from_file, _ = _run(capsys, "analyze", "--state", str(FIXTURES / "ghz.txt"))
    assert builtin == from_file


def test_analyze_product_state(capsys):
    code, out, _ = _run(capsys, "analyze", "--state", str(FIXTURES / "product.txt"))
    assert code == EXIT_OK
    assert "E3        0" in out


def test_analyze_text_format(capsys):
    code, out, _ = _run(capsys, "analyze", "--ghz", "--format", "text")
    assert code == EXIT_OK
    report = EntanglementReport.model_validate_json(out)
    assert abs(report.E3 - 1) <= 1e-9
    assert list(json.loads(out))[:4] == ["lambda1", "lambda2", "lambda3", "K12"]


def test_malformed_state_file(capsys):
    code, out, err = _run(capsys, "analyze", "--state", str(FIXTURES / "bad.txt"))
    assert code == EXIT_USAGE
    assert out == ""
    assert "expected 8 amplitude lines" in err


def test_binary_state_file(capsys, tmp_path):
    path = tmp_path / "binary.txt"
    path.write_bytes(b"\xff\xfe 0\n" + b"0 0\n" * 7)
    code, out, err = _run(capsys, "analyze", "--state", str(path))
    assert code == EXIT_USAGE
    assert out == ""
    assert "not a UTF-8 text file" in err


def test_non_ascii_digits_are_rejected(capsys, tmp_path):
    path = tmp_path / "arabic.txt"
    path.write_text("\u0661 0\n" + "0 0\n" * 7, encoding="utf-8")
    code, out, err = _run(capsys, "analyze", "--state", str(path))
    assert code == EXIT_USAGE
    assert out == ""
    assert "line 1" in err


def test_numerical_violation_exits_one(capsys, monkeypatch):
    def violate(rho):
        raise NumericalViolation("density matrix has negative eigenvalue -1.000e-03")

    monkeypatch.setattr("app.main.full_report", violate)
    code, out, err = _run(capsys, "analyze", "--ghz")
    assert code == EXIT_NUMERICAL
    assert out == ""
    assert "numerical violation" in err


def test_missing_state_file(capsys):
    code, _, err = _run(capsys, "analyze", "--state", str(FIXTURES / "missing.txt"))
    assert code == EXIT_USAGE
    assert err.startswith("error:")


# --- broadcast ---------------------------------------------------------------------

def test_broadcast_nonlocal_ghz(capsys):
    code, out, _ = _run(capsys, "broadcast", "--ghz", "--mode", "nonlocal")
    assert code == EXIT_OK
    assert "0.308641975309" in out  # E3 = 25/81
    assert "0.611111111111" in out  # F = 11/18


def test_broadcast_local_ghz(capsys):
    code, out, _ = _run(capsys, "broadcast", "--ghz", "--mode", "local")
    assert code == EXIT_OK
    assert "0.291666666667" in out
    assert "0.0694444444444" in out


def test_broadcast_local_product_text(capsys):
    code, out, _ = _run(
        capsys, "broadcast", "--state", str(FIXTURES / "product.txt"), "--mode", "local", "--format", "text"
    )
    assert code == EXIT_OK
    result = BroadcastResult.model_validate_json(out)
    assert result.mode == "local"
    assert result.report_originals.E3 <= 1e-9


def test_broadcast_requires_mode():
    with pytest.raises(SystemExit) as excinfo:
        main(["broadcast", "--ghz"])
    assert excinfo.value.code == 2


def test_state_source_is_required():
    with pytest.raises(SystemExit) as excinfo:
        main(["analyze"])
    assert excinfo.value.code == 2


# --- verify ------------------------------------------------------------------------

def test_verify_table(capsys):
    code, out, _ = _run(capsys, "verify")
    assert code == EXIT_OK
    assert _status_of(out, "E3(GHZ)") == "PASS"
    assert _status_of(out, "offdiag(local clone)") == "FLAG"
    assert _status_of(out, "E3(nonlocal clone)") == "PASS"
    assert _status_of(out, "diag_000(local clone)") == "PASS"
    assert " 0 FAIL" in out


def test_verify_text(capsys):
    code, out, _ = _run(capsys, "verify", "--format", "text")
    assert code == EXIT_OK
    report = VerificationReport.model_validate_json(out)
    assert report.count("FAIL") == 0
    flagged = {row.name for row in report.rows if row.status == "FLAG"}
    assert flagged == {
        "offdiag(local clone)",
        "M_xxx(local clone)",
        "M_xyy(local clone)",
        "M_yxy(local clone)",
        "M_yyx(local clone)",
        "E3(local clone)",
        "F1(local clone)",
    }
    rows = {row.name: row for row in report.rows}
    assert rows["M_xyy(local clone)"].published == "-7/27"
    assert abs(rows["M_xyy(local clone)"].simulated + 8 / 27) <= 1e-9
    assert rows["M_yyx(nonlocal clone)"].status == "PASS"
    for clone in ("local clone", "nonlocal clone"):
        assert rows[f"max|lambda|({clone})"].status == "PASS"
        assert rows[f"max|other M|({clone})"].status == "PASS"


def test_verify_rejects_non_positive_tolerance(capsys):
    code, _, err = _run(capsys, "verify", "--tolerance", "0")
    assert code == EXIT_USAGE
    assert "error:" in err


def test_parse_config_defaults():
    config = parse_config(["analyze", "--ghz"])
    assert config.state_path is None
    assert config.format == "table"
    assert config.mode is None
