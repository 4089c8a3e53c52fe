import json
import math
import subprocess
import sys

import numpy as np
import pytest

from circulant_mub.cli import (
    EXIT_FAILURES,
    EXIT_OK,
    EXIT_USAGE,
    SCHEMA,
    main,
    parse_span,
)


def run_json(capsys, argv):
    code = main(argv + ["--format", "json"])
    out = capsys.readouterr().out
    return code, json.loads(out)


def strip_timing(doc):
    doc = dict(doc)
    doc.pop("elapsed_s", None)
    doc["records"] = [
        {k: v for k, v in record.items() if k != "elapsed_s"} for record in doc["records"]
    ]
    return doc


def test_parse_span():
    assert list(parse_span("7")) == [7]
    assert list(parse_span("2..5")) == [2, 3, 4, 5]
    assert list(parse_span("-3..-1")) == [-3, -2, -1]
    from circulant_mub.cli import UsageError

    with pytest.raises(UsageError):
        parse_span("5..2")
    with pytest.raises(UsageError):
        parse_span("abc")


def test_build_document(capsys):
    code, doc = run_json(capsys, ["build", "--dim", "2"])
    assert code == EXIT_OK
    assert doc["schema"] == SCHEMA
    assert doc["command"] == "build"
    assert doc["config"]["dim"] == 2
    family = doc["family"]
    assert family["dimension"] == 2
    assert family["recipe"] == "DTwo"
    assert [b["label"] for b in family["bases"]] == ["I", "F", "Y"]
    by_label = {b["label"]: b for b in family["bases"]}
    assert by_label["I"]["scale"] == 1.0
    # Hadamard members are serialized as scale * unimodular entries
    y = by_label["Y"]
    assert y["scale"] == pytest.approx(1 / math.sqrt(2))
    dense = np.array([[complex(re, im) for re, im in row] for row in y["entries"]])
    assert np.abs(dense * y["scale"] - np.array([[1, 1j], [1j, 1]]) / math.sqrt(2)).max() < 1e-12
    checks = {r["check"] for r in doc["records"]}
    assert checks == {"family-size", "pair-unbiased"}
    assert doc["summary"]["failed"] == 0
    assert doc["summary"]["total"] == 1 + 3


def test_build_rejects_dimension_one(capsys):
    assert main(["build", "--dim", "1"]) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_verify_span(capsys):
    code, doc = run_json(capsys, ["verify", "--dims", "2..8"])
    assert code == EXIT_OK
    assert doc["summary"]["failed"] == 0
    checks = {r["check"] for r in doc["records"]}
    assert {
        "family-size",
        "pair-unbiased",
        "clock-shift-commutation",
        "fourier-diagonalizes-shift",
        "fourier-square-is-reversal",
        "fourier-order-four",
        "rotation-diagonalization",
        "rotation-clock-conjugation",
        "rotation-order",
        "rotation-power-clock",
        "phased-fourier-identity",
        "rotation-square-not-hadamard",
    } <= checks
    negatives = [r for r in doc["records"] if r["check"] == "rotation-square-not-hadamard"]
    assert sorted(r["case"]["d"] for r in negatives) == [4, 6, 8]
    assert all(r["passed"] for r in negatives)


def test_verify_is_deterministic_and_parallel_safe(capsys):
    _, first = run_json(capsys, ["verify", "--dims", "2..6"])
    _, second = run_json(capsys, ["verify", "--dims", "2..6"])
    _, threaded = run_json(capsys, ["verify", "--dims", "2..6", "--parallelism", "4"])
    assert strip_timing(first)["records"] == strip_timing(second)["records"]
    threaded_doc = strip_timing(threaded)
    threaded_doc["config"] = None
    reference = strip_timing(first)
    reference["config"] = None
    assert threaded_doc["records"] == reference["records"]


def test_verify_rejects_dimensions_below_two(capsys):
    assert main(["verify", "--dims", "0..3"]) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_expect_negative_flag(capsys):
    assert main(["verify", "--dims", "4", "--expect-negative", "r-squared"]) == EXIT_OK
    capsys.readouterr()
    assert main(["verify", "--dims", "3", "--expect-negative", "r-squared"]) == EXIT_USAGE


def test_gauss_identity(capsys):
    code, doc = run_json(capsys, ["gauss", "identity", "--d", "3..15"])
    assert code == EXIT_OK
    assert doc["summary"]["failed"] == 0
    assert all(r["check"] == "gauss-identity" for r in doc["records"])
    dims = {r["case"]["d"] for r in doc["records"]}
    assert dims == {3, 5, 7, 9, 11, 13, 15}


def test_gauss_identity_noncoprime_multiplier(capsys):
    assert main(["gauss", "identity", "--d", "9", "--l", "3"]) == EXIT_USAGE
    capsys.readouterr()
    code, doc = run_json(
        capsys, ["gauss", "identity", "--d", "9", "--l", "3", "--allow-noncoprime"]
    )
    assert code == EXIT_OK
    record = doc["records"][0]
    assert record["check"] == "gauss-identity-probe"
    assert record["passed"] is None
    assert "sqrt(d)" in record["detail"]
    assert doc["summary"]["informational"] == 1


def test_gauss_requires_modulus_span(capsys):
    assert main(["gauss", "identity"]) == EXIT_USAGE


def test_gauss_reciprocity(capsys):
    code, doc = run_json(capsys, ["gauss", "reciprocity", "--a", "1..4", "--d", "1..8"])
    assert code == EXIT_OK
    assert doc["summary"]["failed"] == 0
    assert len(doc["records"]) == 4 * 8
    assert all("parity-valid" in r["detail"] for r in doc["records"])


def test_gauss_even_trace_powersums(capsys):
    assert run_json(capsys, ["gauss", "even", "--d", "2..12"])[0] == EXIT_OK
    assert run_json(capsys, ["gauss", "trace", "--d", "3..15"])[0] == EXIT_OK
    assert run_json(capsys, ["gauss", "powersums", "--d", "3..7"])[0] == EXIT_OK
    assert main(["gauss", "even", "--d", "3"]) == EXIT_USAGE
    capsys.readouterr()
    assert main(["gauss", "powersums", "--d", "9"]) == EXIT_USAGE


def test_seq_gauss_verdicts(capsys):
    code, doc = run_json(capsys, ["seq", "gauss", "--d", "9"])
    assert code == EXIT_OK
    by_k = {r["case"]["k"]: r for r in doc["records"]}
    assert set(by_k) == set(range(1, 9))
    assert all(r["passed"] for r in doc["records"])
    assert "expected not bi-unimodular" in by_k[3]["detail"]
    assert "expected bi-unimodular" in by_k[1]["detail"]


def test_search_dimension_two(capsys):
    code, doc = run_json(capsys, ["search", "--d", "2", "--alphabet", "4"])
    assert code == EXIT_OK
    total = [r for r in doc["records"] if r["check"] == "search-total"][0]
    assert "8 bi-unimodular sequences in 1 orbits out of 16 candidates" in total["detail"]
    orbits = [r for r in doc["records"] if r["check"] == "search-orbit"]
    assert len(orbits) == 1
    assert "exponents of e(2*pi*i/4)" in orbits[0]["detail"]


def test_search_dimension_three(capsys):
    code, doc = run_json(capsys, ["search", "--d", "3", "--alphabet", "3"])
    assert code == EXIT_OK
    total = [r for r in doc["records"] if r["check"] == "search-total"][0]
    assert "18 bi-unimodular sequences in 2 orbits out of 27 candidates" in total["detail"]


def test_search_bounds(capsys):
    assert main(["search", "--d", "7", "--alphabet", "2"]) == EXIT_USAGE
    capsys.readouterr()
    assert main(["search", "--d", "2", "--alphabet", "13"]) == EXIT_USAGE


def test_sweep_combines_batteries(capsys):
    code, doc = run_json(capsys, ["sweep", "--dims", "2..6"])
    assert code == EXIT_OK
    assert doc["summary"]["failed"] == 0
    checks = {r["check"] for r in doc["records"]}
    assert {"pair-unbiased", "gauss-identity", "triangular-trace", "even-gauss-sum"} <= checks


def test_text_and_csv_formats(capsys):
    assert main(["verify", "--dims", "3", "--format", "text"]) == EXIT_OK
    text = capsys.readouterr().out
    assert "summary:" in text
    assert "pass" in text
    assert main(["verify", "--dims", "3", "--format", "csv"]) == EXIT_OK
    csv_text = capsys.readouterr().out
    assert csv_text.splitlines()[0] == "check,case,passed,deviation,tolerance,elapsed_s,detail"
    assert main(["build", "--dim", "3", "--format", "csv"]) == EXIT_OK
    build_csv = capsys.readouterr().out
    assert build_csv.splitlines()[0] == "basis,row,col,re,im"


def test_output_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code = main(["verify", "--dims", "2", "--format", "json", "--output", str(target)])
    assert code == EXIT_OK
    assert capsys.readouterr().out == ""
    doc = json.loads(target.read_text())
    assert doc["schema"] == SCHEMA


def test_tolerance_flag_and_environment(capsys, monkeypatch):
    monkeypatch.delenv("MUB_DEFAULT_TOL", raising=False)
    assert main(["verify", "--dims", "5", "--tol", "1e-30"]) == EXIT_FAILURES
    capsys.readouterr()
    monkeypatch.setenv("MUB_DEFAULT_TOL", "not-a-number")
    assert main(["verify", "--dims", "5"]) == EXIT_USAGE
    capsys.readouterr()
    monkeypatch.setenv("MUB_DEFAULT_TOL", "1e-2")
    code, doc = run_json(capsys, ["verify", "--dims", "5"])
    assert code == EXIT_OK
    assert doc["config"]["tolerance_base"] == pytest.approx(1e-2)
    # an explicit flag beats the environment
    code, doc = run_json(capsys, ["verify", "--dims", "5", "--tol", "1e-8"])
    assert doc["config"]["tolerance_base"] == pytest.approx(1e-8)
    monkeypatch.setenv("MUB_DEFAULT_TOL", "-1.0")
    assert main(["verify", "--dims", "5"]) == EXIT_USAGE


def test_dense_cap_flag(capsys):
    assert main(["build", "--dim", "20", "--dense-cap", "10"]) == EXIT_USAGE
    assert "error:" in capsys.readouterr().err


def test_parallelism_validation(capsys):
    assert main(["verify", "--dims", "2", "--parallelism", "0"]) == EXIT_USAGE


def test_missing_required_arguments_exit_two(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["verify"])
    assert excinfo.value.code == 2


def test_version_flag(capsys):
    with pytest.raises(SystemExit) as excinfo:
        main(["--version"])
    assert excinfo.value.code == 0
    assert "circulant-mub" in capsys.readouterr().out


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "circulant_mub", "verify", "--dims", "2..3"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "summary:" in proc.stdout
