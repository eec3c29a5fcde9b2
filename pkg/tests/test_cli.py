import csv
import io
import json

import pytest

from conftest import read_csv
from vilentropy.cli import run


def _run(argv, stdin=None, monkeypatch=None):
    out, err = io.StringIO(), io.StringIO()
    if stdin is not None:
        monkeypatch.setattr("sys.stdin", io.StringIO(stdin))
    code = run(argv, stdout=out, stderr=err)
    return code, out.getvalue(), err.getvalue()


def _csv_rows(text):
    body = [line for line in text.splitlines() if not line.startswith("#")]
    return list(csv.DictReader(body))


def test_vilenkin_table_csv_golden():
    code, out, _ = _run(["vilenkin-table", "--radix", "3", "--count", "28", "--format", "csv"])
    assert code == 0
    rows = _csv_rows(out)
    want = read_csv("vilenkin_s3_0_27.csv")
    assert len(rows) == 28
    fixes = {23: 16, 24: 12}
    for w, h in zip(want, rows):
        n = int(w["n"])
        assert int(h["n"]) == n
        if n < 27:
            assert h["digits"] == f'{w["n2"]}{w["n1"]}{w["n0"]}'.lstrip("0") or h["digits"] == "0"
        assert int(h["neg"]) == fixes.get(n, int(w["neg"]))
        assert (h["class"], h["Z"], h["Ztilde"]) == (w["class"], w["Z"], w["Ztilde"])


def test_vilenkin_table_s4_upper_block():
    code, out, _ = _run(["vilenkin-table", "--radix", "4", "--count", "16", "--start", "32", "--format", "csv"])
    assert code == 0
    rows = _csv_rows(out)
    for w, h in zip(read_csv("vilenkin_s4_32_47.csv"), rows):
        assert (h["n"], h["neg"], h["class"], h["Z"], h["Ztilde"]) == (w["n"], w["neg"], w["class"], w["Z"], w["Ztilde"])


def test_lattice_json_example():
    code, out, _ = _run(["lattice", "--d", "2", "--mode", "euclid", "--lmax", "2", "--format", "json"])
    assert code == 0
    rep = json.loads(out)
    last = rep["rows"][-1]
    assert (last["l"], last["A_l"], last["d_l"]) == (2, 6, 3)
    assert "budgets" in rep["header"] and "seed" in rep["header"]


def test_header_echoes_seed_and_budgets(monkeypatch):
    monkeypatch.setenv("VILENTROPY_SCAN_BUDGET", "12345")
    code, out, _ = _run(["levy", "--window", "0,7", "--p", "2", "--samples", "500", "--seed", "11"])
    assert code == 0
    head = json.loads(out)["header"]
    assert head["seed"] == 11
    assert head["budgets"]["VILENTROPY_SCAN_BUDGET"] == 12345


def test_unknown_flag_is_usage_error():
    code, out, err = _run(["lattice", "--d", "2", "--bogus"])
    assert code == 2 and out == ""
    assert "usage" in err


def test_unknown_command_is_usage_error():
    code, _, err = _run(["frobnicate"])
    assert code == 2 and "usage" in err


@pytest.mark.parametrize(
    "argv",
    [
        ["levy", "--window", "0,7", "--p", "2"],
        ["entropy", "--diag", "1,0.5", "--k", "1"],
        ["urysohn", "--body", "sup", "--n", "2"],
    ],
)
def test_stochastic_commands_require_seed(argv):
    code, out, err = _run(argv)
    assert code == 2 and out == ""
    assert "--seed" in err


def test_resource_error_exit(monkeypatch):
    monkeypatch.setenv("VILENTROPY_LATTICE_BUDGET", "10")
    code, out, err = _run(["lattice", "--d", "3", "--lmax", "40"])
    assert code == 3 and out == ""
    assert "budget" in err


def test_bad_input_is_usage_error():
    code, _, _ = _run(["classify", "--radix", "1", "--n", "3"])
    assert code == 2


@pytest.mark.parametrize(
    "argv",
    [
        ["levy", "--window", "0,15", "--p", "inf", "--samples", "3000", "--seed", "5"],
        ["entropy", "--diag", "1,0.5", "--k", "1:3", "--budget", "2000", "--seed", "2"],
        ["bounds", "upper", "--multiplier", "exp:gamma=1,r=1", "--d", "1", "--k", "100"],
    ],
)
def test_byte_identical_reruns(argv):
    runs = [_run(argv + ["--workers", str(w)])[1] for w in (1, 1, 3)]
    assert runs[0] and runs[0] == runs[1] == runs[2]


def test_full_precision_and_rounded_columns():
    code, out, _ = _run(["bounds", "constants", "--multiplier", "exp:gamma=1,r=1", "--d", "1", "--format", "csv"])
    assert code == 0
    text = "\n".join(line for line in out.splitlines() if not line.startswith("#"))
    assert "1.1774100225154747" in text
    assert "1.17741" in text


def test_bounds_header_flags_constants():
    code, out, _ = _run(["bounds", "lower", "--multiplier", "finite:gamma=1.5", "--d", "1", "--k", "50"])
    assert code == 0
    assert json.loads(out)["header"]["constants_normalized"] is True


def test_project_from_stdin(monkeypatch):
    vec = json.dumps({"0,0": 1.0, "1,2": 2.0, "3,3": 0.5})
    code, out, _ = _run(["project", "--R", "3"], stdin=vec, monkeypatch=monkeypatch)
    assert code == 0
    rep = json.loads(out)
    assert [r["index"] for r in rep["rows"]] == ["0,0", "1,2"]
    assert rep["header"]["l2"] == pytest.approx(5**0.5)


def test_keps_and_classify_run():
    code, out, _ = _run(["keps", "--multiplier", "finite:gamma=1.5", "--d", "1", "--eps", "0.4", "--p", "2", "--N", "4:64:4"])
    assert code == 0 and json.loads(out)
    code, out, _ = _run(["classify", "--radix", "3", "--n", "0:8", "--format", "csv"])
    assert code == 0
    rows = _csv_rows(out)
    assert [r["direct"] for r in rows][:3] == ["M", "K", "L"]
    assert all(r["agree"] == "true" for r in rows)
