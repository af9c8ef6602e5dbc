import csv
import json

import pytest

from projsym.cli import main
from projsym.models import CheckResult, EntryReport, SuiteReport

EUCLIDEAN = json.dumps({
    "dim": 3,
    "coords": ["x", "y", "z"],
    "g": [["1", "0", "0"], ["1", "0"], ["1"]],
    "domain": [[0.5, 1.5], [0.5, 1.5], [0.5, 1.5]],
})


@pytest.fixture(autouse=True)
def no_seed_env(monkeypatch):
    monkeypatch.delenv("PROJSYM_SEED", raising=False)


@pytest.fixture
def failing_report():
    """Suite report with a single failed check"""
    check = CheckResult(name="symmetry[0]", max_residual=1.0, tol=1e-8, passed=False)
    entry = EntryReport(id="111-linear", params={}, checks=[check], generators=[], anchor="")
    return SuiteReport(version="0", config={}, entries=[entry], failed_checks=1, total_checks=1)


def _rows(path):
    with open(path, newline="", encoding="utf-8") as f:
        return list(csv.reader(f))


# Usage

def test_list(capsys):
    assert main(["list"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert any(line.startswith("111-linear\t") for line in lines)
    assert lines == sorted(lines)


def test_version(capsys):
    assert main(["--version"]) == 0
    assert capsys.readouterr().out.startswith("projsym ")


@pytest.mark.parametrize("argv", [
    [],
    ["bogus"],
    ["verify", "--param", "k1=1.0"],
    ["verify", "--entry", "no-such-entry"],
    ["verify", "--entry", "111-linear", "--param", "k1"],
    ["verify", "--entry", "111-linear", "--param", "k1=abc"],
    ["verify", "--entry", "111-linear", "--param", "k1=9"],
    ["verify", "--samples", "0"],
    ["check", "--metric", "{not json", "--vf", "[\"1\", \"0\", \"0\"]"],
    ["check", "--metric", "/no/such/file.json", "--vf", "[\"1\", \"0\", \"0\"]"],
])
def test_usage_errors(argv):
    assert main(argv) == 2


def test_invalid_seed_environment(monkeypatch):
    monkeypatch.setenv("PROJSYM_SEED", "abc")
    assert main(["verify", "--entry", "111-linear"]) == 2


# verify

def test_verify_writes_report(mocker, tmp_path, failing_report):
    runner = mocker.patch("projsym.cli.create_suite_runner")
    runner.return_value.run.return_value = failing_report
    path = tmp_path / "report.json"

    assert main(["verify", "--report", str(path)]) == 1

    args = runner.call_args[0]
    assert args[0] == 200
    assert args[1] == 0
    assert args[3] is None
    data = json.loads(path.read_text())
    assert data["header"]["tool"] == "projsym"
    assert "generated_at" in data["header"]
    assert data["report"]["failed_checks"] == 1
    assert data["report"]["entries"][0]["checks"][0]["pass"] is False
    assert "paper_anchor" in data["report"]["entries"][0]


def test_verify_seed_from_environment(mocker, monkeypatch, tmp_path, failing_report):
    monkeypatch.setenv("PROJSYM_SEED", "7")
    runner = mocker.patch("projsym.cli.create_suite_runner")
    runner.return_value.run.return_value = failing_report.model_copy(update={"failed_checks": 0})
    path = tmp_path / "report.json"

    assert main(["verify", "--entry", "111-linear", "--param", "k1=1.05", "--report", str(path),
                 "--no-timestamp"]) == 0

    samples, seed, _, ids, params = runner.call_args[0]
    assert seed == 7
    assert ids == ["111-linear"]
    assert params == {"k1": 1.05}
    assert "generated_at" not in json.loads(path.read_text())["header"]


def test_verify_explicit_seed_wins(mocker, monkeypatch, failing_report):
    monkeypatch.setenv("PROJSYM_SEED", "7")
    runner = mocker.patch("projsym.cli.create_suite_runner")
    runner.return_value.run.return_value = failing_report
    main(["verify", "--seed", "3"])
    assert runner.call_args[0][1] == 3


def test_parallel_report_is_byte_identical(tmp_path):
    serial, parallel = tmp_path / "serial.json", tmp_path / "parallel.json"
    argv = ["verify", "--entry", "21-cc-flat-1b", "--samples", "10", "--seed", "2", "--no-timestamp"]
    assert main(argv + ["--report", str(serial)]) == 0
    assert main(argv + ["--parallel", "--report", str(parallel)]) == 0
    assert serial.read_bytes() == parallel.read_bytes()
    assert json.loads(serial.read_text())["report"]["entries"][0]["id"] == "21-cc-flat-1b"


# check

def test_check_homothetic_field(capsys):
    assert main(["check", "--metric", EUCLIDEAN, "--vf", '["x", "y", "z"]', "--samples", "20"]) == 0
    result = json.loads(capsys.readouterr().out)["check"]
    assert result["projective"] is True
    assert result["class"] == "homothetic"
    assert result["lam"] == pytest.approx(2.0)


def test_check_non_projective_field(capsys):
    assert main(["check", "--metric", EUCLIDEAN, "--vf", '["0", "x^2", "0"]', "--samples", "20"]) == 1
    result = json.loads(capsys.readouterr().out)["check"]
    assert result["projective"] is False
    assert result["class"] is None


def test_check_reads_files(tmp_path, capsys):
    metric = tmp_path / "metric.json"
    metric.write_text(EUCLIDEAN)
    field = tmp_path / "field.json"
    field.write_text(json.dumps({"components": ["y", "-x", "0"]}))
    assert main(["check", "--metric", str(metric), "--vf", str(field), "--samples", "20"]) == 0
    assert json.loads(capsys.readouterr().out)["check"]["class"] == "killing"


def test_check_dimension_mismatch():
    assert main(["check", "--metric", EUCLIDEAN, "--vf", '["x", "y"]']) == 2


# benenti, geodesic, transport, solve-psi

def test_benenti_csv(tmp_path):
    path = tmp_path / "benenti.csv"
    assert main(["benenti", "--entry", "111-linear", "--grid", "3", "--out", str(path)]) == 0
    rows = _rows(path)
    assert rows[0] == ["x", "y", "z", "lambda1", "lambda2", "lambda3", "max_imag", "diagonalizable"]
    assert len(rows) == 4
    assert all(row[-1] == "1" for row in rows[1:])


def test_benenti_needs_a_partner():
    assert main(["benenti", "--entry", "21-cc-flat-1b"]) == 2


def test_geodesic_csv(tmp_path):
    path = tmp_path / "geodesic.csv"
    argv = ["geodesic", "--entry", "21-cc-flat-1a", "--slopes", "0.1", "0.2", "--range", "0.4", "1.0",
            "--grid", "5", "--out", str(path)]
    assert main(argv) == 0
    rows = _rows(path)
    assert rows[0] == ["x", "y", "z", "y_x", "z_x"]
    assert len(rows) == 6
    for x, y, z, dy, dz in (map(float, row) for row in rows[1:]):
        assert y == pytest.approx(0.7 + 0.1 * (x - 0.7), abs=1e-9)
        assert dz == pytest.approx(0.2, abs=1e-9)


def test_geodesic_point_dimension():
    assert main(["geodesic", "--entry", "21-cc-flat-1a", "--point", "1.0", "1.0"]) == 2


def test_transport_on_flat_space(tmp_path):
    path = tmp_path / "transport.csv"
    assert main(["transport", "--entry", "21-cc-flat-1a", "--out", str(path)]) == 0
    rows = _rows(path)
    assert rows[0] == ["generator", "field", "t", "defect"]
    assert len(rows) == 4


def test_transport_unknown_generator():
    assert main(["transport", "--entry", "21-cc-flat-1a", "--generator", "7"]) == 2


def test_solve_psi_csv(tmp_path):
    path = tmp_path / "psi.csv"
    assert main(["solve-psi", "--k", "0", "--range", "0.5", "1.5", "--init", "0", "1", "--grid", "5",
                 "--out", str(path)]) == 0
    rows = _rows(path)
    assert rows[0] == ["z", "psi", "psi_prime", "residual"]
    assert len(rows) == 6
    assert float(rows[1][0]) == 0.5


def test_solve_psi_excluded_k():
    assert main(["solve-psi", "--k", "-1", "--range", "0.5", "1.5", "--init", "0", "1"]) == 2
