"""Testing the command line end to end."""
import csv
import json
from pathlib import Path

import pytest

from tentlab import __version__
from tentlab.cli import DECOMPOSITION_COLUMNS, EXIT_OK, EXIT_USAGE, main

# pylint: disable=line-too-long, missing-function-docstring, missing-class-docstring, invalid-name, redefined-outer-name  # noqa: E501


def test_version(capsys: pytest.CaptureFixture) -> None:
    assert main(["--version"]) == EXIT_OK
    assert __version__ in capsys.readouterr().out


def test_unknown_command() -> None:
    assert main(["nothing"]) == EXIT_USAGE


def test_space_summary(scenario_file: Path, capsys: pytest.CaptureFixture) -> None:
    assert main(["space", "--config", str(scenario_file)]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["space"]["n_points"] == 61
    assert set(payload["doubling"]) == {"1", "2"}
    assert payload["metric"]["passed"]


def test_space_preset_flag(scenario_file: Path, capsys: pytest.CaptureFixture) -> None:
    assert main(["region", "--config", str(scenario_file), "--space", "uniform_local"]) == EXIT_OK
    summary = json.loads(capsys.readouterr().out)
    assert summary["n_levels"] == 8
    assert sum(summary["nodes_per_level"]) == summary["n_nodes"]


def test_corrupt_space_file(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    path = tmp_path / "space.json"
    path.write_text('{\n  "points": [0, 1\n')
    assert main(["space", "--space", str(path)]) == EXIT_USAGE
    assert "line" in capsys.readouterr().err


def test_suite_with_corrupt_space_file(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    path = tmp_path / "space.json"
    path.write_text('{\n  "points": [0, 1\n')
    out = tmp_path / "out"
    assert main(["suite", "--space", str(path), "--out", str(out)]) == EXIT_USAGE
    assert "line" in capsys.readouterr().err
    assert not (out / "report.json").exists()


def test_corrupt_config(tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    path = tmp_path / "scenario.json"
    path.write_text('{"schema_version": 1, "grid": {"levels": 3}}')
    assert main(["suite", "--config", str(path)]) == EXIT_USAGE
    assert "grid.levels" in capsys.readouterr().err


def test_norms(scenario_file: Path, capsys: pytest.CaptureFixture) -> None:
    assert main(["norms", "--config", str(scenario_file), "--q", "1"]) == EXIT_OK
    payload = json.loads(capsys.readouterr().out)
    assert payload["tpq"] > 0
    assert payload["tinf"] > 0
    assert payload["q"] == 1.0


def test_decompose(scenario_file: Path, tmp_path: Path, capsys: pytest.CaptureFixture) -> None:
    out = tmp_path / "out"
    code = main(["decompose", "--config", str(scenario_file), "--out", str(out)])
    assert code == EXIT_OK
    printed = json.loads(capsys.readouterr().out)
    with open(out / "decomposition.csv", newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        rows = list(reader)
    assert tuple(reader.fieldnames) == DECOMPOSITION_COLUMNS
    certificate = json.loads((out / "certificate.json").read_text())
    assert certificate["n_terms"] == printed["n_terms"]
    assert certificate["passed"] is True
    assert certificate["n_terms"] == len(rows) > 0
    assert all(float(row["lambda"]) > 0 for row in rows)


def test_maximal_dyadic(scenario_file: Path, tmp_path: Path) -> None:
    out = tmp_path / "report"
    args = ["maximal", "--config", str(scenario_file), "--report", str(out)]
    assert main(args) == EXIT_OK
    data = json.loads((out / "report.json").read_text())
    assert [record["name"] for record in data["records"]] == [
        "dyadic.partition",
        "dyadic.weak11",
        "dyadic.containment",
    ]


def test_suite_is_byte_reproducible(scenario_file: Path, tmp_path: Path) -> None:
    codes = []
    for name in ("first", "second"):
        codes.append(main(["suite", "--config", str(scenario_file), "--out", str(tmp_path / name)]))
    assert codes == [EXIT_OK, EXIT_OK]
    first = (tmp_path / "first" / "report.json").read_bytes()
    assert first == (tmp_path / "second" / "report.json").read_bytes()
    data = json.loads(first)
    assert len(data["records"]) == 35
    assert not [r["name"] for r in data["records"] if r["status"] == "fail"]


def test_suite_csv(scenario_file: Path, tmp_path: Path) -> None:
    out = tmp_path / "csv"
    main(["suite", "--config", str(scenario_file), "--out", str(out), "--format", "csv"])
    with open(out / "report.csv", newline="", encoding="utf-8") as handle:
        rows = list(csv.reader(handle))
    assert len(rows) == 36
    assert rows[0][:3] == ["name", "anchor", "status"]
    assert (out / "curve_doubling_constants.csv").is_file()
