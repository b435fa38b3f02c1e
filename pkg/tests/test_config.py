"""Testing scenario files."""
import json
from pathlib import Path

import pytest

from tentlab.config import (
    ExponentConfig,
    ScenarioConfig,
    config_from_dict,
    load_config,
    with_overrides,
)
from tentlab.errors import ConfigError

# pylint: disable=line-too-long, missing-function-docstring, missing-class-docstring, invalid-name, redefined-outer-name  # noqa: E501


def test_defaults_round_trip() -> None:
    data = json.loads(json.dumps(ScenarioConfig().as_dict()))
    assert config_from_dict(data) == ScenarioConfig()


def test_nested_values() -> None:
    config = config_from_dict(
        {
            "schema_version": 1,
            "space": {"preset": "uniform_local", "params": {"n_points": 50}},
            "exponents": {"q": [1, 1.5], "apertures": [1, 2]},
        }
    )
    assert config.space.params == {"n_points": 50}
    assert config.exponents.q == (1.0, 1.5)
    assert config.grid.n_levels == 32


@pytest.mark.parametrize(
    "data, field",
    [
        ({}, "schema_version"),
        ({"schema_version": 2}, "schema_version"),
        ({"schema_version": 1, "grid": {"levels": 3}}, "grid.levels"),
        ({"schema_version": 1, "corpus": {"seed": "x"}}, "corpus.seed"),
        ({"schema_version": 1, "corpus": {"seed": -1}}, "corpus.seed"),
        ({"schema_version": 1, "exponents": {"q": [0.5]}}, "exponents.q"),
        ({"schema_version": 1, "space": {"preset": "sphere"}}, "space.preset"),
        ({"schema_version": 1, "output": {"format": "xml"}}, "output.format"),
        ({"schema_version": 1, "suite": {"parallel": 1}}, "suite.parallel"),
        ({"schema_version": 1, "colour": "blue"}, "colour"),
    ],
)
def test_invalid_fields(data: dict, field: str) -> None:
    with pytest.raises(ConfigError) as err:
        config_from_dict(data)
    assert err.value.field == field


def test_exponents_validate_directly() -> None:
    with pytest.raises(ConfigError):
        ExponentConfig(p=0.5)


def test_field_error_line(tmp_path: Path) -> None:
    path = tmp_path / "scenario.json"
    path.write_text('{\n  "schema_version": 1,\n  "grid": {\n    "levels": 3\n  }\n}\n')
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert err.value.field == "grid.levels"
    assert err.value.line == 4


def test_syntax_error_line(tmp_path: Path) -> None:
    path = tmp_path / "scenario.json"
    path.write_text('{\n  "schema_version": 1,\n  "grid": {,\n}\n')
    with pytest.raises(ConfigError) as err:
        load_config(path)
    assert err.value.line == 3


def test_missing_file(tmp_path: Path) -> None:
    with pytest.raises(ConfigError):
        load_config(tmp_path / "absent.json")


def test_overrides() -> None:
    config = with_overrides(ScenarioConfig(), seed=5, out="elsewhere", fmt="csv", parallel=True)
    assert config.seed == 5
    assert config.output.out == "elsewhere"
    assert config.output.format == "csv"
    assert config.suite.parallel
    assert not config.output.timings
    assert with_overrides(config) == config
