import json
from pathlib import Path
from typing import Any, Dict

import pytest

# pylint: disable=line-too-long, missing-function-docstring, missing-class-docstring, invalid-name, redefined-outer-name  # noqa: E501


@pytest.fixture()
def small_scenario() -> Dict[str, Any]:
    """A scenario small enough to run the whole default suite in seconds."""
    return {
        "schema_version": 1,
        "space": {"preset": "gaussian_line", "params": {"n_points": 61}, "aux_points": 41},
        "grid": {"n_levels": 8},
        "corpus": {
            "seed": 3,
            "size": 3,
            "random_sets": 5,
            "dual_functions": 3,
            "aperture_functions": 3,
        },
        "exponents": {"q": [1.0, 2.0], "apertures": [1.0, 2.0]},
        "dyadic": {"functions": 3, "lambdas": 4},
        "cone": {"params": {"n_side": 7}, "n_levels": 6, "trials": 5},
    }


@pytest.fixture()
def scenario_file(small_scenario: Dict[str, Any], tmp_path: Path) -> Path:
    path = tmp_path / "scenario.json"
    path.write_text(json.dumps(small_scenario, indent=2))
    return path
