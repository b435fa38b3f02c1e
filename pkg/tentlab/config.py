"""
Scenario configuration: a frozen dataclass tree loaded from versioned JSON
"""

import dataclasses
import json
import logging
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union, get_args, get_origin, get_type_hints

from tentlab.errors import ConfigError
from tentlab.spaces import PRESETS

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1


@dataclass(frozen=True)
class SpaceConfig:
    """The main space (a preset or a definition file) and the size of the auxiliary spaces."""

    preset: str = "gaussian_line"
    params: Dict[str, Any] = field(default_factory=dict)
    file: Optional[str] = None
    aux_points: int = 201

    def __post_init__(self) -> None:
        if self.file is None and self.preset not in PRESETS:
            raise ConfigError("space.preset", f"unknown preset {self.preset!r}")
        if self.file is not None and not Path(self.file).is_file():
            raise ConfigError("space.file", f"{self.file} does not exist")
        if self.aux_points < 5:
            raise ConfigError("space.aux_points", "must be at least 5")


@dataclass(frozen=True)
class GridConfig:
    """Time grid: ``n_levels`` log-uniform levels, by default spanning [min m/8, max m)."""

    n_levels: int = 32
    t_min: Optional[float] = None
    t_max: Optional[float] = None

    def __post_init__(self) -> None:
        if self.n_levels < 1:
            raise ConfigError("grid.n_levels", "must be at least 1")
        if self.t_min is not None and not self.t_min > 0:
            raise ConfigError("grid.t_min", "must be positive")
        if self.t_min is not None and self.t_max is not None and not self.t_max > self.t_min:
            raise ConfigError("grid.t_max", "must exceed grid.t_min")


@dataclass(frozen=True)
class CorpusConfig:
    seed: int = 0
    size: int = 100
    complex_values: bool = False
    random_sets: int = 100
    dual_functions: int = 20
    aperture_functions: int = 20

    def __post_init__(self) -> None:
        if self.seed < 0:
            raise ConfigError("corpus.seed", "must be a nonnegative integer")
        for name in ("size", "random_sets", "dual_functions", "aperture_functions"):
            if getattr(self, name) < 1:
                raise ConfigError(f"corpus.{name}", "must be at least 1")


@dataclass(frozen=True)
class ExponentConfig:
    """Exponents p and q and the apertures of the doubling and change-of-aperture checks."""

    p: float = 2.0
    q: Tuple[float, ...] = (1.0, 2.0)
    apertures: Tuple[float, ...] = (0.5, 1.0, 2.0, 5.0)

    def __post_init__(self) -> None:
        if not self.p >= 1:
            raise ConfigError("exponents.p", "must be at least 1")
        if not self.q or any(not q >= 1 for q in self.q):
            raise ConfigError("exponents.q", "every q must be at least 1")
        if not self.apertures or any(not a > 0 for a in self.apertures):
            raise ConfigError("exponents.apertures", "every aperture must be positive")


@dataclass(frozen=True)
class DyadicConfig:
    functions: int = 200
    lambdas: int = 10
    alpha: float = 1.0
    balls: int = 2000

    def __post_init__(self) -> None:
        if self.functions < 1 or self.lambdas < 1 or self.balls < 1:
            raise ConfigError("dyadic", "functions, lambdas and balls must be at least 1")
        if not self.alpha > 0:
            raise ConfigError("dyadic.alpha", "must be positive")


@dataclass(frozen=True)
class ConeConfig:
    """Euclidean space (dimension 1 or 2), time levels and trial count of the cone checks."""

    preset: str = "gaussian_plane"
    params: Dict[str, Any] = field(default_factory=dict)
    file: Optional[str] = None
    n_levels: int = 16
    trials: int = 50

    def __post_init__(self) -> None:
        if self.file is None and self.preset not in PRESETS:
            raise ConfigError("cone.preset", f"unknown preset {self.preset!r}")
        if self.file is not None and not Path(self.file).is_file():
            raise ConfigError("cone.file", f"{self.file} does not exist")
        if self.n_levels < 1 or self.trials < 1:
            raise ConfigError("cone", "n_levels and trials must be at least 1")


@dataclass(frozen=True)
class SuiteConfig:
    disabled: Tuple[str, ...] = ()
    parallel: bool = False
    n_jobs: int = 2

    def __post_init__(self) -> None:
        if self.n_jobs < 1:
            raise ConfigError("suite.n_jobs", "must be at least 1")


@dataclass(frozen=True)
class OutputConfig:
    out: str = "tentlab-out"
    format: str = "json"
    timings: bool = False

    def __post_init__(self) -> None:
        if self.format not in ("json", "csv"):
            raise ConfigError("output.format", f"expected json or csv, got {self.format!r}")


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Everything a suite run depends on.

    Attributes
    ----------
    schema_version: int
        always 1
    space: SpaceConfig
    grid: GridConfig
    corpus: CorpusConfig
    exponents: ExponentConfig
    dyadic: DyadicConfig
    cone: ConeConfig
    suite: SuiteConfig
    output: OutputConfig
    """

    schema_version: int = SCHEMA_VERSION
    space: SpaceConfig = field(default_factory=SpaceConfig)
    grid: GridConfig = field(default_factory=GridConfig)
    corpus: CorpusConfig = field(default_factory=CorpusConfig)
    exponents: ExponentConfig = field(default_factory=ExponentConfig)
    dyadic: DyadicConfig = field(default_factory=DyadicConfig)
    cone: ConeConfig = field(default_factory=ConeConfig)
    suite: SuiteConfig = field(default_factory=SuiteConfig)
    output: OutputConfig = field(default_factory=OutputConfig)

    def __post_init__(self) -> None:
        if self.schema_version != SCHEMA_VERSION:
            raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}")

    @property
    def seed(self) -> int:
        return self.corpus.seed

    def as_dict(self) -> Dict[str, Any]:
        return dataclasses.asdict(self)


def _coerce(value: Any, hint: Any, dotted: str) -> Any:
    origin = get_origin(hint)
    if origin is Union:
        options = [arg for arg in get_args(hint) if arg is not type(None)]
        return None if value is None else _coerce(value, options[0], dotted)
    if dataclasses.is_dataclass(hint):
        return _build(hint, value, f"{dotted}.")
    if origin is tuple:
        if not isinstance(value, list):
            raise ConfigError(dotted, "expected a list")
        return tuple(_coerce(item, get_args(hint)[0], dotted) for item in value)
    if origin is dict:
        if not isinstance(value, dict):
            raise ConfigError(dotted, "expected an object")
        return dict(value)
    if hint is bool:
        if not isinstance(value, bool):
            raise ConfigError(dotted, "expected true or false")
        return value
    if hint is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(dotted, "expected an integer")
        return value
    if hint is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(dotted, "expected a number")
        return float(value)
    if hint is str:
        if not isinstance(value, str):
            raise ConfigError(dotted, "expected a string")
        return value
    return value


def _build(cls: Any, data: Any, prefix: str = "") -> Any:
    if not isinstance(data, dict):
        raise ConfigError(prefix.rstrip(".") or "config", "expected an object")
    hints = get_type_hints(cls)
    names = {item.name for item in dataclasses.fields(cls)}
    unknown = sorted(set(data) - names)
    if unknown:
        raise ConfigError(f"{prefix}{unknown[0]}", "unknown key")
    values = {
        key: _coerce(value, hints[key], f"{prefix}{key}") for key, value in data.items()
    }
    return cls(**values)


def _line_of(text: str, dotted: str) -> Optional[int]:
    key = dotted.rsplit(".", 1)[-1]
    pattern = re.compile(rf'"{re.escape(key)}"\s*:')
    for number, line in enumerate(text.splitlines(), start=1):
        if pattern.search(line):
            return number
    return None


def config_from_dict(data: Dict[str, Any]) -> ScenarioConfig:
    """Validate a parsed scenario; every problem raises ``ConfigError`` naming the field."""
    if not isinstance(data, dict) or data.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"must be {SCHEMA_VERSION}")
    return _build(ScenarioConfig, data)


def load_config(path: Union[str, Path]) -> ScenarioConfig:
    """Read a scenario file, attaching line numbers to syntax and field errors."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError("config", f"cannot read {path}: {err}") from err
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError("config", err.msg, line=err.lineno) from err
    try:
        config = config_from_dict(data)
    except ConfigError as err:
        if err.line is not None:
            raise
        raise ConfigError(err.field, err.reason, line=_line_of(text, err.field)) from err
    log.info("Loaded scenario %s", path)
    return config


def with_overrides(
    config: ScenarioConfig,
    seed: Optional[int] = None,
    out: Optional[str] = None,
    fmt: Optional[str] = None,
    parallel: Optional[bool] = None,
    timings: Optional[bool] = None,
) -> ScenarioConfig:
    """Apply command-line flags on top of file values."""
    corpus = config.corpus if seed is None else dataclasses.replace(config.corpus, seed=seed)
    output = dataclasses.replace(
        config.output,
        out=config.output.out if out is None else out,
        format=config.output.format if fmt is None else fmt,
        timings=config.output.timings if timings is None else timings,
    )
    suite = config.suite
    if parallel is not None:
        suite = dataclasses.replace(config.suite, parallel=parallel)
    return dataclasses.replace(config, corpus=corpus, output=output, suite=suite)
