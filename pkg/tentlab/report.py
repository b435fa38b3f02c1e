"""Check records, certification reports and their JSON/CSV files."""

import csv
import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

from tentlab.errors import ConfigError

log = logging.getLogger(__name__)

SCHEMA_VERSION = 1
STATUSES = ("pass", "fail", "report-only")
CSV_COLUMNS = ("name", "anchor", "status", "assertive", "constants", "tolerances", "witness")

Curve = List[Dict[str, float]]


@dataclass(frozen=True)
class CheckRecord:
    """
    Outcome of one certification check.

    Attributes
    ----------
    name : str
        unique name of the check within its suite
    anchor : str
        the statement the check certifies
    status : str
        ``pass``, ``fail`` or ``report-only``
    assertive : bool
        whether a failure makes the suite fail
    constants : Dict[str, float]
        measured constants
    tolerances : Dict[str, float]
        tolerances the comparison used
    witness : Optional[str]
        worst case found, always present on failures
    wall_time : Optional[float]
        seconds spent, ignored by equality
    """

    name: str
    anchor: str
    status: str
    assertive: bool = True
    constants: Dict[str, float] = field(default_factory=dict)
    tolerances: Dict[str, float] = field(default_factory=dict)
    witness: Optional[str] = None
    wall_time: Optional[float] = field(default=None, compare=False)

    def __post_init__(self) -> None:
        if self.status not in STATUSES:
            raise ValueError(f"Unknown check status {self.status!r}")

    @property
    def failed(self) -> bool:
        """Check whether this record fails its suite."""
        return self.assertive and self.status == "fail"

    def as_dict(self, timings: bool = False) -> Dict[str, Any]:
        """Get a JSON-ready dictionary (non-finite numbers become strings)."""
        data: Dict[str, Any] = {
            "name": self.name,
            "anchor": self.anchor,
            "status": self.status,
            "assertive": self.assertive,
            "constants": {key: _encode(value) for key, value in self.constants.items()},
            "tolerances": {key: _encode(value) for key, value in self.tolerances.items()},
            "witness": self.witness,
        }
        if timings:
            data["wall_time"] = self.wall_time
        return data

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "CheckRecord":
        """Rebuild a record written by ``as_dict``."""
        return cls(
            name=data["name"],
            anchor=data["anchor"],
            status=data["status"],
            assertive=bool(data["assertive"]),
            constants={key: _decode(value) for key, value in data["constants"].items()},
            tolerances={key: _decode(value) for key, value in data["tolerances"].items()},
            witness=data.get("witness"),
            wall_time=data.get("wall_time"),
        )


@dataclass(frozen=True)
class CertificationReport:
    """Records of a suite run in check order, plus plot-data curves."""

    suite: str
    seed: int
    records: List[CheckRecord] = field(default_factory=list)
    curves: Dict[str, Curve] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        """Check whether no assertive check failed."""
        return not self.failures

    @property
    def failures(self) -> List[CheckRecord]:
        """Get the failed assertive records."""
        return [record for record in self.records if record.failed]

    def record(self, name: str) -> CheckRecord:
        """Get the record of the check called ``name``."""
        for record in self.records:
            if record.name == name:
                return record
        raise KeyError(name)

    def as_dict(self, timings: bool = False) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "suite": self.suite,
            "seed": self.seed,
            "records": [record.as_dict(timings) for record in self.records],
            "curves": {
                name: [{key: _encode(value) for key, value in row.items()} for row in rows]
                for name, rows in self.curves.items()
            },
        }

    def __str__(self) -> str:
        """Return a one-line-per-check summary."""
        newline = "\n"
        lines = [f"Suite {self.suite} (seed {self.seed}): {len(self.records)} checks"]
        for record in self.records:
            lines.append(f"  [{record.status:>11}] {record.name}")
        lines.append("PASSED" if self.passed else f"FAILED: {len(self.failures)} checks")
        return newline.join(lines)


def _encode(value: Any) -> Any:
    if isinstance(value, float) and not math.isfinite(value):
        return str(value)
    return value


def _decode(value: Any) -> Any:
    if isinstance(value, str) and value in ("inf", "-inf", "nan"):
        return float(value)
    return value


def _json_cell(values: Dict[str, Any]) -> str:
    return json.dumps({key: _encode(value) for key, value in values.items()}, sort_keys=True)


def emit_report(
    report: CertificationReport,
    out_dir: Union[str, Path],
    fmt: str = "json",
    timings: bool = False,
) -> List[Path]:
    """
    Write a report as ``report.json`` or ``report.csv`` plus one ``curve_<name>.csv`` per curve.

    Files are deterministic for a given report unless ``timings`` adds wall times.

    Returns
    -------
    List[Path]
        written files, report first
    """
    if fmt not in ("json", "csv"):
        raise ConfigError("output.format", f"expected json or csv, got {fmt!r}")
    out = Path(out_dir)
    written = []
    try:
        out.mkdir(parents=True, exist_ok=True)
        if fmt == "json":
            path = out / "report.json"
            with open(path, "w", encoding="utf-8") as handle:
                json.dump(report.as_dict(timings), handle, indent=2, sort_keys=True)
                handle.write("\n")
        else:
            path = out / "report.csv"
            columns = CSV_COLUMNS + (("wall_time",) if timings else ())
            with open(path, "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle)
                writer.writerow(columns)
                for record in report.records:
                    row = [
                        record.name,
                        record.anchor,
                        record.status,
                        record.assertive,
                        _json_cell(record.constants),
                        _json_cell(record.tolerances),
                        record.witness or "",
                    ]
                    if timings:
                        row.append(record.wall_time)
                    writer.writerow(row)
        written.append(path)
        for name, rows in sorted(report.curves.items()):
            curve_path = out / f"curve_{name}.csv"
            keys = sorted({key for row in rows for key in row})
            with open(curve_path, "w", newline="", encoding="utf-8") as handle:
                writer = csv.writer(handle)
                writer.writerow(keys)
                for row in rows:
                    writer.writerow([row.get(key, "") for key in keys])
            written.append(curve_path)
    except OSError as err:
        raise ConfigError("output.out", f"cannot write to {out}: {err}") from err
    log.info("Wrote %d report files to %s", len(written), out)
    return written


def read_report(path: Union[str, Path]) -> CertificationReport:
    """Read a JSON report written by ``emit_report``."""
    try:
        with open(path, encoding="utf-8") as handle:
            data = json.load(handle)
    except json.JSONDecodeError as err:
        raise ConfigError("report", err.msg, line=err.lineno) from err
    except OSError as err:
        raise ConfigError("report", f"cannot read {path}: {err}") from err
    if data.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError("report.schema_version", f"expected {SCHEMA_VERSION}")
    return CertificationReport(
        suite=data["suite"],
        seed=int(data["seed"]),
        records=[CheckRecord.from_dict(item) for item in data["records"]],
        curves={
            name: [{key: _decode(value) for key, value in row.items()} for row in rows]
            for name, rows in data["curves"].items()
        },
    )
