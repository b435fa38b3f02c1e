"""Testing the default certification suite on a small scenario.

This should run as part of the CI/CD pipeline.
"""
from typing import Any, Dict

import numpy as np
import pytest

from tentlab.config import config_from_dict
from tentlab.report import CertificationReport
from tentlab.suites import DEFAULT_CHECKS, SuiteContext, run_suite

# pylint: disable=line-too-long, missing-function-docstring, missing-class-docstring, invalid-name, redefined-outer-name  # noqa: E501

EXACT_CHECKS = (
    "space.metric-axioms",
    "space.condition-b",
    "tent.containment",
    "functionals.fubini",
    "functionals.aperture-identity",
    "functionals.j-alpha-isometry",
    "atomic.vitali-cover",
    "atomic.decomposition",
    "dyadic.partition",
    "dyadic.weak11",
    "dyadic.containment",
    "dyadic.domination",
    "cone.direction-net",
    "cone.extension",
    "cone.single-point-cover",
    "cone.random-cover",
    "cone.corollary-pointwise",
    "cone.geometry",
)


@pytest.fixture()
def report(small_scenario: Dict[str, Any]) -> CertificationReport:
    return run_suite(config_from_dict(small_scenario))


def test_records_follow_check_order(report: CertificationReport) -> None:
    assert [record.name for record in report.records] == [item.name for item in DEFAULT_CHECKS]
    assert report.seed == 3


def test_exact_checks_pass(report: CertificationReport) -> None:
    for name in EXACT_CHECKS:
        record = report.record(name)
        assert record.status == "pass", (name, record.witness)


def test_every_assertive_check_passes(report: CertificationReport) -> None:
    failed = [(record.name, record.witness) for record in report.failures]
    assert not failed
    assert report.passed


def test_report_only_checks(report: CertificationReport) -> None:
    for item in DEFAULT_CHECKS:
        if not item.assertive:
            assert report.record(item.name).status == "report-only"
    assert report.record("cone.sector-extension").witness


def test_curves(report: CertificationReport) -> None:
    assert {"doubling_constants", "c1_alpha", "aperture_ratios"} <= set(report.curves)
    alphas = [row["alpha"] for row in report.curves["doubling_constants"]]
    assert alphas == [1.0, 2.0]


def test_runs_are_reproducible(small_scenario: Dict[str, Any]) -> None:
    config = config_from_dict(small_scenario)
    assert run_suite(config) == run_suite(config)


def test_context_streams(small_scenario: Dict[str, Any]) -> None:
    context = SuiteContext(config_from_dict(small_scenario))
    first = context.stream(5, 1).uniform(size=3)
    assert np.array_equal(first, context.stream(5, 1).uniform(size=3))
    assert not np.array_equal(first, context.stream(5, 2).uniform(size=3))
    assert context.space.n_points == 61
    assert context.plane.n_points == 49
    assert context.region.time_grid.n_levels == 8
