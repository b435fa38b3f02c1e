"""Testing weighted metric measure spaces.

This should run as part of the CI/CD pipeline.
"""
import json
import math
from pathlib import Path

import numpy as np
from pytest import approx, fixture, raises
from scipy.special import ndtr

from tentlab.errors import ConfigError, MetricError, OriginError, WeightError
from tentlab.spaces import (
    AdmissibilitySpec,
    Ball,
    DiscreteSpace,
    PotentialSpec,
    build_space,
    check_metric,
    distinct_balls,
    doubling_constant,
    gamma_mass,
    gaussian_line,
    load_space,
    log_doubling_bound,
    polynomial_line,
    preset,
    space_from_dict,
    theoretical_doubling_bound,
    uniform_local,
    verify_condition_A,
    verify_condition_B,
    verify_condition_C,
)

# pylint: disable=line-too-long, missing-function-docstring, missing-class-docstring, invalid-name, redefined-outer-name  # noqa: E501


@fixture
def three_points() -> DiscreteSpace:
    return build_space(
        [0.0, 1.0, 2.0],
        [1.0, 1.0, 1.0],
        PotentialSpec.explicit([0.0, 0.0, 0.0]),
        AdmissibilitySpec.constant(1.5),
    )


@fixture
def line() -> DiscreteSpace:
    return gaussian_line(n_points=201)


def test_gaussian_mass() -> None:
    space = gaussian_line()
    assert space.gamma.sum() == approx(ndtr(4.0) - ndtr(-4.0), abs=1e-4)
    assert space.m.max() == 1.0
    assert space.m[0] == approx(0.25)


def test_negative_weight() -> None:
    with raises(WeightError) as err:
        build_space(
            [0.0, 1.0, 2.0],
            [1.0, -1.0, 1.0],
            PotentialSpec.explicit([0.0, 0.0, 0.0]),
            AdmissibilitySpec.constant(1.0),
        )
    assert err.value.index == 1


def test_missing_origins() -> None:
    with raises(OriginError):
        PotentialSpec.distance_function([], 0.0, 0.5)
    with raises(OriginError):
        build_space(
            [0.0, 1.0],
            [1.0, 1.0],
            PotentialSpec.explicit([0.0, 0.0]),
            AdmissibilitySpec.distance_based(),
        )


def test_explicit_table_must_be_metric_shaped() -> None:
    with raises(MetricError):
        build_space(
            None,
            [1.0, 1.0],
            PotentialSpec.explicit([0.0, 0.0]),
            AdmissibilitySpec.constant(1.0),
            distances=np.array([[0.0, 1.0], [2.0, 0.0]]),
        )


def test_triangle_violation_is_reported() -> None:
    space = build_space(
        None,
        [1.0, 1.0, 1.0],
        PotentialSpec.explicit([0.0, 0.0, 0.0]),
        AdmissibilitySpec.constant(1.0),
        distances=np.array([[0.0, 1.0, 5.0], [1.0, 0.0, 1.0], [5.0, 1.0, 0.0]]),
    )
    report = check_metric(space)
    assert not report.passed
    assert report.worst_violation == 3.0
    assert report.witness == (0, 2, 1)


def test_metric_on_preset(line: DiscreteSpace) -> None:
    assert check_metric(line).passed


def test_ball() -> None:
    with raises(ValueError):
        Ball(0, 0.0)
    ball = Ball(3, 0.5)
    assert ball.scaled(4) == Ball(3, 2.0)
    assert ball.as_dict() == {"center": 3, "radius": 0.5}


def test_ball_admissibility(three_points: DiscreteSpace) -> None:
    assert Ball(0, 1.5).is_admissible(three_points, 1.0)
    assert not Ball(0, 1.6).is_admissible(three_points, 1.0)
    assert Ball(0, 3.0).admissibility_level(three_points) == 2.0


def test_gamma_mass_accepts_masks_and_indices(three_points: DiscreteSpace) -> None:
    assert gamma_mass(three_points, [0, 2]) == 2.0
    assert gamma_mass(three_points, np.array([True, False, False])) == 1.0


def test_distinct_balls(three_points: DiscreteSpace) -> None:
    centers, positions, radii = distinct_balls(three_points, 1.0)
    assert list(centers) == [0, 0, 1, 1, 2, 2]
    assert list(positions) == [0, 1, 0, 2, 0, 1]
    assert list(radii) == [1.0, 1.5, 1.0, 1.5, 1.0, 1.5]


def test_doubling_constant(three_points: DiscreteSpace) -> None:
    assert doubling_constant(three_points, 1.0, 2.0) == 3.0


def test_condition_a_bound(line: DiscreteSpace) -> None:
    for alpha in (0.5, 1.0, 2.0):
        report = verify_condition_A(line, alpha)
        assert report.passed is True
        assert report.empirical_constant <= report.theoretical_bound
        assert report.worst_ball.is_admissible(line, alpha)


def test_condition_a_without_bound(three_points: DiscreteSpace) -> None:
    report = verify_condition_A(three_points, 1.0)
    assert report.theoretical_bound is None
    assert report.passed is None


def test_condition_a_bound_beyond_float_range() -> None:
    space = polynomial_line(n_points=41)
    m_constant = space.admissibility.condition_b_constant
    log_bound = log_doubling_bound(space, 2.0, 2.0)
    assert log_bound == approx(math.log(space.mu_doubling) + 6 * math.exp(2 * m_constant))
    assert theoretical_doubling_bound(space, 2.0, 2.0) == math.inf
    report = verify_condition_A(space, 2.0)
    assert report.theoretical_bound == math.inf
    assert report.passed is True


def test_condition_a_bound_on_polynomial_line() -> None:
    space = polynomial_line(n_points=41)
    report = verify_condition_A(space, 1.0)
    assert math.isfinite(report.theoretical_bound)
    assert report.empirical_constant <= report.theoretical_bound
    assert report.passed is True


def test_uniform_grid_doubling() -> None:
    # the open ball of radius 2h around a grid point holds three points
    space = uniform_local(n_points=200, length=10.0)
    assert space.mu_doubling == approx(3.0, rel=1e-12)
    assert doubling_constant(space, 1.0, 2.0) == approx(3.0, rel=1e-12)


def test_condition_b_quartic() -> None:
    report = verify_condition_B(PotentialSpec.polynomial_1d([0, 0, 0, 0, 1]), (-2.0, 2.0))
    assert report.minimal_M == approx(3 * 4 ** (1 / 3), rel=1e-6)
    assert abs(report.argmax) == approx(4 ** (-1 / 3), rel=1e-6)
    assert not report.violations


def test_polynomial_admissibility() -> None:
    space = polynomial_line(n_points=101)
    assert space.m[0] == approx(1 / 32)
    assert space.m[50] == 1.0
    assert space.admissibility.condition_b_constant == approx(3 * 4 ** (1 / 3), rel=1e-6)


def test_uniform_local_condition_c() -> None:
    report = verify_condition_C(uniform_local(n_points=50), 2.0)
    assert report.empirical_c_alpha == 1.0
    assert report.exhaustive


def test_condition_c_quartic() -> None:
    space = polynomial_line(n_points=101)
    m_constant = space.admissibility.condition_b_constant
    for alpha in (0.5, 1.0):
        report = verify_condition_C(space, alpha)
        assert 1.0 <= report.empirical_c_alpha <= math.exp(m_constant * alpha)


def test_preset_errors() -> None:
    with raises(ConfigError) as err:
        preset("nowhere")
    assert err.value.field == "space.preset"
    with raises(ConfigError) as err:
        preset("gaussian_line", width=3)
    assert err.value.field == "space.params"


def test_space_from_dict() -> None:
    space = space_from_dict(
        {
            "points": [0, 1, 2],
            "mu": "uniform",
            "potential": {"variant": "explicit", "values": [0, 0, 0]},
            "admissibility": {"kind": "constant", "value": 1.0},
            "name": "tiny",
        }
    )
    assert space.n_points == 3
    assert list(space.mu) == [1.0, 1.0, 1.0]
    assert space.summary()["name"] == "tiny"


def test_space_from_dict_missing_key() -> None:
    with raises(ConfigError) as err:
        space_from_dict({"points": [0, 1], "mu": "uniform"})
    assert err.value.field == "space.potential"


def test_load_space_preset(tmp_path: Path) -> None:
    path = tmp_path / "space.json"
    path.write_text(json.dumps({"preset": "uniform_local", "params": {"n_points": 20}}))
    assert load_space(path).n_points == 20


def test_load_space_corrupt(tmp_path: Path) -> None:
    path = tmp_path / "space.json"
    path.write_text('{\n  "preset": "gaussian_line",\n  oops\n}\n')
    with raises(ConfigError) as err:
        load_space(path)
    assert err.value.line == 3
    assert "line 3" in str(err.value)


def test_space_arrays_are_read_only(line: DiscreteSpace) -> None:
    with raises(ValueError):
        line.gamma[0] = 1.0


def test_ball_table_counts(line: DiscreteSpace) -> None:
    rng = np.random.default_rng(7)
    centers = rng.integers(0, line.n_points, size=500)
    radii = rng.uniform(0.0, 3.0, size=500)
    radii[:50] = line.distances[centers[:50], centers[50:100]]
    expected = (line.distances[centers] < radii[:, None]).sum(axis=1)
    assert line.balls.counts_below(centers, radii).tolist() == expected.tolist()
    masses = line.balls.masses_below(centers, radii)
    direct = np.where(line.distances[centers] < radii[:, None], line.gamma, 0.0).sum(axis=1)
    assert masses == approx(direct, rel=1e-12, abs=1e-300)
