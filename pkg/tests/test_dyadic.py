"""Testing shifted dyadic systems and the maximal operators."""
from typing import List

import numpy as np
import pytest

from tentlab.corpus import generator, random_point_function
from tentlab.dyadic import (
    DyadicSystem,
    build_shifted_systems,
    check_system,
    containment_constants,
    domination_ratio,
    dyadic_maximal,
    fefferman_stein_ratios,
    generation_range,
    lattice_maximal,
    local_maximal,
    weak11_check,
)
from tentlab.errors import EmbeddingError
from tentlab.spaces import (
    AdmissibilitySpec,
    DiscreteSpace,
    PotentialSpec,
    build_space,
    distinct_balls,
    gaussian_line,
    gaussian_plane,
)

# pylint: disable=line-too-long, missing-function-docstring, missing-class-docstring, invalid-name, redefined-outer-name  # noqa: E501


@pytest.fixture()
def space() -> DiscreteSpace:
    return gaussian_line(n_points=61)


@pytest.fixture()
def systems(space: DiscreteSpace) -> List[DyadicSystem]:
    return build_shifted_systems(space)


def test_generation_range(space: DiscreteSpace) -> None:
    coarse, fine = generation_range(space)
    assert 2.0**-coarse >= 4 * space.distances.max()
    assert 2.0**-fine < space.distances[space.distances > 0].min()


def test_systems_partition(space: DiscreteSpace, systems: List[DyadicSystem]) -> None:
    assert len(systems) == 3
    assert {system.shift for system in systems} == {(0,), (1,), (2,)}
    for system in systems:
        assert check_system(space, system)
        assert system.n_cubes(0) <= 2
        for g, masses in enumerate(system.masses):
            assert masses.sum() == pytest.approx(space.gamma.sum())
            assert len(system.members(g, 0)) > 0


def test_plane_has_nine_systems() -> None:
    plane = gaussian_plane(n_side=7)
    systems = build_shifted_systems(plane)
    assert len(systems) == 9
    assert all(check_system(plane, system) for system in systems)


def test_unembedded_space() -> None:
    space = build_space(
        None,
        [1.0, 1.0],
        PotentialSpec.explicit([0.0, 0.0]),
        AdmissibilitySpec.constant(1.0),
        distances=np.array([[0.0, 1.0], [1.0, 0.0]]),
    )
    with pytest.raises(EmbeddingError):
        build_shifted_systems(space)


def test_dyadic_weak11(space: DiscreteSpace, systems: List[DyadicSystem]) -> None:
    for index in range(5):
        u = random_point_function(space, generator(31, index))
        grid = u.max() * np.geomspace(1e-3, 1.0, 10)
        for system in systems:
            report = weak11_check(space, system, u, grid)
            assert report.violations == 0
            assert report.measured_constant <= 1 + 1e-12


def test_local_maximal_by_enumeration(space: DiscreteSpace) -> None:
    u = random_point_function(space, generator(32))
    expected = np.zeros(space.n_points)
    table = space.balls
    for center, position in zip(*distinct_balls(space, 1.0)[:2]):
        members = table.order[center, : position + 1]
        average = np.sum(u[members] * space.gamma[members]) / space.gamma[members].sum()
        expected[members] = np.maximum(expected[members], average)
    assert np.allclose(local_maximal(space, u, 1.0), expected, rtol=1e-12, atol=0)


def test_lattice_maximal_is_componentwise(space: DiscreteSpace) -> None:
    field = np.column_stack([random_point_function(space, generator(33, i)) for i in range(3)])
    lattice = lattice_maximal(space, field, 1.0)
    for column in range(3):
        assert np.allclose(lattice[:, column], local_maximal(space, field[:, column], 1.0))
    assert np.array_equal(local_maximal(space, field, 1.0), lattice)


def test_containment(space: DiscreteSpace, systems: List[DyadicSystem]) -> None:
    report = containment_constants(space, systems, 1.0)
    assert report.uncontained == 0
    assert report.mass_constant >= 1.0 - 1e-12
    assert np.isfinite(report.c_x)


def test_domination(space: DiscreteSpace, systems: List[DyadicSystem]) -> None:
    constant = containment_constants(space, systems, 1.0).mass_constant
    for index in range(5):
        u = random_point_function(space, generator(34, index))
        assert domination_ratio(space, systems, u, 1.0, constant) <= 1 + 1e-12


def test_local_weak11(space: DiscreteSpace, systems: List[DyadicSystem]) -> None:
    constant = containment_constants(space, systems, 1.0).mass_constant * len(systems)
    u = random_point_function(space, generator(35))
    grid = u.max() * np.geomspace(1e-3, 1.0, 10)
    assert weak11_check(space, 1.0, u, grid, constant=constant).violations == 0
    with pytest.raises(ValueError):
        weak11_check(space, 1.0, u, grid)


def test_dyadic_maximal_bounds_u(space: DiscreteSpace, systems: List[DyadicSystem]) -> None:
    u = random_point_function(space, generator(36))
    assert np.all(dyadic_maximal(space, systems[0], u) >= u * (1 - 1e-12))


def test_fefferman_stein(space: DiscreteSpace) -> None:
    field = np.column_stack([random_point_function(space, generator(37, i)) for i in range(3)])
    ratios = fefferman_stein_ratios(space, field, 1.0, 2.0)
    assert set(ratios) == {1.5, 2.0, 4.0}
    assert all(ratio >= 1.0 - 1e-12 for ratio in ratios.values())
    with pytest.raises(ValueError):
        fefferman_stein_ratios(space, field, 1.0, 1.0)
