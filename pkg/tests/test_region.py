"""Testing the discretized admissible region, cones and tents."""
import math

import numpy as np
from pytest import approx, fixture, raises

from tentlab.corpus import generator, random_point_set
from tentlab.errors import EmptyRegionError
from tentlab.region import (
    RegionGrid,
    TimeGrid,
    build_region,
    cone,
    cone_tent_reach,
    tent,
    tent_by_containment,
)
from tentlab.spaces import Ball, gaussian_line

# pylint: disable=line-too-long, missing-function-docstring, missing-class-docstring, invalid-name, redefined-outer-name  # noqa: E501


@fixture
def region() -> RegionGrid:
    space = gaussian_line(n_points=61)
    return build_region(space, TimeGrid.default_for(space, 8))


def test_single_level_weight() -> None:
    grid = TimeGrid.from_levels([0.5])
    assert grid.log_weights[0] == approx(math.log(2.0))


def test_log_uniform_grid() -> None:
    grid = TimeGrid.log_uniform(0.125, 1.0, 3)
    assert np.allclose(grid.levels, [0.125, 0.25, 0.5])
    assert np.allclose(grid.log_weights, math.log(2.0))
    with raises(ValueError):
        TimeGrid.log_uniform(1.0, 0.5, 3)


def test_levels_must_increase() -> None:
    with raises(ValueError):
        TimeGrid.from_levels([0.5, 0.25])


def test_empty_region() -> None:
    with raises(EmptyRegionError):
        build_region(gaussian_line(n_points=61), TimeGrid.from_levels([2.0]))


def test_region_mask(region: RegionGrid) -> None:
    space = region.space
    assert region.shape == (space.n_points, 8)
    assert np.array_equal(region.mask, region.levels[None, :] < space.m[:, None])
    assert np.all(region.node_weight[~region.mask] == 0)
    assert region.summary()["n_nodes"] == region.n_nodes
    assert region.node_list().shape == (region.n_nodes, 2)


def test_tent_of_everything_and_nothing(region: RegionGrid) -> None:
    n_points = region.space.n_points
    assert np.array_equal(tent(region, np.ones(n_points, dtype=bool)), region.mask)
    assert not tent(region, np.zeros(n_points, dtype=bool)).any()


def test_tent_characterizations_agree(region: RegionGrid) -> None:
    for index in range(10):
        open_set = random_point_set(region.space, generator(11, index))
        assert np.array_equal(tent(region, open_set), tent_by_containment(region, open_set))


def test_tent_lies_over_the_set(region: RegionGrid) -> None:
    open_set = random_point_set(region.space, generator(5))
    points, _ = np.nonzero(tent(region, open_set))
    assert open_set[points].all()


def test_cones_grow_with_aperture(region: RegionGrid) -> None:
    narrow = cone(region, 30, 1.0)
    wide = cone(region, 30, 2.0)
    assert not np.any(narrow & ~wide)
    assert narrow[30].sum() == region.mask[30].sum()
    with raises(ValueError):
        cone(region, 30, 0.0)


def test_cone_level_index(region: RegionGrid) -> None:
    index = region.cone_level_index(1.0)
    x, i = 10, 40
    first = int(index[x, i])
    assert np.all(region.space.distances[x, i] >= region.levels[:first])
    assert np.all(region.space.distances[x, i] < region.levels[first:])


def test_cone_tent_reach_returns_points(region: RegionGrid) -> None:
    reach = cone_tent_reach(region, Ball(30, 0.5), 1.0)
    distances = region.space.distances[30, reach]
    assert np.all(distances >= 0.5)
