"""Testing sectors, the maximal-function extension and the cone covering lemma."""
import math

import numpy as np
import pytest

from tentlab.cone_cover import (
    MAX_ANGLE,
    LdaParams,
    SectorSpec,
    choose_lda_params,
    comparison_selftest,
    cone_cover,
    corollary_pointwise_check,
    direction_net,
    divergence_selftest,
    extension,
    hitting_times,
    sector_extension_check,
    sector_members,
    sector_scan,
)
from tentlab.corpus import generator, random_point_set, tent_corpus
from tentlab.errors import DimensionError, EmbeddingError
from tentlab.functionals import a_q_alpha
from tentlab.region import RegionGrid, TimeGrid, build_region
from tentlab.spaces import (
    AdmissibilitySpec,
    DiscreteSpace,
    PotentialSpec,
    build_space,
    gaussian_plane,
    uniform_local,
)

# pylint: disable=line-too-long, missing-function-docstring, missing-class-docstring, invalid-name, redefined-outer-name  # noqa: E501


@pytest.fixture()
def plane() -> DiscreteSpace:
    return gaussian_plane(n_side=9)


@pytest.fixture()
def plane_region(plane: DiscreteSpace) -> RegionGrid:
    return build_region(plane, TimeGrid.default_for(plane, 8))


@pytest.fixture()
def params(plane: DiscreteSpace) -> LdaParams:
    return choose_lda_params(plane)


def test_direction_net_sizes() -> None:
    assert direction_net(1).tolist() == [[1.0], [-1.0]]
    net = direction_net(2)
    assert net.shape == (13, 2)
    assert np.allclose(np.linalg.norm(net, axis=1), 1.0)
    assert math.pi / 13 <= MAX_ANGLE
    with pytest.raises(DimensionError):
        direction_net(3)


def test_sector_spec_validation() -> None:
    with pytest.raises(ValueError):
        SectorSpec(0, (1.0, 1.0), 1.0)
    with pytest.raises(ValueError):
        SectorSpec(0, (1.0, 0.0), 0.0)


def test_sector_members(plane: DiscreteSpace) -> None:
    # 9 x 9 grid on [-3, 3]^2 with spacing 0.75; point 40 is the origin
    sector = SectorSpec(40, (1.0, 0.0), 2.0)
    members = sector_members(plane, sector)
    assert not members[40]
    assert members[6 * 9 + 4]
    assert not members[4 * 9 + 6]
    assert np.array_equal(members[[40, 58, 42]], sector_scan(plane, sector)[[40, 58, 42]])


def test_sector_needs_coordinates() -> None:
    space = build_space(
        None,
        [1.0, 1.0],
        PotentialSpec.explicit([0.0, 0.0]),
        AdmissibilitySpec.constant(1.0),
        distances=np.array([[0.0, 1.0], [1.0, 0.0]]),
    )
    with pytest.raises(EmbeddingError):
        sector_members(space, SectorSpec(0, (1.0,), 1.0))


def test_lda_params(plane: DiscreteSpace, params: LdaParams) -> None:
    assert params.beta >= 1.0
    assert params.alpha >= 2 * params.beta
    assert params.lam * params.a_beta == pytest.approx(0.5)
    with pytest.raises(ValueError):
        LdaParams(1.0, 2.0, 0.5, 4.0)


def test_extension_of_trivial_sets(plane: DiscreteSpace, params: LdaParams) -> None:
    nothing = extension(plane, np.zeros(plane.n_points, dtype=bool), params)
    everything = extension(plane, np.ones(plane.n_points, dtype=bool), params)
    assert not nothing.points.any() and nothing.agree
    assert everything.points.all() and everything.agree


def test_extension_contains_the_set(plane: DiscreteSpace, params: LdaParams) -> None:
    for index in range(10):
        open_set = random_point_set(plane, generator(41, index))
        result = extension(plane, open_set, params)
        assert result.agree
        assert not np.any(open_set & ~result.points)


def test_hitting_times_on_a_line() -> None:
    line = uniform_local(n_points=21, length=21.0)
    open_set = np.ones(21, dtype=bool)
    open_set[[2, 3, 15, 18]] = False
    times, hits = hitting_times(line, open_set, 10, direction_net(1))
    assert hits == [15, 3]
    assert times[0] == pytest.approx(4.0 * 5 / 5)
    assert times[1] == pytest.approx(4.0 * 7 / 5)


def test_hitting_times_without_complement() -> None:
    line = uniform_local(n_points=21, length=21.0)
    times, hits = hitting_times(line, np.ones(21, dtype=bool), 10, direction_net(1))
    assert np.all(np.isinf(times))
    assert hits == [None, None]


def test_single_point_cover(
    plane: DiscreteSpace, plane_region: RegionGrid, params: LdaParams
) -> None:
    for removed, x in ((10, 40), (40, 41), (0, 80)):
        open_set = np.ones(plane.n_points, dtype=bool)
        open_set[removed] = False
        result = cone_cover(plane, plane_region, open_set, x, params)
        assert result.passed
        assert {hit for hit in result.hits if hit is not None} == {removed}


def test_random_covers(
    plane: DiscreteSpace, plane_region: RegionGrid, params: LdaParams
) -> None:
    tried = 0
    for index in range(10):
        rng = generator(46, index)
        open_set = random_point_set(plane, rng)
        if open_set.all():
            continue
        x = int(rng.choice(np.flatnonzero(open_set)))
        result = cone_cover(plane, plane_region, open_set, x, params)
        tried += 1
        assert result.passed, (index, x, result.escaped_nodes)
        assert all(hit is None or not open_set[hit] for hit in result.hits)
    assert tried > 0


def test_corollary_pointwise(plane_region: RegionGrid, params: LdaParams) -> None:
    plane = plane_region.space
    for f in tent_corpus(plane_region, 47, 5):
        for q in (1.0, 2.0):
            lam = float(np.quantile(a_q_alpha(plane_region, f, q), 0.9))
            report = corollary_pointwise_check(plane, plane_region, f, q, lam, params)
            assert report.bound == pytest.approx(13 * lam)
            assert report.passed, (q, report.worst_x, report.worst_value, report.bound)


def test_corollary_pointwise_above_every_value(
    plane_region: RegionGrid, params: LdaParams
) -> None:
    f = tent_corpus(plane_region, 48, 1)[0]
    area = a_q_alpha(plane_region, f, 2.0)
    lam = float(area.max())
    report = corollary_pointwise_check(plane_region.space, plane_region, f, 2.0, lam, params)
    # E is empty, so nothing is cut away
    assert report.worst_value == pytest.approx(lam, rel=1e-12)
    assert report.passed


def test_sector_extension_check_on_trivial_sets(plane: DiscreteSpace, params: LdaParams) -> None:
    empty = sector_extension_check(
        plane, np.zeros(plane.n_points, dtype=bool), params, generator(43), trials=10
    )
    assert (empty.trials, empty.sectors_inside, empty.violations) == (10, 0, 0)
    full = sector_extension_check(
        plane, np.ones(plane.n_points, dtype=bool), params, generator(43), trials=10
    )
    assert full.trials == 10
    assert full.violations == 0


def test_sector_in_a_disc_extends(plane: DiscreteSpace, params: LdaParams) -> None:
    open_set = plane.distances[40] < 1.6
    assert int(open_set.sum()) == 13
    sector = sector_members(plane, SectorSpec(40, (1.0, 0.0), 1.0))
    assert np.flatnonzero(sector).tolist() == [49]
    assert 1.0 <= params.beta * plane.m[40]
    star = extension(plane, open_set, params).points
    assert np.all(star[plane.distances[49] < 2.0])
    assert not np.any(open_set & ~star)


def test_geometry_selftests() -> None:
    assert comparison_selftest(generator(44)) <= 1 + 1e-12
    assert divergence_selftest(generator(45)) <= 1 + 1e-12
