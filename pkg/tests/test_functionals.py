"""Testing conical functionals, tent-space norms and the cone operators."""
import numpy as np
from pytest import approx, fixture, raises

from tentlab.corpus import random_seeded, tent_indicator
from tentlab.errors import ApertureError, RegionMismatchError
from tentlab.functionals import (
    TentFunction,
    a_q_alpha,
    fubini_qq,
    j_alpha,
    mixed_norm,
    n_alpha,
    pairing,
    tinf_norm,
    tinf_norm_witness,
    tpq_norm,
)
from tentlab.region import RegionGrid, TimeGrid, build_region, cone
from tentlab.spaces import Ball, gaussian_line

# pylint: disable=line-too-long, missing-function-docstring, missing-class-docstring, invalid-name, redefined-outer-name  # noqa: E501


@fixture
def region() -> RegionGrid:
    space = gaussian_line(n_points=61)
    return build_region(space, TimeGrid.default_for(space, 8))


@fixture
def f(region: RegionGrid) -> TentFunction:
    return random_seeded(region, 7)


def test_values_must_fit_the_region(region: RegionGrid) -> None:
    with raises(RegionMismatchError):
        TentFunction(region, np.ones((3, 3)))
    with raises(RegionMismatchError):
        TentFunction(region, np.ones(region.shape))


def test_sum_needs_a_shared_region(region: RegionGrid, f: TentFunction) -> None:
    other = build_region(region.space, TimeGrid.default_for(region.space, 8))
    with raises(RegionMismatchError):
        _ = f + TentFunction.zeros(other)
    assert np.array_equal((f + f).values, f.scale(2.0).values)


def test_area_matches_cone_sum(region: RegionGrid, f: TentFunction) -> None:
    x = 25
    nodes = cone(region, x, 1.0)
    direct = np.sum(np.abs(f.values[nodes]) ** 2 * region.cone_measure[nodes]) ** 0.5
    assert a_q_alpha(region, f, 2.0)[x] == approx(direct, rel=1e-12)


def test_area_grows_with_aperture(region: RegionGrid, f: TentFunction) -> None:
    narrow = a_q_alpha(region, f, 2.0, 1.0)
    wide = a_q_alpha(region, f, 2.0, 3.0)
    assert np.all(narrow <= wide * (1 + 1e-12))


def test_fubini(region: RegionGrid, f: TentFunction) -> None:
    for q in (1.0, 2.0):
        for alpha in (1.0, 2.0):
            norm = tpq_norm(region, f, q, q, alpha)
            assert fubini_qq(region, f, q, alpha) == approx(norm**q, rel=1e-10)


def test_exponent_ranges(region: RegionGrid, f: TentFunction) -> None:
    with raises(ValueError):
        a_q_alpha(region, f, 0.0)
    with raises(ValueError):
        tpq_norm(region, f, float("inf"), 2.0)
    with raises(ValueError):
        tinf_norm(region, f, 0.5)


def test_j_alpha_isometry(region: RegionGrid, f: TentFunction) -> None:
    for q in (1.0, 2.0):
        for alpha in (1.0, 2.0):
            lifted = mixed_norm(region, j_alpha(region, f, alpha), 2.0, q)
            assert lifted == approx(tpq_norm(region, f, 2.0, q, alpha), rel=1e-10)


def test_aperture_identity(region: RegionGrid, f: TentFunction) -> None:
    projected = n_alpha(region, j_alpha(region, f, 1.0), 2.0)
    target = j_alpha(region, f, 2.0)
    ratio = (region.scaled_ball_mass(1.0) / region.scaled_ball_mass(2.0))[region.mask]
    assert np.allclose(projected.values, target.values * ratio[target.node_id], rtol=1e-12)


def test_narrow_projection_is_refused(region: RegionGrid, f: TentFunction) -> None:
    with raises(ApertureError):
        n_alpha(region, j_alpha(region, f, 2.0), 1.0)


def test_dense_field(region: RegionGrid, f: TentFunction) -> None:
    field = j_alpha(region, f, 1.0)
    dense = field.to_dense()
    assert dense.shape == (region.space.n_points, region.n_nodes)
    assert dense.sum() == approx(field.values.sum())


def test_tinf_of_constant(region: RegionGrid) -> None:
    ones = TentFunction(region, region.mask.astype(float))
    value, ball = tinf_norm_witness(region, ones, float("inf"))
    assert value == 1.0
    assert ball.is_admissible(region.space, 5.0)


def test_tinf_bounds_tent_averages(region: RegionGrid, f: TentFunction) -> None:
    space = region.space
    ball = Ball(30, float(space.m[30]))
    indicator = tent_indicator(region, ball)
    average = np.sum(f.values**2 * indicator.values * region.node_weight)
    average /= space.gamma[space.distances[30] < ball.radius].sum()
    assert average**0.5 <= tinf_norm(region, f, 2.0) * (1 + 1e-12)


def test_pairing(region: RegionGrid, f: TentFunction) -> None:
    assert pairing(region, f, f) == approx(np.sum(f.values**2 * region.node_weight))
    rotated = f.scale(1j)
    assert pairing(region, rotated, f) == approx(1j * pairing(region, f, f))
