"""Testing the covering lemma and the constructive atomic decomposition.

This should run as part of the CI/CD pipeline.
"""
import numpy as np
import pytest

from tentlab.atomic import (
    atomic_decompose,
    certify_decomposition,
    certify_tent_cover,
    dyadic_exponent,
    level_sets,
    pointwise2_check,
    pointwise2_inclusion,
    reconstruct,
    validate_atom,
    vitali_tent_cover,
)
from tentlab.corpus import generator, random_point_set, random_seeded
from tentlab.functionals import TentFunction, a_q_alpha
from tentlab.region import RegionGrid, TimeGrid, build_region
from tentlab.spaces import gaussian_line

# pylint: disable=line-too-long, missing-function-docstring, missing-class-docstring, invalid-name, redefined-outer-name  # noqa: E501


@pytest.fixture()
def region() -> RegionGrid:
    space = gaussian_line(n_points=61)
    return build_region(space, TimeGrid.default_for(space, 8))


@pytest.fixture()
def f(region: RegionGrid) -> TentFunction:
    return random_seeded(region, 4)


def test_dyadic_exponent() -> None:
    assert dyadic_exponent(1.0) == -1
    assert dyadic_exponent(3.0) == 1
    assert dyadic_exponent(4.0) == 1
    assert dyadic_exponent(0.3) == -2
    with pytest.raises(ValueError):
        dyadic_exponent(0.0)


def test_vitali_cover(region: RegionGrid) -> None:
    for index in range(10):
        open_set = random_point_set(region.space, generator(21, index))
        balls = vitali_tent_cover(region.space, open_set)
        certificate = certify_tent_cover(region, open_set, balls)
        assert certificate.passed, certificate
        radii = [ball.radius for ball in balls]
        assert radii == sorted(radii, reverse=True)


def test_vitali_cover_of_nothing(region: RegionGrid) -> None:
    assert not vitali_tent_cover(region.space, np.zeros(region.space.n_points, dtype=bool))


def test_level_sets_are_nested(region: RegionGrid, f: TentFunction) -> None:
    levels = level_sets(region, f, 2.0)
    assert levels is not None
    for k in levels.levels:
        assert not np.any(levels.sets[k + 1] & ~levels.sets[k])
    assert not levels.sets[levels.k_max + 1].any()


def test_zero_function(region: RegionGrid) -> None:
    zero = TentFunction.zeros(region)
    assert level_sets(region, zero, 2.0) is None
    decomposition = atomic_decompose(region.space, region, zero, 2.0)
    assert decomposition.terms == []
    assert decomposition.k_range is None


def test_exponent_below_one(region: RegionGrid, f: TentFunction) -> None:
    with pytest.raises(ValueError):
        atomic_decompose(region.space, region, f, 0.5)


@pytest.mark.parametrize("q", [1.0, 2.0])
def test_decomposition(region: RegionGrid, f: TentFunction, q: float) -> None:
    space = region.space
    decomposition = atomic_decompose(space, region, f, q)
    assert decomposition.terms
    assert decomposition.unassigned_nodes == 0
    error = np.abs(reconstruct(decomposition).values - f.values).max()
    assert error <= 1e-10 * np.abs(f.values).max()
    for term in decomposition.terms:
        assert term.lam > 0
        assert term.atom.ball.is_admissible(space, 5.0)
        assert validate_atom(space, region, term.atom).passed


def test_certificate(region: RegionGrid, f: TentFunction) -> None:
    decomposition = atomic_decompose(region.space, region, f, 2.0)
    certificate = certify_decomposition(region.space, region, f, decomposition)
    assert certificate.passed
    assert certificate.ratio_within_bounds
    assert certificate.n_terms == len(decomposition.terms)
    assert decomposition.table()[0]["lambda"] == decomposition.terms[0].lam


def test_pointwise2(region: RegionGrid, f: TentFunction) -> None:
    area = a_q_alpha(region, f, 2.0, 3.0)
    for fraction in (0.25, 0.5, 0.9):
        report = pointwise2_check(region, f, 2.0, fraction * float(area.max()))
        assert report.passed, report
    with pytest.raises(ValueError):
        pointwise2_check(region, f, 2.0, 0.0)


def test_pointwise2_inclusion(region: RegionGrid) -> None:
    open_set = random_point_set(region.space, generator(8))
    for x in np.flatnonzero(open_set):
        assert pointwise2_inclusion(region, open_set, int(x))
    assert pointwise2_inclusion(region, np.ones(region.space.n_points, dtype=bool), 0)
