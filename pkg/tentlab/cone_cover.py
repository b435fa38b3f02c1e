"""
Sectors, maximal-function extensions and the cone covering lemma on flat Euclidean clouds
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from tentlab.dyadic import local_maximal
from tentlab.errors import DimensionError, EmbeddingError
from tentlab.functionals import TentFunction, a_q_alpha
from tentlab.region import RegionGrid, cone, tent
from tentlab.spaces import (
    DiscreteSpace,
    PointSet,
    doubling_constant,
    point_mask,
    verify_condition_C,
)

log = logging.getLogger(__name__)

MAX_ANGLE = math.atan(0.25)
CONDITION_A1_READING = "condition (A1) read as condition (C) at aperture 1, beta = c_1"


@dataclass(frozen=True)
class SectorSpec:
    """Sector R(v, t): the union of the open balls B(apex + s·v, s/4) for 0 ≤ s ≤ t."""

    apex: int
    direction: tuple
    extent: float

    def __post_init__(self) -> None:
        if abs(float(np.linalg.norm(self.direction)) - 1.0) > 1e-12:
            raise ValueError(f"Sector direction {self.direction} is not a unit vector")
        if not self.extent > 0:
            raise ValueError(f"Sector extent must be positive, got {self.extent}")


def _coords(space: DiscreteSpace) -> np.ndarray:
    if space.coords is None:
        raise EmbeddingError("Sector geometry")
    return space.coords


def sector_members(space: DiscreteSpace, sector: SectorSpec) -> np.ndarray:
    """
    Point mask of R(v, t).

    With w = p - apex, |w - s·v|^2 - s^2/16 = (15/16)s^2 - 2⟨w, v⟩s + |w|^2 is convex in s,
    so p belongs to the sector iff it is negative at s* = clip(16⟨w, v⟩/15, 0, t).
    """
    coords = _coords(space)
    offset = coords - coords[sector.apex]
    direction = np.asarray(sector.direction, dtype=float)
    along = offset @ direction
    best = np.clip(16.0 * along / 15.0, 0.0, sector.extent)
    gap = 15.0 / 16.0 * best**2 - 2.0 * along * best + np.sum(offset**2, axis=1)
    return gap < 0


def sector_scan(space: DiscreteSpace, sector: SectorSpec, samples: int = 20001) -> np.ndarray:
    """Sector membership from a dense grid of s values."""
    coords = _coords(space)
    direction = np.asarray(sector.direction, dtype=float)
    steps = np.linspace(0.0, sector.extent, samples)
    spine = coords[sector.apex][None, :] + steps[:, None] * direction[None, :]
    gaps = np.linalg.norm(coords[:, None, :] - spine[None, :, :], axis=2)
    return np.any(gaps < steps[None, :] / 4.0, axis=1)


def direction_net(dim: int, max_angle: float = MAX_ANGLE) -> np.ndarray:
    """
    Unit vectors such that every direction is within ``max_angle`` of one of them.

    Dimension 1 uses ±1; dimension 2 uses ⌈π/max_angle⌉ equally spaced angles.
    """
    if dim == 1:
        return np.array([[1.0], [-1.0]])
    if dim != 2:
        raise DimensionError(dim)
    count = math.ceil(math.pi / max_angle)
    angles = 2.0 * math.pi * np.arange(count) / count
    return np.column_stack([np.cos(angles), np.sin(angles)])


@dataclass(frozen=True)
class LdaParams:
    """Parameters α = 2β·c_{2β} and λ < 1/A_β of the extension E*_{α,λ}."""

    beta: float
    alpha: float
    lam: float
    a_beta: float
    assumption: str = CONDITION_A1_READING

    def __post_init__(self) -> None:
        if not 0 < self.lam < 1 or not self.lam * self.a_beta < 1:
            raise ValueError(f"Need 0 < lambda < min(1, 1/A_beta), got {self.lam}, {self.a_beta}")


def choose_lda_params(space: DiscreteSpace, safety: float = 0.5) -> LdaParams:
    """
    β = c_1, α = 2β·c_{2β}, A_β = max γ(B(z, 4t))/γ(B(z, t/4)) over (β·c_β/4)-admissible
    B(z, t/4), and λ = safety/A_β.
    """
    beta = verify_condition_C(space, 1.0).empirical_c_alpha
    alpha = 2.0 * beta * verify_condition_C(space, 2.0 * beta).empirical_c_alpha
    c_beta = verify_condition_C(space, beta).empirical_c_alpha
    a_beta = doubling_constant(space, beta * c_beta / 4.0, 16.0)
    params = LdaParams(beta, alpha, safety / a_beta, a_beta)
    log.info("Cone-cover parameters: %s", params)
    return params


@dataclass(frozen=True)
class Extension:
    """E*_{α,λ} computed as a union of balls and as a maximal-function superlevel set."""

    by_balls: np.ndarray
    by_maximal: np.ndarray

    @property
    def agree(self) -> bool:
        """Check whether both computations give the same set."""
        return bool(np.array_equal(self.by_balls, self.by_maximal))

    @property
    def points(self) -> np.ndarray:
        """Get E* (the superlevel-set computation)."""
        return self.by_maximal


def extension(space: DiscreteSpace, open_set: PointSet, params: LdaParams) -> Extension:
    """E*: the union of α-admissible balls B with γ(B ∩ E)/γ(B) > λ, computed two ways."""
    table = space.balls
    indicator = point_mask(space, open_set).astype(float)
    valid = table.group_end & (table.sorted_distances < params.alpha * space.m[:, None])
    weighted = (np.abs(indicator) * space.gamma)[table.order]
    averages = np.where(valid, np.cumsum(weighted, axis=1) / table.cum_gamma, -np.inf)
    qualifying = averages > params.lam
    last = space.n_points - 1 - np.argmax(qualifying[:, ::-1], axis=1)
    deepest = np.where(qualifying.any(axis=1), last, -1)
    by_balls = (table.rank <= deepest[:, None]).any(axis=0)
    by_maximal = local_maximal(space, indicator, params.alpha) > params.lam
    return Extension(by_balls, by_maximal)


@dataclass(frozen=True)
class ConeCover:
    """
    Directions, hitting times and complement points of a cone cover, with its certificate.

    ``hits[m]`` is None when no closed sector in direction m meets X∖E.
    """

    x: int
    directions: np.ndarray
    hitting_times: np.ndarray
    hits: List[Optional[int]]
    escaped_nodes: int

    @property
    def passed(self) -> bool:
        """Check Γ(x) ∖ T(E*) ⊆ ∪_m Γ(x_m) node by node."""
        return self.escaped_nodes == 0


def hitting_times(
    space: DiscreteSpace, open_set: PointSet, x: int, directions: np.ndarray
) -> tuple:
    """
    Smallest t with the closed ball B̄(x + t·v, t/4) meeting X∖E, per direction.

    For a complement point p with w = p - x that is the smaller root of
    (15/16)t^2 - 2⟨v, w⟩t + |w|^2 = 0, which exists iff ⟨v, w⟩ > 0 and
    ⟨v, w⟩^2 ≥ (15/16)|w|^2.
    """
    coords = _coords(space)
    outside = np.flatnonzero(~point_mask(space, open_set))
    times = np.full(len(directions), np.inf)
    hits: List[Optional[int]] = [None] * len(directions)
    if outside.size == 0:
        return times, hits
    offset = coords[outside] - coords[x]
    square = np.sum(offset**2, axis=1)
    for m, direction in enumerate(directions):
        along = offset @ direction
        discriminant = along**2 - 15.0 / 16.0 * square
        real = (along > 0) & (discriminant >= 0)
        if not real.any():
            continue
        smaller = (along - np.sqrt(np.where(real, discriminant, 0.0))) * 16.0 / 15.0
        roots = np.where(real, smaller, np.inf)
        best = int(np.argmin(roots))
        times[m] = float(roots[best])
        hits[m] = int(outside[best])
    return times, hits


def cone_cover(
    space: DiscreteSpace,
    region: RegionGrid,
    open_set: PointSet,
    x: int,
    params: LdaParams,
    extended: Optional[np.ndarray] = None,
) -> ConeCover:
    """
    Cover Γ(x) ∖ T(E*) by the cones over the first complement points hit in each direction.

    Parameters
    ----------
    space : DiscreteSpace
        embedded in dimension 1 or 2
    region : RegionGrid
    open_set : PointSet
        the set E, containing x
    x : int
    params : LdaParams
    extended : Optional[np.ndarray]
        precomputed E*

    Returns
    -------
    ConeCover
    """
    directions = direction_net(_coords(space).shape[1])
    times, hits = hitting_times(space, open_set, x, directions)
    star = extended if extended is not None else extension(space, open_set, params).points
    escaped = cone(region, x, 1.0) & ~tent(region, star)
    for hit in sorted({h for h in hits if h is not None}):
        escaped &= ~cone(region, hit, 1.0)
    return ConeCover(x, directions, times, hits, int(escaped.sum()))


@dataclass(frozen=True)
class PointwiseReport:
    """Outcome of the bound A_q(f·1_{D∖T(E*)}) ≤ N·λ with E = {A_q f > λ}."""

    lam: float
    bound: float
    worst_x: int
    worst_value: float
    passed: bool


def corollary_pointwise_check(
    space: DiscreteSpace,
    region: RegionGrid,
    f: TentFunction,
    q: float,
    lam: float,
    params: LdaParams,
) -> PointwiseReport:
    """Evaluate max_x A_q(f·1_{D∖T(E*)})(x) against N·λ, N the direction-net size."""
    level = a_q_alpha(region, f, q, 1.0) > lam
    star = extension(space, level, params).points
    area = a_q_alpha(region, f.restrict(~tent(region, star)), q, 1.0)
    bound = len(direction_net(_coords(space).shape[1])) * lam
    worst = int(np.argmax(area))
    value = float(area[worst])
    return PointwiseReport(lam, bound, worst, value, value <= bound * (1 + 1e-12))


@dataclass(frozen=True)
class SectorExtensionReport:
    """Randomized search for sectors R(v, t) ⊆ E with some B(y, 2t) ⊄ E*."""

    trials: int
    sectors_inside: int
    violations: int


def sector_extension_check(
    space: DiscreteSpace,
    open_set: PointSet,
    params: LdaParams,
    rng: np.random.Generator,
    trials: int = 50,
) -> SectorExtensionReport:
    """Sample apexes in E, directions and extents t ≤ β·m(x); check B(y, 2t) ⊆ E* on hits."""
    coords = _coords(space)
    inside = point_mask(space, open_set)
    star = extension(space, inside, params).points
    candidates = np.flatnonzero(inside)
    dim = coords.shape[1]
    found = violations = 0
    for _ in range(trials):
        if candidates.size == 0:
            break
        apex = int(rng.choice(candidates))
        raw = rng.normal(size=dim)
        direction = tuple(raw / np.linalg.norm(raw))
        extent = float(params.beta * space.m[apex] * rng.uniform(0.05, 1.0))
        sector = sector_members(space, SectorSpec(apex, direction, extent))
        if not sector.any() or not np.all(inside[sector]):
            continue
        found += 1
        near = (space.distances[sector] < 2.0 * extent).any(axis=0)
        if np.any(near & ~star):
            violations += 1
    return SectorExtensionReport(trials, found, violations)


def comparison_selftest(rng: np.random.Generator, samples: int = 1000) -> float:
    """
    Worst ratio d(y, z)/(d(x, z)·tan θ) over planar triples with d(x, y) = d(x, z) and
    angle θ < π/2 at x.
    """
    worst = 0.0
    for _ in range(samples):
        x = rng.normal(size=2)
        radius = rng.uniform(0.1, 5.0)
        theta = rng.uniform(1e-3, math.pi / 2 - 1e-3)
        start = rng.uniform(0.0, 2.0 * math.pi)
        y = x + radius * np.array([math.cos(start), math.sin(start)])
        z = x + radius * np.array([math.cos(start + theta), math.sin(start + theta)])
        worst = max(worst, float(np.linalg.norm(y - z) / (radius * math.tan(theta))))
    return worst


def divergence_selftest(
    rng: np.random.Generator, samples: int = 1000, max_angle: float = MAX_ANGLE
) -> float:
    """Worst ratio |ρ_1(t) - ρ_2(t)|/(t/4) for rays from one point at angle ≤ ``max_angle``."""
    worst = 0.0
    for _ in range(samples):
        start = rng.uniform(0.0, 2.0 * math.pi)
        theta = rng.uniform(0.0, max_angle)
        t = rng.uniform(1e-3, 10.0)
        first = t * np.array([math.cos(start), math.sin(start)])
        second = t * np.array([math.cos(start + theta), math.sin(start + theta)])
        worst = max(worst, float(np.linalg.norm(first - second) / (t / 4.0)))
    return worst
