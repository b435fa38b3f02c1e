"""
Adjacent dyadic systems on embedded clouds and the maximal operators they control

The 3^n systems use the cells 2^{-k}([0, 1)^n + j + (-1)^k ω/3), ω ∈ {0, 1, 2}^n. Labels of the
finest generation are computed from coordinates; coarser labels follow from the exact integer
parent rule J = floor((j - (-1)^k ω)/2), so nesting holds by construction.
"""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from tentlab.errors import EmbeddingError, NoAdmissibleBallsError
from tentlab.spaces import Ball, DiscreteSpace, distinct_balls

log = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class DyadicSystem:
    """
    Nested partitions of a point cloud, one per generation.

    Attributes
    ----------
    shift : Tuple[int, ...]
        ω; the coordinate shift of generation k is (-1)^k ω/3 in units of 2^{-k}
    generations : np.ndarray
        (G,) the scales k, coarse to fine
    labels : np.ndarray
        (G, N) cube index of every point in every generation (indices are consecutive)
    parents : List[np.ndarray]
        cube index of the parent of each cube (empty for the coarsest generation)
    diameters : List[np.ndarray]
        max pairwise member distance of each cube
    masses : List[np.ndarray]
        γ-mass of each cube
    """

    shift: Tuple[int, ...]
    generations: np.ndarray
    labels: np.ndarray
    parents: List[np.ndarray]
    diameters: List[np.ndarray]
    masses: List[np.ndarray]

    @property
    def shift_label(self) -> Tuple[float, ...]:
        """Get the shift ω/3."""
        return tuple(w / 3 for w in self.shift)

    def n_cubes(self, generation: int) -> int:
        """Number of cubes in generation index ``generation``."""
        return len(self.masses[generation])

    def members(self, generation: int, cube: int) -> np.ndarray:
        """Point indices of a cube."""
        return np.flatnonzero(self.labels[generation] == cube)


def generation_range(space: DiscreteSpace) -> Tuple[int, int]:
    """[floor(log2(1/diam X)) - 2, ceil(log2(1/min spacing)) + 1]."""
    positive = space.distances[space.distances > 0]
    if positive.size == 0:
        return 0, 0
    coarse = math.floor(math.log2(1.0 / positive.max())) - 2
    fine = math.ceil(math.log2(1.0 / positive.min())) + 1
    return coarse, fine


def _cube_diameters(space: DiscreteSpace, labels: np.ndarray, n_cubes: int) -> np.ndarray:
    coords = space.coords
    if coords is not None and coords.shape[1] == 1:
        x = coords[:, 0]
        highs = np.full(n_cubes, -np.inf)
        lows = np.full(n_cubes, np.inf)
        np.maximum.at(highs, labels, x)
        np.minimum.at(lows, labels, x)
        return highs - lows
    diameters = np.zeros(n_cubes)
    order = np.argsort(labels, kind="stable")
    bounds = np.flatnonzero(np.diff(labels[order])) + 1
    for cube, members in enumerate(np.split(order, bounds)):
        diameters[cube] = space.distances[np.ix_(members, members)].max()
    return diameters


def build_shifted_systems(
    space: DiscreteSpace, k_range: Optional[Tuple[int, int]] = None
) -> List[DyadicSystem]:
    """
    Build the 3^n shifted dyadic systems of an embedded cloud.

    Parameters
    ----------
    space : DiscreteSpace
        must carry coordinates
    k_range : Optional[Tuple[int, int]]
        generations (coarsest, finest); defaults to :func:`generation_range`

    Returns
    -------
    List[DyadicSystem]

    Raises
    ------
    EmbeddingError
        if the space has no coordinates
    """
    if space.coords is None:
        raise EmbeddingError("Shifted dyadic systems")
    coarse, fine = k_range or generation_range(space)
    generations = np.arange(coarse, fine + 1)
    dim = space.coords.shape[1]
    systems = []
    for shift in itertools.product(range(3), repeat=dim):
        omega = np.asarray(shift)
        sign = (-1) ** int(fine)
        cells = np.floor(space.coords * 2.0**fine - sign * omega / 3).astype(np.int64)
        raw = [cells]
        for k in generations[::-1][1:]:
            cells = np.floor_divide(cells - (-1) ** int(k) * omega, 2)
            raw.append(cells)
        raw.reverse()

        labels = np.empty((len(generations), space.n_points), dtype=np.int64)
        parents, diameters, masses = [], [], []
        for g, cells in enumerate(raw):
            _, labels[g] = np.unique(cells, axis=0, return_inverse=True)
            n_cubes = int(labels[g].max()) + 1
            masses.append(np.bincount(labels[g], space.gamma, n_cubes))
            diameters.append(_cube_diameters(space, labels[g], n_cubes))
            parent = np.full(n_cubes, -1, dtype=np.int64)
            if g > 0:
                parent[labels[g]] = labels[g - 1]
            parents.append(parent)
        systems.append(DyadicSystem(shift, generations, labels, parents, diameters, masses))
    log.info(
        "Built %d dyadic systems on generations %d..%d for %s",
        len(systems),
        coarse,
        fine,
        space.name,
    )
    return systems


def check_system(space: DiscreteSpace, system: DyadicSystem) -> bool:
    """Partition, nesting and positive-mass invariants of every generation."""
    for g in range(len(system.generations)):
        labels = system.labels[g]
        if labels.shape != (space.n_points,) or labels.min() < 0:
            return False
        if np.any(np.bincount(labels) == 0) or np.any(system.masses[g] <= 0):
            return False
        if g > 0 and np.any(system.parents[g][labels] != system.labels[g - 1]):
            return False
    return True


def _magnitude(u: np.ndarray) -> np.ndarray:
    values = np.abs(np.asarray(u))
    return values if values.ndim == 2 else values[:, None]


def dyadic_maximal(space: DiscreteSpace, system: DyadicSystem, u: np.ndarray) -> np.ndarray:
    """M_D u(x): the largest γ-average of |u| over the cubes containing x (componentwise)."""
    weighted = _magnitude(u) * space.gamma[:, None]
    best = np.zeros_like(weighted)
    for g in range(len(system.generations)):
        sums = np.zeros((system.n_cubes(g), weighted.shape[1]))
        np.add.at(sums, system.labels[g], weighted)
        averages = sums / system.masses[g][:, None]
        best = np.maximum(best, averages[system.labels[g]])
    return best if np.ndim(u) == 2 else best[:, 0]


def local_maximal(space: DiscreteSpace, u: np.ndarray, alpha: float) -> np.ndarray:
    """
    M_α u(x): the largest γ-average of |u| over the α-admissible balls containing x.

    Along each center's sorted row the admissible balls are prefixes, and x lies in every prefix
    reaching its rank, so a suffix maximum over prefix averages answers all points at once.
    """
    if np.ndim(u) == 2:
        return lattice_maximal(space, u, alpha)
    table = space.balls
    valid = table.group_end & (table.sorted_distances < alpha * space.m[:, None])
    if not valid.any():
        raise NoAdmissibleBallsError(alpha)
    weighted = (np.abs(u) * space.gamma)[table.order]
    averages = np.where(valid, np.cumsum(weighted, axis=1) / table.cum_gamma, -np.inf)
    reach = np.maximum.accumulate(averages[:, ::-1], axis=1)[:, ::-1]
    seen = np.take_along_axis(reach, table.rank, axis=1)
    return np.maximum(seen.max(axis=0), 0.0)


def lattice_maximal(space: DiscreteSpace, field: np.ndarray, alpha: float) -> np.ndarray:
    """Componentwise M_α of a field U(x, s) given as an (N, S) array."""
    table = space.balls
    magnitude = _magnitude(field)
    weighted = magnitude * space.gamma[:, None]
    best = np.zeros_like(magnitude)
    for center in range(space.n_points):
        valid = table.group_end[center] & (
            table.sorted_distances[center] < alpha * space.m[center]
        )
        averages = np.cumsum(weighted[table.order[center]], axis=0)
        averages /= table.cum_gamma[center][:, None]
        averages[~valid] = -np.inf
        reach = np.maximum.accumulate(averages[::-1], axis=0)[::-1]
        best = np.maximum(best, reach[table.rank[center]])
    return best


@dataclass(frozen=True)
class ContainmentReport:
    """
    How tightly the systems absorb admissible balls.

    ``c_x`` bounds diam(Q_B)/diam(B) and ``mass_constant`` bounds γ(Q_B)/γ(B) for the best cube
    Q_B ⊇ B over all systems.
    """

    alpha: float
    n_balls: int
    uncontained: int
    c_x: float
    mass_constant: float
    worst_ball: Optional[Ball]


def _prefix_diameters(space: DiscreteSpace, center: int) -> np.ndarray:
    row = space.balls.order[center]
    if space.coords is not None and space.coords.shape[1] == 1:
        x = space.coords[row, 0]
        return np.maximum.accumulate(x) - np.minimum.accumulate(x)
    block = np.tril(space.distances[np.ix_(row, row)])
    return np.maximum.accumulate(block.max(axis=1))


def containment_constants(
    space: DiscreteSpace, systems: Sequence[DyadicSystem], alpha: float
) -> ContainmentReport:
    """
    For every distinct α-admissible ball find the finest cube of each system containing it.

    A prefix of a center's row is inside one cube of a generation iff the running minimum and
    maximum of the permuted labels agree; generations are nested, so the finest such generation
    gives the smallest cube.
    """
    table = space.balls
    centers, positions, radii = distinct_balls(space, alpha)
    if centers.size == 0:
        raise NoAdmissibleBallsError(alpha)
    best_diameter = np.full(centers.size, np.inf)
    best_mass = np.full(centers.size, np.inf)
    ball_mass = table.cum_gamma[centers, positions]
    ball_diameter = np.zeros(centers.size)
    for center in np.unique(centers):
        chunk = np.flatnonzero(centers == center)
        ball_diameter[chunk] = _prefix_diameters(space, int(center))[positions[chunk]]

    for system in systems:
        for center in np.unique(centers):
            chunk = np.flatnonzero(centers == center)
            permuted = system.labels[:, table.order[center]]
            same = np.maximum.accumulate(permuted, axis=1) == np.minimum.accumulate(
                permuted, axis=1
            )
            inside = same[:, positions[chunk]]
            contained = inside.any(axis=0)
            finest = len(system.generations) - 1 - np.argmax(inside[::-1], axis=0)
            cube = system.labels[finest, center]
            diameters = np.array([system.diameters[g][c] for g, c in zip(finest, cube)])
            masses = np.array([system.masses[g][c] for g, c in zip(finest, cube)])
            best_diameter[chunk] = np.where(
                contained, np.minimum(best_diameter[chunk], diameters), best_diameter[chunk]
            )
            best_mass[chunk] = np.where(
                contained, np.minimum(best_mass[chunk], masses), best_mass[chunk]
            )

    uncontained = int(np.sum(~np.isfinite(best_mass)))
    sized = ball_diameter > 0
    diameter_ratio = np.where(sized, best_diameter / np.where(sized, ball_diameter, 1.0), 0.0)
    mass_ratio = best_mass / ball_mass
    worst = int(np.argmax(mass_ratio))
    return ContainmentReport(
        alpha=alpha,
        n_balls=int(centers.size),
        uncontained=uncontained,
        c_x=float(diameter_ratio.max()),
        mass_constant=float(mass_ratio.max()),
        worst_ball=Ball(int(centers[worst]), float(radii[worst])),
    )


@dataclass(frozen=True)
class Weak11Report:
    """Outcome of a weak-(1,1) sweep: γ({Mu > λ}) ≤ C·‖u‖_1/λ."""

    constant: float
    measured_constant: float
    violations: int
    worst_lambda: Optional[float]


def weak11_check(
    space: DiscreteSpace,
    operator: Union[DyadicSystem, float],
    u: np.ndarray,
    lambda_grid: Sequence[float],
    constant: Optional[float] = None,
    rtol: float = 1e-12,
) -> Weak11Report:
    """
    Sweep the weak-(1,1) bound of a dyadic maximal operator (constant 1) or of M_α.

    Parameters
    ----------
    operator : DyadicSystem or float
        a system, or the aperture α of the local maximal operator
    constant : Optional[float]
        the asserted constant; required for the local operator
    """
    if isinstance(operator, DyadicSystem):
        maximal = dyadic_maximal(space, operator, u)
        constant = 1.0 if constant is None else constant
    else:
        if constant is None:
            raise ValueError("The local maximal operator needs an explicit constant")
        maximal = local_maximal(space, u, float(operator))
    l1 = float(np.sum(np.abs(u) * space.gamma))
    measured, violations, worst = 0.0, 0, None
    for lam in lambda_grid:
        level = float(space.gamma[maximal > lam].sum())
        if l1 > 0:
            ratio = lam * level / l1
            if ratio > measured:
                measured, worst = ratio, float(lam)
        if level > constant * l1 / lam * (1 + rtol):
            violations += 1
    return Weak11Report(constant, measured, violations, worst)


def domination_ratio(
    space: DiscreteSpace,
    systems: Sequence[DyadicSystem],
    u: np.ndarray,
    alpha: float,
    mass_constant: float,
) -> float:
    """max over x (and components) of M_α u / (C̃·Σ_D M_D u); at most 1 when domination holds."""
    local = local_maximal(space, u, alpha)
    dyadic = sum(dyadic_maximal(space, system, u) for system in systems)
    scaled = mass_constant * dyadic
    positive = local > 0
    if not positive.any():
        return 0.0
    return float(np.max(local[positive] / scaled[positive]))


def fefferman_stein_ratios(
    space: DiscreteSpace,
    field: np.ndarray,
    alpha: float,
    q: float,
    exponents: Sequence[float] = (1.5, 2.0, 4.0),
) -> Dict[float, float]:
    """‖M_α U‖_{L^p(ℓ^q)}/‖U‖_{L^p(ℓ^q)} for each p."""
    if not q > 1:
        raise ValueError(f"Lattice exponent q must exceed 1, got {q}")
    maximal = lattice_maximal(space, field, alpha)
    inner_max = np.sum(maximal**q, axis=1) ** (1.0 / q)
    inner = np.sum(np.abs(field) ** q, axis=1) ** (1.0 / q)
    ratios = {}
    for p in exponents:
        top = np.sum(inner_max**p * space.gamma) ** (1.0 / p)
        bottom = np.sum(inner**p * space.gamma) ** (1.0 / p)
        ratios[float(p)] = float(top / bottom) if bottom > 0 else 0.0
    return ratios
