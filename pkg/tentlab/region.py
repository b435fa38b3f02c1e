"""
Discretization of the admissible region, cones and tents

Tent functions, cones and tents are all (N, L) arrays over points × time levels; entries off the
region mask t_l < m(y_i) are zero (or False).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, Optional, Sequence

import numpy as np

from tentlab.errors import EmptyRegionError
from tentlab.spaces import Ball, DiscreteSpace, PointSet, ball_members, point_mask

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TimeGrid:
    """
    Time levels with log-time quadrature weights for the measure dt/t.

    Attributes
    ----------
    levels : np.ndarray
        strictly increasing positive times
    log_weights : np.ndarray
        w_l = log(t_{l+1}/t_l); the last weight repeats the previous ratio
    """

    levels: np.ndarray
    log_weights: np.ndarray

    def __post_init__(self) -> None:
        if self.levels.ndim != 1 or self.levels.size == 0:
            raise ValueError("A time grid needs at least one level")
        if np.any(self.levels <= 0) or np.any(np.diff(self.levels) <= 0):
            raise ValueError("Time levels must be positive and strictly increasing")
        if self.log_weights.shape != self.levels.shape or np.any(self.log_weights <= 0):
            raise ValueError("Every level needs a positive log weight")

    @property
    def n_levels(self) -> int:
        """Get the number of levels."""
        return int(self.levels.size)

    @classmethod
    def from_levels(cls, levels: Sequence[float]) -> "TimeGrid":
        """Weights from consecutive level ratios; a single level gets the dyadic weight log 2."""
        times = np.asarray(levels, dtype=float)
        if times.size == 1:
            return cls(times, np.array([math.log(2.0)]))
        gaps = np.log(times[1:] / times[:-1])
        return cls(times, np.append(gaps, gaps[-1]))

    @classmethod
    def log_uniform(cls, t_min: float, t_max: float, n_levels: int) -> "TimeGrid":
        """``n_levels`` log-spaced levels covering [t_min, t_max) with constant weights."""
        if not 0 < t_min < t_max or n_levels < 1:
            raise ValueError(f"Invalid log-uniform grid [{t_min}, {t_max}) with {n_levels} levels")
        levels = np.geomspace(t_min, t_max, n_levels + 1)[:-1]
        return cls(levels, np.full(n_levels, math.log(t_max / t_min) / n_levels))

    @classmethod
    def default_for(cls, space: DiscreteSpace, n_levels: int = 32) -> "TimeGrid":
        """Log-uniform grid on [min(m)/8, max(m))."""
        return cls.log_uniform(float(space.m.min()) / 8, float(space.m.max()), n_levels)


@dataclass(frozen=True, eq=False)
class RegionGrid:
    """
    Nodes (i, l) of the admissible region with t_l < m(y_i).

    Attributes
    ----------
    space : DiscreteSpace
    time_grid : TimeGrid
    mask : np.ndarray
        (N, L) node membership
    node_weight : np.ndarray
        (N, L) γ_i·w_l on nodes, zero elsewhere
    ball_mass : np.ndarray
        (N, L) γ(B(y_i, t_l))
    """

    space: DiscreteSpace
    time_grid: TimeGrid
    mask: np.ndarray
    node_weight: np.ndarray
    ball_mass: np.ndarray
    _cache: Dict[tuple, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def levels(self) -> np.ndarray:
        """Get the time levels."""
        return self.time_grid.levels

    @property
    def shape(self) -> tuple:
        """Get the (points, levels) shape of node arrays."""
        return self.mask.shape

    @property
    def n_nodes(self) -> int:
        """Get the number of nodes."""
        return int(self.mask.sum())

    @property
    def nodes(self) -> tuple:
        """Get the (point indices, level indices) of every node, in row-major order."""
        return np.nonzero(self.mask)

    @property
    def cone_measure(self) -> np.ndarray:
        """Get γ_i·w_l/γ(B(y_i, t_l)), the quadrature weight of the conical functional."""
        return self.node_weight / self.ball_mass

    def scaled_ball_mass(self, alpha: float) -> np.ndarray:
        """γ(B(y_i, α·t_l)) for every (i, l)."""
        key = ("ball_mass", float(alpha))
        if key not in self._cache:
            self._cache[key] = _level_ball_masses(self.space, alpha * self.levels)
        return self._cache[key]

    def cone_level_index(self, alpha: float) -> np.ndarray:
        """(N, N) first level l with d(x, y_i) < α·t_l, indexed [x, i] (L when there is none)."""
        key = ("cone", float(alpha))
        if key not in self._cache:
            index = np.searchsorted(alpha * self.levels, self.space.distances, side="right")
            index.setflags(write=False)
            self._cache[key] = index
        return self._cache[key]

    def node_list(self) -> np.ndarray:
        """(n_nodes, 2) array of (point, level) pairs, the node numbering used in files."""
        return np.column_stack(self.nodes)

    def summary(self) -> Dict[str, object]:
        """Plain summary for reports."""
        per_level = self.mask.sum(axis=0)
        return {
            "n_nodes": self.n_nodes,
            "n_levels": self.time_grid.n_levels,
            "t_min": float(self.levels[0]),
            "t_max": float(self.levels[-1]),
            "nodes_per_level": [int(count) for count in per_level],
        }


def _level_ball_masses(space: DiscreteSpace, radii: np.ndarray) -> np.ndarray:
    """(N, L) masses γ(B(y_i, radii_l))."""
    n_points, n_levels = space.n_points, len(radii)
    centers = np.repeat(np.arange(n_points), n_levels)
    masses = space.balls.masses_below(centers, np.tile(radii, n_points))
    masses = masses.reshape(n_points, n_levels)
    masses.setflags(write=False)
    return masses


def build_region(space: DiscreteSpace, time_grid: Optional[TimeGrid] = None) -> RegionGrid:
    """
    Discretize the admissible region {(y, t) : t < m(y)}.

    Parameters
    ----------
    space : DiscreteSpace
    time_grid : Optional[TimeGrid]
        defaults to :meth:`TimeGrid.default_for`

    Returns
    -------
    RegionGrid

    Raises
    ------
    EmptyRegionError
        if every m_i is at or below the first level
    """
    grid = time_grid or TimeGrid.default_for(space)
    mask = grid.levels[None, :] < space.m[:, None]
    if not mask.any():
        raise EmptyRegionError(float(grid.levels[0]))
    node_weight = np.where(mask, space.gamma[:, None] * grid.log_weights[None, :], 0.0)
    for array in (mask, node_weight):
        array.setflags(write=False)
    region = RegionGrid(space, grid, mask, node_weight, _level_ball_masses(space, grid.levels))
    log.info("Region over %s has %d nodes on %d levels", space.name, region.n_nodes, grid.n_levels)
    return region


def cone(region: RegionGrid, x: int, alpha: float = 1.0) -> np.ndarray:
    """Nodes (i, l) with d(x, y_i) < α·t_l."""
    if not alpha > 0:
        raise ValueError(f"Aperture must be positive, got {alpha}")
    reach = alpha * region.levels
    return region.mask & (region.space.distances[x][:, None] < reach[None, :])


def tent(region: RegionGrid, open_set: PointSet) -> np.ndarray:
    """
    Tent T(O): the region minus the aperture-1 cones over the complement of O.

    Node (i, l) survives iff no x outside O has d(x, y_i) < t_l.
    """
    inside = point_mask(region.space, open_set)
    if inside.all():
        return region.mask.copy()
    outside_distance = region.space.distances[:, ~inside].min(axis=1)
    covered = outside_distance[:, None] < region.levels[None, :]
    return region.mask & ~covered


def tent_by_containment(region: RegionGrid, open_set: PointSet) -> np.ndarray:
    """Tent computed from the characterization B(y_i, t_l) ⊆ O, one sorted row per point."""
    table = region.space.balls
    inside = point_mask(region.space, open_set)
    n_points = region.space.n_points
    positions = np.broadcast_to(np.arange(n_points), (n_points, n_points))
    first_outside = np.where(inside[table.order], n_points, positions).min(axis=1)
    contained = np.empty(region.shape, dtype=bool)
    for point in range(n_points):
        counts = np.searchsorted(table.sorted_distances[point], region.levels, side="left")
        contained[point] = counts <= first_outside[point]
    return region.mask & contained


def cone_tent_reach(region: RegionGrid, ball: Ball, alpha: float) -> np.ndarray:
    """
    Points x whose aperture-α cone meets T(B) although d(x, c_B) ≥ α·r_B.

    Empty in length spaces; on a finite cloud points near the boundary may appear.
    """
    tent_nodes = tent(region, ball_members(region.space, ball))
    # tents are down-closed in t, so each row is a prefix of levels
    depth = tent_nodes.sum(axis=1)
    reach = np.where(depth > 0, alpha * region.levels[np.maximum(depth - 1, 0)], -np.inf)
    sees = (region.space.distances < reach[None, :]).any(axis=1)
    far = region.space.distances[ball.center] >= alpha * ball.radius
    return np.flatnonzero(sees & far)
