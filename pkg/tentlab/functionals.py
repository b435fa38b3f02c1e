"""
Conical functionals, tent-space norms, the duality pairing and the cone operators J_α and N_α
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from tentlab.errors import ApertureError, NoAdmissibleBallsError, RegionMismatchError
from tentlab.region import RegionGrid
from tentlab.spaces import Ball, distinct_balls

log = logging.getLogger(__name__)

Scalar = Union[float, complex]


@dataclass(frozen=True, eq=False)
class TentFunction:
    """
    Function on the nodes of an admissible region.

    Values are stored as an (N, L) array that vanishes off the region mask.
    """

    region: RegionGrid
    values: np.ndarray

    def __post_init__(self) -> None:
        """Check the values against the shape and support of the region."""
        if self.values.shape != self.region.shape:
            raise RegionMismatchError(self.region.shape, self.values.shape)
        if np.any(self.values[~self.region.mask] != 0):
            raise RegionMismatchError(self.region.shape, self.values.shape)
        if not np.all(np.isfinite(self.values)):
            raise ValueError("Tent function values must be finite")

    @classmethod
    def zeros(cls, region: RegionGrid, dtype: type = float) -> "TentFunction":
        """The zero function."""
        return cls(region, np.zeros(region.shape, dtype=dtype))

    @classmethod
    def from_nodes(
        cls,
        region: RegionGrid,
        points: np.ndarray,
        levels: np.ndarray,
        values: np.ndarray,
    ) -> "TentFunction":
        """Build from (point, level, value) triples; repeated nodes add up."""
        values = np.asarray(values)
        dense = np.zeros(region.shape, dtype=complex if np.iscomplexobj(values) else float)
        nodes = (np.asarray(points, dtype=np.int64), np.asarray(levels, dtype=np.int64))
        np.add.at(dense, nodes, values)
        return cls(region, dense)

    @property
    def support(self) -> np.ndarray:
        """Get the nodes where the function is nonzero."""
        return self.values != 0

    @property
    def is_zero(self) -> bool:
        """Check whether the function vanishes identically."""
        return not np.any(self.values)

    def restrict(self, nodes: np.ndarray) -> "TentFunction":
        """Multiply by the indicator of a node set."""
        return TentFunction(self.region, np.where(nodes, self.values, 0))

    def scale(self, factor: Scalar) -> "TentFunction":
        """Multiply by a scalar."""
        return TentFunction(self.region, self.values * factor)

    def __add__(self, other: "TentFunction") -> "TentFunction":
        """Add two functions on the same region."""
        if other.region is not self.region:
            raise RegionMismatchError(self.region.shape, other.region.shape)
        return TentFunction(self.region, self.values + other.values)

    def node_values(self) -> np.ndarray:
        """Values in the region's node order."""
        return self.values[self.region.mask]


def _magnitudes(f: Union[TentFunction, np.ndarray]) -> np.ndarray:
    values = f.values if isinstance(f, TentFunction) else f
    return np.abs(values)


def a_q_alpha(
    region: RegionGrid, f: Union[TentFunction, np.ndarray], q: float, alpha: float = 1.0
) -> np.ndarray:
    """
    Conical functional A_q^α f at every point.

    A(x)^q sums |f|^q·γ_i·w_l/γ(B(y_i, t_l)) over the nodes with d(x, y_i) < α·t_l. Cones are
    up-closed in t, so the sum is a gather from per-point suffix sums over levels.

    Parameters
    ----------
    region : RegionGrid
    f : TentFunction or np.ndarray
        (N, L) values
    q : float
        exponent in (0, ∞)
    alpha : float
        aperture

    Returns
    -------
    np.ndarray
        A_q^α f per point
    """
    if not 0 < q < math.inf:
        raise ValueError(f"Exponent q must lie in (0, inf), got {q}")
    energy = _magnitudes(f) ** q * region.cone_measure
    n_points = energy.shape[0]
    suffix = np.zeros((n_points, energy.shape[1] + 1))
    suffix[:, :-1] = np.cumsum(energy[:, ::-1], axis=1)[:, ::-1]
    index = region.cone_level_index(alpha)
    totals = suffix[np.arange(n_points)[None, :], index].sum(axis=1)
    return totals ** (1.0 / q)


def tpq_norm(
    region: RegionGrid,
    f: Union[TentFunction, np.ndarray],
    p: float,
    q: float,
    alpha: float = 1.0,
) -> float:
    """Tent-space norm ‖f‖_{t^{p,q}_α} = ‖A_q^α f‖_{L^p(γ)}."""
    if not 0 < p < math.inf:
        raise ValueError(f"Exponent p must lie in (0, inf), got {p}")
    area = a_q_alpha(region, f, q, alpha)
    return float(np.sum(area**p * region.space.gamma) ** (1.0 / p))


def fubini_qq(
    region: RegionGrid, f: Union[TentFunction, np.ndarray], q: float, alpha: float
) -> float:
    """‖f‖^q_{t^{q,q}_α} summed node-wise with the weight γ(B(y, αt))/γ(B(y, t))."""
    ratio = region.scaled_ball_mass(alpha) / region.ball_mass
    return float(np.sum(_magnitudes(f) ** q * region.node_weight * ratio))


def tinf_ball_values(
    region: RegionGrid,
    g: Union[TentFunction, np.ndarray],
    qprime: float,
    admissible_level: float = 5.0,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Evaluate (γ(B)^{-1} Σ_{T(B)} |g|^{q'} γ_i w_l)^{1/q'} on every distinct admissible ball.

    For ``qprime = inf`` the value is the supremum of |g| over T(B). Node (i, l) lies in T(B)
    iff t_l ≤ dist(y_i, X∖B). Along a center's sorted row the complement of a prefix is a
    suffix, so these distances are reverse running minima.

    Returns
    -------
    Tuple[np.ndarray, np.ndarray, np.ndarray]
        centers, radii and values of every enumerated ball
    """
    space = region.space
    table = space.balls
    magnitude = _magnitudes(g)
    n_points, n_levels = region.shape
    if qprime == math.inf:
        profile = np.zeros((n_points, n_levels + 1))
        profile[:, 1:] = np.maximum.accumulate(np.where(region.mask, magnitude, 0.0), axis=1)
    elif qprime >= 1:
        profile = np.zeros((n_points, n_levels + 1))
        profile[:, 1:] = np.cumsum(magnitude**qprime * region.node_weight, axis=1)
    else:
        raise ValueError(f"Exponent q' must lie in [1, inf], got {qprime}")

    centers, positions, radii = distinct_balls(space, admissible_level)
    values = np.zeros(len(centers))
    bounds = np.flatnonzero(np.diff(centers)) + 1
    for chunk in np.split(np.arange(len(centers)), bounds):
        if chunk.size == 0:
            continue
        center = centers[chunk[0]]
        prefixes = positions[chunk]
        depth = int(prefixes.max()) + 1
        row = table.order[center]
        members = row[:depth]
        beyond = np.full((depth, n_points + 1), np.inf)
        beyond[:, :-1] = np.minimum.accumulate(
            space.distances[np.ix_(members, row)][:, ::-1], axis=1
        )[:, ::-1]
        gap = beyond[:, prefixes + 1]
        count = np.searchsorted(region.levels, gap, side="right")
        gathered = profile[members[:, None], count]
        inside = np.arange(depth)[:, None] <= prefixes[None, :]
        if qprime == math.inf:
            values[chunk] = np.where(inside, gathered, 0.0).max(axis=0)
        else:
            mass = table.cum_gamma[center, prefixes]
            values[chunk] = (np.where(inside, gathered, 0.0).sum(axis=0) / mass) ** (1.0 / qprime)
    return centers, radii, values


def tinf_norm(
    region: RegionGrid,
    g: Union[TentFunction, np.ndarray],
    qprime: float,
    admissible_level: float = 5.0,
) -> float:
    """‖g‖_{t^{∞,q'}}: the largest tent average over admissible balls."""
    value, _ = tinf_norm_witness(region, g, qprime, admissible_level)
    return value


def tinf_norm_witness(
    region: RegionGrid,
    g: Union[TentFunction, np.ndarray],
    qprime: float,
    admissible_level: float = 5.0,
) -> Tuple[float, Ball]:
    """‖g‖_{t^{∞,q'}} together with a ball attaining it."""
    centers, radii, values = tinf_ball_values(region, g, qprime, admissible_level)
    if values.size == 0:
        raise NoAdmissibleBallsError(admissible_level)
    best = int(np.argmax(values))
    return float(values[best]), Ball(int(centers[best]), float(radii[best]))


def pairing(
    region: RegionGrid, f: Union[TentFunction, np.ndarray], g: Union[TentFunction, np.ndarray]
) -> Scalar:
    """⟨f, g⟩ = Σ f·conj(g)·γ_i·w_l over the nodes."""
    f_values = f.values if isinstance(f, TentFunction) else f
    g_values = g.values if isinstance(g, TentFunction) else g
    total = np.sum(f_values * np.conj(g_values) * region.node_weight)
    return complex(total) if np.iscomplexobj(total) else float(total)


@dataclass(frozen=True, eq=False)
class CylindricalField:
    """
    Function U(x; y, t) on the cone incidences d(x, y) < α·t of a region.

    Entries are grouped by node (row-major region order); the entries of node n are the members
    x of B(y, α·t) in the center's sorted order, between ``offsets[n]`` and ``offsets[n + 1]``.

    Attributes
    ----------
    region : RegionGrid
    alpha : float
        aperture of the sparsity pattern
    offsets : np.ndarray
        (n_nodes + 1,) entry offsets per node
    x_index : np.ndarray
        point x of each entry
    values : np.ndarray
        U at each entry
    """

    region: RegionGrid
    alpha: float
    offsets: np.ndarray
    x_index: np.ndarray
    values: np.ndarray

    def __post_init__(self) -> None:
        if self.values.shape != self.x_index.shape:
            raise RegionMismatchError(self.x_index.shape, self.values.shape)

    @property
    def counts(self) -> np.ndarray:
        """Get the number of entries of every node."""
        return np.diff(self.offsets)

    @property
    def node_id(self) -> np.ndarray:
        """Get the node of every entry."""
        return np.repeat(np.arange(len(self.offsets) - 1), self.counts)

    def with_values(self, values: np.ndarray) -> "CylindricalField":
        """Same pattern, new values."""
        return CylindricalField(self.region, self.alpha, self.offsets, self.x_index, values)

    def to_dense(self) -> np.ndarray:
        """(N, n_nodes) array, zero off the pattern."""
        shape = (self.region.space.n_points, len(self.offsets) - 1)
        dense = np.zeros(shape, dtype=self.values.dtype)
        dense[self.x_index, self.node_id] = self.values
        return dense


def cone_pattern(region: RegionGrid, alpha: float) -> CylindricalField:
    """The zero field on the aperture-α incidence pattern."""
    points, levels = region.nodes
    counts = region.space.balls.counts_below(points, alpha * region.levels[levels])
    offsets = np.concatenate(([0], np.cumsum(counts)))
    local = np.arange(offsets[-1]) - np.repeat(offsets[:-1], counts)
    x_index = region.space.balls.order[np.repeat(points, counts), local]
    return CylindricalField(region, alpha, offsets, x_index, np.zeros(offsets[-1]))


def j_alpha(
    region: RegionGrid, f: Union[TentFunction, np.ndarray], alpha: float
) -> CylindricalField:
    """J_α f(x; y, t) = 1_{Γ_α(x)}(y, t)·f(y, t)."""
    values = f.values if isinstance(f, TentFunction) else f
    pattern = cone_pattern(region, alpha)
    return pattern.with_values(np.repeat(values[region.mask], pattern.counts))


def _bincount(index: np.ndarray, weights: np.ndarray, length: int) -> np.ndarray:
    if np.iscomplexobj(weights):
        return np.bincount(index, weights.real, length) + 1j * np.bincount(
            index, weights.imag, length
        )
    return np.bincount(index, weights, length)


def n_alpha(region: RegionGrid, field: CylindricalField, alpha: float) -> CylindricalField:
    """
    N_α U(x; y, t) = 1_{B(y, αt)}(x)·(γ-average of U(·; y, t) over B(y, αt)).

    Raises
    ------
    ApertureError
        if the field lives on a wider pattern than α
    """
    if field.alpha > alpha:
        raise ApertureError(alpha, field.alpha)
    gamma = region.space.gamma
    target = cone_pattern(region, alpha)
    n_nodes = len(target.offsets) - 1
    totals = _bincount(field.node_id, field.values * gamma[field.x_index], n_nodes)
    masses = np.bincount(target.node_id, gamma[target.x_index], n_nodes)
    return target.with_values(np.repeat(totals / masses, target.counts))


def mixed_norm(region: RegionGrid, field: CylindricalField, p: float, q: float) -> float:
    """‖U‖ in L^p(γ; L^q(D, dγ(y)dt/(t·γ(B(y, t)))))."""
    measure = region.cone_measure[region.mask]
    energy = np.abs(field.values) ** q * measure[field.node_id]
    inner = np.bincount(field.x_index, energy, region.space.n_points)
    return float(np.sum(inner ** (p / q) * region.space.gamma) ** (1.0 / p))
