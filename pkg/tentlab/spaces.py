"""
Definition of finite weighted metric measure spaces

A space is a finite point cloud with a metric, base weights μ, a potential φ, the weighted
measure γ = e^{-φ}μ and an admissibility function m bounding the radii of admissible balls.
"""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Any, Callable, ClassVar, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import Polynomial
from scipy.spatial.distance import cdist

from tentlab.errors import (
    AdmissibilityError,
    ConfigError,
    EmbeddingError,
    MetricError,
    NoAdmissibleBallsError,
    OriginError,
    WeightError,
)

log = logging.getLogger(__name__)

LOG_FLOAT_MAX = math.log(np.finfo(float).max)
TIE_RTOL = 1e-12

PointSet = Union[np.ndarray, Sequence[int]]


@dataclass(frozen=True)
class PotentialSpec:
    """
    Potential φ of the weighted measure dγ = e^{-φ} dμ.

    Attributes
    ----------
    variant : str
        one of ``distance_function``, ``explicit`` or ``polynomial_1d``
    origins : Tuple[int, ...]
        origin indices Ω of a distance-function potential
    a, a_prime : float
        φ(x) = a + a'·dist(x, Ω)^2 for a distance-function potential
    values : Tuple[float, ...]
        per-point values of an explicit potential
    coefficients : Tuple[float, ...]
        increasing-degree coefficients of a one-dimensional polynomial potential
    """

    VARIANTS: ClassVar[Tuple[str, ...]] = ("distance_function", "explicit", "polynomial_1d")

    variant: str
    origins: Tuple[int, ...] = ()
    a: float = 0.0
    a_prime: float = 0.0
    values: Tuple[float, ...] = ()
    coefficients: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.variant not in self.VARIANTS:
            raise ValueError(f"Unknown potential variant {self.variant}; expected {self.VARIANTS}")
        if self.variant == "distance_function":
            if not self.origins:
                raise OriginError
            if self.a_prime <= 0:
                raise ValueError("Distance-function potentials need a' > 0")
        if self.variant == "polynomial_1d" and not self.coefficients:
            raise ValueError("Polynomial potentials need at least one coefficient")

    @classmethod
    def distance_function(
        cls, origins: Sequence[int], a: float, a_prime: float
    ) -> "PotentialSpec":
        """φ(x) = a + a'·dist(x, Ω)^2."""
        indices = tuple(int(o) for o in origins)
        return cls("distance_function", origins=indices, a=a, a_prime=a_prime)

    @classmethod
    def explicit(cls, values: Sequence[float]) -> "PotentialSpec":
        """Per-point potential values."""
        return cls("explicit", values=tuple(float(v) for v in values))

    @classmethod
    def polynomial_1d(cls, coefficients: Sequence[float]) -> "PotentialSpec":
        """Polynomial in one variable, coefficients given lowest degree first."""
        return cls("polynomial_1d", coefficients=tuple(float(c) for c in coefficients))

    @property
    def polynomial(self) -> Polynomial:
        """Get the polynomial of a ``polynomial_1d`` potential."""
        if self.variant != "polynomial_1d":
            raise AdmissibilityError("gradient_based", f"{self.variant} potential is no polynomial")
        return Polynomial(self.coefficients)

    def evaluate(self, coords: Optional[np.ndarray], distances: np.ndarray) -> np.ndarray:
        """Evaluate φ at every point of a cloud.

        Parameters
        ----------
        coords : Optional[np.ndarray]
            (N, n) coordinates, required by polynomial potentials
        distances : np.ndarray
            (N, N) distance table

        Returns
        -------
        np.ndarray
            φ per point
        """
        n_points = distances.shape[0]
        if self.variant == "distance_function":
            dist = distances[:, list(self.origins)].min(axis=1)
            return self.a + self.a_prime * dist**2
        if self.variant == "explicit":
            if len(self.values) != n_points:
                raise ValueError(f"Explicit potential has {len(self.values)} values for {n_points}")
            return np.asarray(self.values, dtype=float)
        if coords is None or coords.shape[1] != 1:
            raise EmbeddingError("A polynomial_1d potential")
        return self.polynomial(coords[:, 0])


@dataclass(frozen=True)
class AdmissibilitySpec:
    """
    Recipe for the admissibility function m.

    Attributes
    ----------
    kind : str
        one of ``distance_based``, ``gradient_based``, ``constant`` or ``explicit``
    origins : Tuple[int, ...]
        origins for ``distance_based``; defaults to the potential's origins
    condition_b_constant : Optional[float]
        verified constant M of condition (B) for ``gradient_based``
    value : float
        the constant of ``constant``
    values : Tuple[float, ...]
        per-point values of ``explicit``
    """

    KINDS: ClassVar[Tuple[str, ...]] = ("distance_based", "gradient_based", "constant", "explicit")

    kind: str
    origins: Tuple[int, ...] = ()
    condition_b_constant: Optional[float] = None
    value: float = 1.0
    values: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"Unknown admissibility kind {self.kind}; expected {self.KINDS}")
        if self.kind == "constant" and not self.value > 0:
            raise WeightError("m", 0, self.value)

    @classmethod
    def distance_based(cls, origins: Sequence[int] = ()) -> "AdmissibilitySpec":
        """m(x) = min(1, 1/dist(x, Ω))."""
        return cls("distance_based", origins=tuple(int(o) for o in origins))

    @classmethod
    def gradient_based(cls, condition_b_constant: Optional[float] = None) -> "AdmissibilitySpec":
        """m(x) = min(1, 1/|∇φ(x)|)."""
        return cls("gradient_based", condition_b_constant=condition_b_constant)

    @classmethod
    def constant(cls, value: float) -> "AdmissibilitySpec":
        """m ≡ value."""
        return cls("constant", value=float(value))

    @classmethod
    def explicit(cls, values: Sequence[float]) -> "AdmissibilitySpec":
        """Per-point admissibility values."""
        return cls("explicit", values=tuple(float(v) for v in values))


@dataclass(frozen=True)
class Ball:
    """Open ball {x : d(center, x) < radius} around a point of the cloud."""

    center: int
    radius: float

    def __post_init__(self) -> None:
        if not self.radius > 0:
            raise ValueError(f"Ball radius must be positive, got {self.radius}")

    def scaled(self, lam: float) -> "Ball":
        """Return the concentric ball λB."""
        return Ball(self.center, lam * self.radius)

    def is_admissible(self, space: "DiscreteSpace", alpha: float) -> bool:
        """Check r_B ≤ α·m(c_B)."""
        return bool(self.radius <= alpha * space.m[self.center])

    def admissibility_level(self, space: "DiscreteSpace") -> float:
        """Smallest α for which the ball is α-admissible."""
        return float(self.radius / space.m[self.center])

    def as_dict(self) -> Dict[str, float]:
        """Plain representation for reports."""
        return {"center": int(self.center), "radius": float(self.radius)}


@dataclass(frozen=True)
class BallTable:
    """
    Per-center sorted view of the distance table.

    Row c lists the points by increasing distance from c. A prefix ending at a tie-group end is
    exactly the member set of an open ball around c, so every ball enumeration walks these rows.

    Attributes
    ----------
    order : np.ndarray
        (N, N) point indices sorted by distance from each center
    sorted_distances : np.ndarray
        (N, N) the sorted distances
    rank : np.ndarray
        (N, N) position of point j in the row of center c
    next_distance : np.ndarray
        (N, N) distance of the point following each position (inf after the last)
    group_end : np.ndarray
        (N, N) True where a position ends a group of equal distances
    cum_gamma, cum_mu : np.ndarray
        (N, N) prefix masses along each row
    """

    order: np.ndarray
    sorted_distances: np.ndarray
    rank: np.ndarray
    next_distance: np.ndarray
    group_end: np.ndarray
    cum_gamma: np.ndarray
    cum_mu: np.ndarray

    @classmethod
    def build(cls, distances: np.ndarray, gamma: np.ndarray, mu: np.ndarray) -> "BallTable":
        """Sort every row of the distance table once."""
        n_points = distances.shape[0]
        order = np.argsort(distances, axis=1, kind="stable")
        sorted_distances = np.take_along_axis(distances, order, axis=1)
        rank = np.empty_like(order)
        positions = np.broadcast_to(np.arange(n_points), (n_points, n_points))
        np.put_along_axis(rank, order, positions, axis=1)
        next_distance = np.full_like(sorted_distances, np.inf)
        next_distance[:, :-1] = sorted_distances[:, 1:]
        return cls(
            order=order,
            sorted_distances=sorted_distances,
            rank=rank,
            next_distance=next_distance,
            group_end=next_distance > sorted_distances,
            cum_gamma=np.cumsum(gamma[order], axis=1),
            cum_mu=np.cumsum(mu[order], axis=1),
        )

    def counts_below(self, centers: np.ndarray, radii: np.ndarray) -> np.ndarray:
        """Number of points strictly closer than ``radii`` to ``centers`` (entrywise)."""
        centers = np.asarray(centers, dtype=np.int64)
        radii = np.asarray(radii, dtype=float)
        counts = np.zeros(len(centers), dtype=np.int64)
        if len(centers) == 0:
            return counts
        order = np.argsort(centers, kind="stable")
        grouped = centers[order]
        starts = np.flatnonzero(np.r_[True, grouped[1:] != grouped[:-1]])
        stops = np.r_[starts[1:], len(grouped)]
        for start, stop in zip(starts, stops):
            chunk = order[start:stop]
            row = self.sorted_distances[grouped[start]]
            counts[chunk] = np.searchsorted(row, radii[chunk], side="left")
        return counts

    def masses_below(
        self, centers: np.ndarray, radii: np.ndarray, weights: str = "gamma"
    ) -> np.ndarray:
        """γ (or μ) mass of the open balls B(centers, radii)."""
        cumulative = self.cum_gamma if weights == "gamma" else self.cum_mu
        counts = self.counts_below(centers, radii)
        masses = np.zeros(len(counts))
        inside = counts > 0
        masses[inside] = cumulative[np.asarray(centers)[inside], counts[inside] - 1]
        return masses


@dataclass(frozen=True, eq=False)
class DiscreteSpace:
    """
    Finite weighted metric measure space.

    Attributes
    ----------
    distances : np.ndarray
        (N, N) metric table
    mu : np.ndarray
        base weights
    phi : np.ndarray
        potential values
    gamma : np.ndarray
        weighted measure γ_i = μ_i·e^{-φ_i}
    m : np.ndarray
        admissibility values
    coords : Optional[np.ndarray]
        (N, n) coordinates when the cloud is embedded in ℝⁿ
    potential : Optional[PotentialSpec]
        recipe of φ
    admissibility : Optional[AdmissibilitySpec]
        recipe of m
    name : str
        label used in reports
    """

    distances: np.ndarray
    mu: np.ndarray
    phi: np.ndarray
    gamma: np.ndarray
    m: np.ndarray
    coords: Optional[np.ndarray] = None
    potential: Optional[PotentialSpec] = None
    admissibility: Optional[AdmissibilitySpec] = None
    name: str = "space"

    @property
    def n_points(self) -> int:
        """Get the number of points."""
        return int(self.distances.shape[0])

    @property
    def euclidean_dim(self) -> Optional[int]:
        """Get the embedding dimension, if any."""
        return None if self.coords is None else int(self.coords.shape[1])

    @cached_property
    def balls(self) -> BallTable:
        """Get the sorted ball table (built on first use)."""
        return BallTable.build(self.distances, self.gamma, self.mu)

    @cached_property
    def mu_doubling(self) -> float:
        """Get the measured doubling constant D_μ of the base measure over all balls."""
        return doubling_constant(self, math.inf, 2.0, weights="mu")

    def __str__(self) -> str:
        """Return a string representation of a space."""
        dim = self.euclidean_dim
        where = f"embedded in R^{dim}" if dim else "with an explicit metric"
        return (
            f"Space {self.name} has {self.n_points} points {where}, "
            + f"gamma mass {self.gamma.sum():.6g}, m in [{self.m.min():.4g}, {self.m.max():.4g}]"
        )

    def summary(self) -> Dict[str, Any]:
        """Plain summary for reports."""
        return {
            "name": self.name,
            "n_points": self.n_points,
            "euclidean_dim": self.euclidean_dim,
            "gamma_mass": float(self.gamma.sum()),
            "m_min": float(self.m.min()),
            "m_max": float(self.m.max()),
            "potential": None if self.potential is None else self.potential.variant,
            "admissibility": None if self.admissibility is None else self.admissibility.kind,
        }


def build_space(
    points: Optional[Union[np.ndarray, Sequence]],
    mu: Union[np.ndarray, Sequence[float], str],
    potential: PotentialSpec,
    admissibility: AdmissibilitySpec,
    distances: Optional[np.ndarray] = None,
    name: str = "space",
) -> DiscreteSpace:
    """
    Build a finite weighted metric measure space.

    Parameters
    ----------
    points : Optional[array-like]
        (N,) or (N, n) coordinates; may be None when ``distances`` is given
    mu : array-like or str
        base weights, or ``"uniform"`` for equal weights (the lattice cell volume
        ``h^n`` with h the smallest positive distance when embedded, 1 otherwise)
    potential : PotentialSpec
        recipe of φ
    admissibility : AdmissibilitySpec
        recipe of m
    distances : Optional[np.ndarray]
        explicit symmetric distance table, used instead of Euclidean distances
    name : str
        label used in reports

    Returns
    -------
    DiscreteSpace
        frozen space with read-only arrays

    Raises
    ------
    WeightError
        if a μ, γ or m value is not strictly positive (the index is reported)
    OriginError
        if distance-based admissibility has no origins
    """
    coords = None
    if points is not None:
        coords = np.asarray(points, dtype=float)
        if coords.ndim == 1:
            coords = coords[:, None]
    if distances is None:
        if coords is None:
            raise ValueError("Either points or an explicit distance table is required")
        table = cdist(coords, coords)
    else:
        table = np.asarray(distances, dtype=float)
        _validate_table(table)
    n_points = table.shape[0]

    if isinstance(mu, str):
        if mu != "uniform":
            raise ValueError(f"Unknown base measure {mu}")
        positive = table[table > 0]
        cell = positive.min() ** coords.shape[1] if coords is not None and positive.size else 1.0
        weights = np.full(n_points, cell)
    else:
        weights = np.asarray(mu, dtype=float)
    if weights.shape != (n_points,):
        raise ValueError(f"Expected {n_points} base weights, got {weights.shape}")
    _require_positive("mu", weights)

    phi = potential.evaluate(coords, table)
    gamma = weights * np.exp(-phi)
    _require_positive("gamma", gamma)
    m = _admissibility_values(admissibility, potential, coords, table, phi)
    _require_positive("m", m)

    for array in (table, weights, phi, gamma, m):
        array.setflags(write=False)
    if coords is not None:
        coords.setflags(write=False)

    space = DiscreteSpace(table, weights, phi, gamma, m, coords, potential, admissibility, name)
    log.info("Built %s", space)
    return space


def _validate_table(table: np.ndarray) -> None:
    if table.ndim != 2 or table.shape[0] != table.shape[1]:
        raise MetricError("table is not square", table.shape)
    if np.any(np.diag(table) != 0):
        index = int(np.flatnonzero(np.diag(table))[0])
        raise MetricError("nonzero diagonal", (index, index))
    if not np.allclose(table, table.T, rtol=0, atol=1e-12 * max(table.max(), 1.0)):
        i, j = np.unravel_index(np.argmax(np.abs(table - table.T)), table.shape)
        raise MetricError("asymmetric", (int(i), int(j)))
    off_diagonal = table + np.eye(table.shape[0])
    if np.any(off_diagonal <= 0):
        i, j = np.argwhere(off_diagonal <= 0)[0]
        raise MetricError("distinct points at distance zero", (int(i), int(j)))


def _require_positive(kind: str, values: np.ndarray) -> None:
    bad = np.flatnonzero(~(values > 0))
    if bad.size:
        raise WeightError(kind, int(bad[0]), float(values[bad[0]]))


def _admissibility_values(
    recipe: AdmissibilitySpec,
    potential: PotentialSpec,
    coords: Optional[np.ndarray],
    table: np.ndarray,
    phi: np.ndarray,
) -> np.ndarray:
    n_points = table.shape[0]
    if recipe.kind == "constant":
        return np.full(n_points, recipe.value)
    if recipe.kind == "explicit":
        if len(recipe.values) != n_points:
            raise ValueError(
                f"Explicit admissibility has {len(recipe.values)} values for {n_points}"
            )
        return np.asarray(recipe.values, dtype=float)
    if recipe.kind == "distance_based":
        origins = recipe.origins or potential.origins
        if not origins:
            raise OriginError
        return _reciprocal_capped(table[:, list(origins)].min(axis=1))

    if potential.variant == "polynomial_1d":
        if coords is None or coords.shape[1] != 1:
            raise EmbeddingError("A polynomial_1d gradient")
        slope = np.abs(potential.polynomial.deriv()(coords[:, 0]))
    elif potential.variant == "explicit":
        if coords is None:
            raise EmbeddingError("Finite-difference gradients")
        slope = _lattice_gradient(coords, phi)
    else:
        raise AdmissibilityError(
            "gradient_based", "the potential must be polynomial_1d or explicit on a grid"
        )
    return _reciprocal_capped(slope)


def _reciprocal_capped(values: np.ndarray) -> np.ndarray:
    """min(1, 1/v) with value 1 where v = 0."""
    out = np.ones_like(values, dtype=float)
    large = values > 1
    out[large] = 1.0 / values[large]
    return out


def _lattice_gradient(coords: np.ndarray, values: np.ndarray) -> np.ndarray:
    """|∇φ| by central differences (one-sided at the edges) on a full product grid."""
    axes = [np.unique(coords[:, k]) for k in range(coords.shape[1])]
    shape = tuple(len(axis) for axis in axes)
    if math.prod(shape) != len(values) or min(shape) < 2:
        raise EmbeddingError("Finite-difference gradients (on a full product grid)")
    index = tuple(np.searchsorted(axis, coords[:, k]) for k, axis in enumerate(axes))
    grid = np.full(shape, np.nan)
    grid[index] = values
    if np.isnan(grid).any():
        raise EmbeddingError("Finite-difference gradients (on a full product grid)")
    partials = np.gradient(grid, *axes)
    if len(axes) == 1:
        partials = [partials]
    return np.sqrt(sum(partial[index] ** 2 for partial in partials))


def ball_mask(space: DiscreteSpace, ball: Ball) -> np.ndarray:
    """Boolean membership of the open ball."""
    return space.distances[ball.center] < ball.radius


def ball_members(space: DiscreteSpace, ball: Ball) -> np.ndarray:
    """Indices with d(center, ·) < radius; always contains the center."""
    return np.flatnonzero(ball_mask(space, ball))


def point_mask(space: DiscreteSpace, points: PointSet) -> np.ndarray:
    """Boolean mask of a point set given as indices or as a mask."""
    selection = np.asarray(points)
    if selection.dtype == bool:
        if selection.shape != (space.n_points,):
            raise ValueError(f"Point mask of shape {selection.shape} for {space.n_points} points")
        return selection.copy()
    mask = np.zeros(space.n_points, dtype=bool)
    mask[selection.astype(np.int64)] = True
    return mask


def gamma_mass(space: DiscreteSpace, points: PointSet) -> float:
    """γ-mass of a point set given as indices or as a boolean mask."""
    return float(np.sum(space.gamma[point_mask(space, points)]))


def distinct_balls(
    space: DiscreteSpace, alpha: float
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Enumerate every distinct α-admissible open ball.

    A ball around c with member set {d(c, ·) ≤ d_k} exists iff d_k < α·m(c). It is
    represented by the largest admissible radius min(d_{k+1}, α·m(c)) giving the same set.

    Parameters
    ----------
    space : DiscreteSpace
    alpha : float
        admissibility level (``math.inf`` enumerates balls of every radius)

    Returns
    -------
    Tuple[np.ndarray, np.ndarray, np.ndarray]
        centers, prefix positions (last member position in the center's row) and radii
    """
    table = space.balls
    cap = alpha * space.m
    valid = table.group_end & (table.sorted_distances < cap[:, None])
    centers, positions = np.nonzero(valid)
    radii = np.minimum(table.next_distance[centers, positions], cap[centers])
    return centers, positions, radii


def doubling_ratios(
    space: DiscreteSpace,
    alpha: float,
    lam: float,
    weights: str = "gamma",
    centers: Optional[Sequence[int]] = None,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Ratios mass(λB)/mass(B) over the distinct α-admissible balls.

    Returns
    -------
    Tuple[np.ndarray, np.ndarray, np.ndarray]
        centers, radii and ratios of every enumerated ball
    """
    table = space.balls
    ball_centers, positions, radii = distinct_balls(space, alpha)
    if centers is not None:
        keep = np.isin(ball_centers, np.asarray(centers))
        ball_centers, positions, radii = ball_centers[keep], positions[keep], radii[keep]
    cumulative = table.cum_gamma if weights == "gamma" else table.cum_mu
    inner = cumulative[ball_centers, positions]
    # points at exactly λ·r lie outside the open ball; distances carry rounding noise
    outer = table.masses_below(ball_centers, lam * radii * (1 - TIE_RTOL), weights=weights)
    return ball_centers, radii, outer / inner


def doubling_constant(
    space: DiscreteSpace, alpha: float, lam: float, weights: str = "gamma"
) -> float:
    """Measured C̃_{α,λ}: the largest ratio mass(λB)/mass(B) over α-admissible balls."""
    _, _, ratios = doubling_ratios(space, alpha, lam, weights=weights)
    if ratios.size == 0:
        raise NoAdmissibleBallsError(alpha)
    return float(ratios.max())


@dataclass(frozen=True)
class DoublingReport:
    """Outcome of a condition (A) certification."""

    alpha: float
    lam: float
    empirical_constant: float
    worst_ball: Ball
    n_balls: int
    mu_doubling: float
    theoretical_bound: Optional[float]
    passed: Optional[bool]


def log_doubling_bound(space: DiscreteSpace, alpha: float, lam: float) -> Optional[float]:
    """Logarithm of the closed-form C_α of the distance-function and C² potential examples.

    Only defined for λ = 2; ``None`` when the space carries no closed-form bound.
    """
    if lam != 2 or space.potential is None or space.admissibility is None:
        return None
    log_mu = math.log(space.mu_doubling)
    if space.potential.variant == "distance_function" and (
        space.admissibility.kind == "distance_based"
    ):
        return log_mu + space.potential.a_prime * alpha * (5 * alpha + 6)
    m_constant = space.admissibility.condition_b_constant
    if space.admissibility.kind == "gradient_based" and m_constant is not None:
        exponent = m_constant * alpha
        if exponent > LOG_FLOAT_MAX:
            return math.inf
        return log_mu + 3 * alpha * math.exp(exponent)
    return None


def theoretical_doubling_bound(space: DiscreteSpace, alpha: float, lam: float) -> Optional[float]:
    """Closed-form C_α (λ = 2 only); ``math.inf`` when it exceeds the float range."""
    log_bound = log_doubling_bound(space, alpha, lam)
    if log_bound is None:
        return None
    if log_bound >= LOG_FLOAT_MAX:
        return math.inf
    return math.exp(log_bound)


def verify_condition_A(  # noqa: N802
    space: DiscreteSpace,
    alpha: float,
    lam: float = 2.0,
    centers: Optional[Sequence[int]] = None,
) -> DoublingReport:
    """
    Certify γ(λB) ≤ C·γ(B) over α-admissible balls.

    Parameters
    ----------
    space : DiscreteSpace
    alpha : float
        admissibility level, > 0
    lam : float
        dilation, ≥ 1
    centers : Optional[Sequence[int]]
        restrict the enumeration to these centers (all radii are always enumerated)

    Returns
    -------
    DoublingReport
        measured constant, worst ball, and the comparison against the closed-form bound

    Raises
    ------
    NoAdmissibleBallsError
        if nothing was enumerated
    """
    if not alpha > 0 or lam < 1:
        raise ValueError(f"Need alpha > 0 and lambda >= 1, got {alpha}, {lam}")
    ball_centers, radii, ratios = doubling_ratios(space, alpha, lam, centers=centers)
    if ratios.size == 0:
        raise NoAdmissibleBallsError(alpha)
    worst = int(np.argmax(ratios))
    empirical = float(ratios[worst])
    log_bound = log_doubling_bound(space, alpha, lam)
    bound = theoretical_doubling_bound(space, alpha, lam)
    passed = None
    if log_bound is not None:
        passed = bool(math.log(empirical) <= log_bound + math.log1p(1e-12))
    log.info("Condition (A) at alpha=%s lambda=%s: C=%.6g bound=%s", alpha, lam, empirical, bound)
    return DoublingReport(
        alpha=alpha,
        lam=lam,
        empirical_constant=empirical,
        worst_ball=Ball(int(ball_centers[worst]), float(radii[worst])),
        n_balls=int(ratios.size),
        mu_doubling=space.mu_doubling,
        theoretical_bound=bound,
        passed=passed,
    )


@dataclass(frozen=True)
class ConditionBReport:
    """Outcome of a condition (B) verification for a one-dimensional polynomial."""

    minimal_M: float  # noqa: N815
    argmax: Optional[float]
    violations: List[float]


def verify_condition_B(  # noqa: N802
    potential: PotentialSpec, interval: Tuple[float, float], samples: int = 20001
) -> ConditionBReport:
    """
    Smallest M with |φ''| ≤ M|φ'| wherever |φ'| > 1 on ``interval``.

    The dense samples are complemented by the limits at the points where |φ'| = 1 is crossed,
    so the supremum over the open set {|φ'| > 1} is attained exactly.
    """
    poly = potential.polynomial
    first, second = poly.deriv(), poly.deriv(2)
    lower, upper = interval
    xs = np.linspace(lower, upper, samples)
    slope = np.abs(first(xs))
    steep = slope > 1
    ratio = np.abs(second(xs[steep])) / slope[steep]
    violations = [float(x) for x in xs[steep][~np.isfinite(ratio)]]

    candidates = list(zip(ratio[np.isfinite(ratio)], xs[steep][np.isfinite(ratio)]))
    eps = 1e-9 * max(upper - lower, 1.0)
    for shifted in (first - 1, first + 1):
        for root in np.atleast_1d(shifted.roots()):
            if abs(root.imag) > 1e-9 or not lower <= root.real <= upper:
                continue
            x = float(root.real)
            if max(abs(first(x - eps)), abs(first(x + eps))) > 1:
                candidates.append((abs(second(x)), x))
    if not candidates:
        return ConditionBReport(0.0, None, violations)
    value, where = max(candidates, key=lambda item: item[0])
    return ConditionBReport(float(value), float(where), violations)


@dataclass(frozen=True)
class ConditionCReport:
    """Outcome of a condition (C) measurement."""

    alpha: float
    empirical_c_alpha: float
    worst_pair: Tuple[int, int]
    exhaustive: bool


def verify_condition_C(  # noqa: N802
    space: DiscreteSpace,
    alpha: float,
    max_exhaustive: int = 2000,
    n_samples: int = 2000,
    seed: int = 0,
) -> ConditionCReport:
    """Largest m(x)/m(y) over pairs with d(x, y) ≤ α·m(x)."""
    rows = np.arange(space.n_points)
    exhaustive = space.n_points <= max_exhaustive
    if not exhaustive:
        rows = np.sort(np.random.default_rng(seed).choice(rows, n_samples, replace=False))
    near = space.distances[rows] <= alpha * space.m[rows, None]
    ratio = np.where(near, space.m[rows, None] / space.m[None, :], -np.inf)
    flat = int(np.argmax(ratio))
    i, j = np.unravel_index(flat, ratio.shape)
    return ConditionCReport(alpha, float(ratio[i, j]), (int(rows[i]), int(j)), exhaustive)


@dataclass(frozen=True)
class MetricReport:
    """Outcome of the metric-axiom check."""

    passed: bool
    worst_violation: float
    witness: Tuple[int, ...]
    exhaustive: bool


def check_metric(
    space: DiscreteSpace,
    exhaustive_limit: int = 500,
    n_samples: int = 20000,
    seed: int = 0,
    rtol: float = 1e-12,
) -> MetricReport:
    """Symmetry, zero diagonal and the triangle inequality (exhaustive for small N)."""
    table = space.distances
    scale = max(float(table.max()), 1.0)
    asymmetry = np.abs(table - table.T)
    if asymmetry.max() > rtol * scale or np.any(np.diag(table) != 0):
        i, j = np.unravel_index(np.argmax(asymmetry), table.shape)
        return MetricReport(False, float(asymmetry.max()), (int(i), int(j)), True)

    worst, witness = -math.inf, (0, 0, 0)
    exhaustive = space.n_points <= exhaustive_limit
    if exhaustive:
        for k in range(space.n_points):
            excess = table - (table[:, k, None] + table[None, k, :])
            i, j = np.unravel_index(np.argmax(excess), excess.shape)
            if excess[i, j] > worst:
                worst, witness = float(excess[i, j]), (int(i), int(j), k)
    else:
        rng = np.random.default_rng(seed)
        i, j, k = rng.integers(0, space.n_points, size=(3, n_samples))
        excess = table[i, j] - table[i, k] - table[k, j]
        best = int(np.argmax(excess))
        worst, witness = float(excess[best]), (int(i[best]), int(j[best]), int(k[best]))
    return MetricReport(worst <= rtol * scale, worst, witness, exhaustive)


def geometric_doubling_witness(
    space: DiscreteSpace, n_samples: int = 100, seed: int = 0
) -> Tuple[int, Optional[Ball]]:
    """
    Largest greedy packing of pairwise-disjoint half-radius balls centered in a sampled ball.

    Returns
    -------
    Tuple[int, Optional[Ball]]
        packing count and the ball attaining it
    """
    rng = np.random.default_rng(seed)
    table = space.balls
    best, best_ball = 0, None
    for center in rng.integers(0, space.n_points, size=n_samples):
        distances = np.unique(table.sorted_distances[center])
        radius = float(rng.choice(distances[1:])) if distances.size > 1 else 1.0
        ball = Ball(int(center), radius)
        taken = np.zeros(space.n_points, dtype=bool)
        count = 0
        members = ball_members(space, ball)
        for point in members[np.argsort(space.distances[center][members], kind="stable")]:
            half = space.distances[point] < radius / 2
            if not np.any(half & taken):
                taken |= half
                count += 1
        if count > best:
            best, best_ball = count, ball
    return best, best_ball


def gaussian_line(n_points: int = 801, half_width: float = 4.0) -> DiscreteSpace:
    """Uniform grid on [-w, w] with the standard Gaussian measure and m = min(1, 1/|x|)."""
    xs = np.linspace(-half_width, half_width, n_points)
    origin = int(np.argmin(np.abs(xs)))
    potential = PotentialSpec.distance_function((origin,), 0.5 * math.log(2 * math.pi), 0.5)
    return build_space(
        xs,
        np.full(n_points, xs[1] - xs[0]),
        potential,
        AdmissibilitySpec.distance_based(),
        name="gaussian_line",
    )


def gaussian_plane(n_side: int = 21, half_width: float = 3.0) -> DiscreteSpace:
    """Square grid on [-w, w]^2 with the standard Gaussian measure and m = min(1, 1/|x|)."""
    axis = np.linspace(-half_width, half_width, n_side)
    grid_x, grid_y = np.meshgrid(axis, axis, indexing="ij")
    coords = np.column_stack([grid_x.ravel(), grid_y.ravel()])
    origin = int(np.argmin(np.linalg.norm(coords, axis=1)))
    potential = PotentialSpec.distance_function((origin,), math.log(2 * math.pi), 0.5)
    step = axis[1] - axis[0]
    return build_space(
        coords,
        np.full(len(coords), step**2),
        potential,
        AdmissibilitySpec.distance_based(),
        name="gaussian_plane",
    )


def uniform_local(n_points: int = 400, length: float = 20.0, m_value: float = 1.0) -> DiscreteSpace:
    """Uniform grid on [0, length) with φ = 0 and constant admissibility."""
    step = length / n_points
    xs = np.arange(n_points) * step
    return build_space(
        xs,
        np.full(n_points, step),
        PotentialSpec.explicit(np.zeros(n_points)),
        AdmissibilitySpec.constant(m_value),
        name="uniform_local",
    )


def polynomial_line(
    coefficients: Sequence[float] = (0.0, 0.0, 0.0, 0.0, 1.0),
    interval: Tuple[float, float] = (-2.0, 2.0),
    n_points: int = 401,
    condition_b_constant: Optional[float] = None,
) -> DiscreteSpace:
    """Uniform grid with a polynomial potential and gradient-based admissibility.

    When ``condition_b_constant`` is None it is measured with :func:`verify_condition_B`.
    """
    potential = PotentialSpec.polynomial_1d(coefficients)
    if condition_b_constant is None:
        condition_b_constant = verify_condition_B(potential, interval).minimal_M
    xs = np.linspace(interval[0], interval[1], n_points)
    return build_space(
        xs,
        np.full(n_points, xs[1] - xs[0]),
        potential,
        AdmissibilitySpec.gradient_based(condition_b_constant),
        name="polynomial_line",
    )


PRESETS: Dict[str, Callable[..., DiscreteSpace]] = {
    "gaussian_line": gaussian_line,
    "gaussian_plane": gaussian_plane,
    "uniform_local": uniform_local,
    "polynomial_line": polynomial_line,
}


def preset(name: str, **params: Any) -> DiscreteSpace:
    """Build a named preset space."""
    try:
        factory = PRESETS[name]
    except KeyError as err:
        expected = sorted(PRESETS)
        raise ConfigError("space.preset", f"unknown preset {name}; expected {expected}") from err
    try:
        return factory(**params)
    except TypeError as err:
        raise ConfigError("space.params", str(err)) from err


def space_from_dict(data: Dict[str, Any]) -> DiscreteSpace:
    """
    Build a space from its JSON definition.

    Either ``{"preset": name, "params": {...}}`` or
    ``{"points": [[...]], "mu": [...] | "uniform", "potential": {...}, "admissibility": {...}}``
    with an optional ``"distances"`` table and ``"name"``.
    """
    if "preset" in data:
        return preset(data["preset"], **data.get("params", {}))
    for key in ("mu", "potential", "admissibility"):
        if key not in data:
            raise ConfigError(f"space.{key}", "missing")
    if "points" not in data and "distances" not in data:
        raise ConfigError("space.points", "either points or distances is required")
    try:
        potential = PotentialSpec(**data["potential"])
    except (TypeError, ValueError) as err:
        raise ConfigError("space.potential", str(err)) from err
    try:
        admissibility = AdmissibilitySpec(**data["admissibility"])
    except (TypeError, ValueError) as err:
        raise ConfigError("space.admissibility", str(err)) from err
    return build_space(
        data.get("points"),
        data["mu"],
        potential,
        admissibility,
        distances=data.get("distances"),
        name=data.get("name", "space"),
    )


def load_space(path: Union[str, Path]) -> DiscreteSpace:
    """Read a space definition file."""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as err:
        raise ConfigError("space.file", f"cannot read {path}: {err}") from err
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise ConfigError("space.file", err.msg, line=err.lineno) from err
    if not isinstance(data, dict):
        raise ConfigError("space.file", "top level must be an object")
    return space_from_dict(data)
