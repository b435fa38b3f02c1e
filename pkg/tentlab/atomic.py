"""
Constructive atomic decomposition of t^{1,q} tent functions

The decomposition follows the level sets E_k = {A_q^3 f > 2^k}: every layer
A_k = T(E_k) ∖ T(E_{k+1}) is split along a greedy Vitali cover of E_k and each piece is
normalized into an atom supported in the tent of a 5-admissible ball.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from tentlab.functionals import TentFunction, a_q_alpha, tpq_norm
from tentlab.region import RegionGrid, cone, tent
from tentlab.spaces import (
    Ball,
    DiscreteSpace,
    PointSet,
    ball_members,
    doubling_constant,
    point_mask,
)

log = logging.getLogger(__name__)

RTOL = 1e-12


def vitali_tent_cover(space: DiscreteSpace, open_set: PointSet) -> List[Ball]:
    """
    Greedy cover of a point set by disjoint 1-admissible balls whose 5-fold dilates cover its tent.

    Each step picks the center c ∈ E maximizing
    r*(c) = min(m(c), dist(c, X∖E), min_i dist(c, B^i)) over the balls chosen so far (lowest
    index on ties) and adds B(c, r*(c)); it stops once the chosen balls cover E. Every node
    (y, t) of T(E) then satisfies B(y, t) ⊆ 3B^j for the first ball B^j meeting B(y, t).

    Parameters
    ----------
    space : DiscreteSpace
    open_set : PointSet
        the set E

    Returns
    -------
    List[Ball]
        the chosen balls, in order of nonincreasing radius
    """
    inside = point_mask(space, open_set)
    if not inside.any():
        return []
    distances = space.distances
    limit = space.m.copy()
    if not inside.all():
        limit = np.minimum(limit, distances[:, ~inside].min(axis=1))
    limit[~inside] = -np.inf
    gap = np.full(space.n_points, np.inf)
    covered = np.zeros(space.n_points, dtype=bool)

    balls: List[Ball] = []
    while not covered[inside].all():
        reach = np.minimum(limit, gap)
        center = int(np.argmax(reach))
        radius = float(reach[center])
        if radius <= 0:
            raise AssertionError(f"Greedy cover stalled with uncovered points around {center}")
        members = distances[center] < radius
        balls.append(Ball(center, radius))
        covered |= members
        gap = np.minimum(gap, distances[:, members].min(axis=1))
    log.debug("Greedy cover of %d points uses %d balls", int(inside.sum()), len(balls))
    return balls


@dataclass(frozen=True)
class CoverCertificate:
    """Outcome of the covering-lemma certification."""

    disjoint: bool
    admissible: bool
    contained: bool
    covered: bool
    uncovered_nodes: int
    n_balls: int

    @property
    def passed(self) -> bool:
        """Check whether every property holds."""
        return self.disjoint and self.admissible and self.contained and self.covered


def certify_tent_cover(
    region: RegionGrid, open_set: PointSet, balls: List[Ball], dilation: float = 5.0
) -> CoverCertificate:
    """Node-exact check of disjointness, admissibility, B^j ⊆ E and T(E) ⊆ ∪ T(5B^j)."""
    space = region.space
    inside = point_mask(space, open_set)
    multiplicity = np.zeros(space.n_points, dtype=np.int64)
    union = np.zeros(region.shape, dtype=bool)
    contained = True
    for ball in balls:
        members = space.distances[ball.center] < ball.radius
        multiplicity += members
        contained &= bool(np.all(inside[members]))
        union |= tent(region, ball_members(space, ball.scaled(dilation)))
    missing = tent(region, inside) & ~union
    return CoverCertificate(
        disjoint=bool(multiplicity.max(initial=0) <= 1),
        admissible=all(ball.is_admissible(space, 1.0) for ball in balls),
        contained=contained,
        covered=not missing.any(),
        uncovered_nodes=int(missing.sum()),
        n_balls=len(balls),
    )


def dyadic_exponent(value: float) -> int:
    """The integer k with 2^k < value ≤ 2^{k+1}, computed exactly."""
    if not value > 0:
        raise ValueError(f"Expected a positive value, got {value}")
    mantissa, exponent = math.frexp(value)
    return exponent - 2 if mantissa == 0.5 else exponent - 1


@dataclass(frozen=True)
class LevelSets:
    """
    Superlevel sets E_k = {A_q^3 f > 2^k} for k_min ≤ k ≤ k_max.

    Attributes
    ----------
    area : np.ndarray
        A_q^3 f per point
    k_min, k_max : int
        the level range; E_{k_max + 1} is empty
    sets : Dict[int, np.ndarray]
        point mask of every E_k
    """

    area: np.ndarray
    k_min: int
    k_max: int
    sets: Dict[int, np.ndarray] = field(default_factory=dict)

    @property
    def levels(self) -> range:
        """Get the level indices."""
        return range(self.k_min, self.k_max + 1)


def level_sets(region: RegionGrid, f: TentFunction, q: float) -> Optional[LevelSets]:
    """
    Dyadic superlevel sets of the aperture-3 conical functional.

    k_max satisfies 2^{k_max} < max A_q^3 f ≤ 2^{k_max + 1}; k_min is chosen with 2^{k_min}
    below the smallest single-node contribution, so every support node (y, t) has B(y, t) ⊆
    E_{k_min}. Returns None for f ≡ 0.
    """
    if f.is_zero:
        return None
    area = a_q_alpha(region, f, q, 3.0)
    contributions = (np.abs(f.values) ** q * region.cone_measure)[f.support] ** (1.0 / q)
    k_max = dyadic_exponent(float(area.max()))
    k_min = min(dyadic_exponent(float(contributions.min())), k_max)
    sets = {k: area > 2.0**k for k in range(k_min, k_max + 2)}
    return LevelSets(area, k_min, k_max, sets)


@dataclass(frozen=True)
class Pointwise2Report:
    """Outcome of the pointwise estimate A_q(f·1_{D∖T(E)}) ≤ λ with E = {A_q^3 f > λ}."""

    lam: float
    passed: bool
    worst_x: int
    worst_value: float


def pointwise2_check(
    region: RegionGrid, f: TentFunction, q: float, lam: float
) -> Pointwise2Report:
    """Evaluate max_x A_q(f·1_{D∖T(E)})(x) against λ."""
    if not lam > 0:
        raise ValueError(f"Threshold must be positive, got {lam}")
    level = a_q_alpha(region, f, q, 3.0) > lam
    outside = f.restrict(~tent(region, level))
    area = a_q_alpha(region, outside, q, 1.0)
    worst = int(np.argmax(area))
    value = float(area[worst])
    return Pointwise2Report(lam, value <= lam * (1 + RTOL), worst, value)


def pointwise2_inclusion(region: RegionGrid, open_set: PointSet, x: int) -> bool:
    """Check Γ(x) ∖ T(E) ⊆ Γ_3(x_0) with x_0 the point of X∖E nearest to x."""
    space = region.space
    inside = point_mask(space, open_set)
    if inside.all():
        return True
    outside = np.flatnonzero(~inside)
    nearest = int(outside[np.argmin(space.distances[x, outside])])
    escaped = cone(region, x, 1.0) & ~tent(region, inside)
    return not np.any(escaped & ~cone(region, nearest, 3.0))


@dataclass(frozen=True, eq=False)
class Atom:
    """Tent function supported in T(B) with Σ_{T(B)} |a|^q γw ≤ γ(B)^{1-q}."""

    values: TentFunction
    ball: Ball
    q: float


@dataclass(frozen=True, eq=False)
class Term:
    """One summand λ·a of a decomposition, with its level k and cover index j."""

    k: int
    j: int
    lam: float
    atom: Atom


@dataclass(frozen=True, eq=False)
class Decomposition:
    """
    Terms of an atomic decomposition f = Σ λ·a.

    Attributes
    ----------
    region : RegionGrid
    q : float
    terms : List[Term]
    k_range : Optional[Tuple[int, int]]
        (k_min, k_max), None for the zero function
    unassigned_nodes : int
        nodes of some T(E_k) outside every T(5B_k^j); zero whenever the cover lemma holds
    """

    region: RegionGrid
    q: float
    terms: List[Term]
    k_range: Optional[Tuple[int, int]]
    unassigned_nodes: int = 0

    @property
    def total_lambda(self) -> float:
        """Get Σ|λ|, an upper bound for the atomic norm."""
        return float(sum(abs(term.lam) for term in self.terms))

    def table(self) -> List[Dict[str, float]]:
        """Term rows for reports."""
        space = self.region.space
        rows = []
        for term in self.terms:
            report = validate_atom(space, self.region, term.atom)
            rows.append(
                {
                    "k": term.k,
                    "j": term.j,
                    "lambda": term.lam,
                    "center": term.atom.ball.center,
                    "radius": term.atom.ball.radius,
                    "atom_size": report.size,
                    "atom_norm": report.norm,
                }
            )
        return rows


def atomic_decompose(
    space: DiscreteSpace, region: RegionGrid, f: TentFunction, q: float
) -> Decomposition:
    """
    Decompose f into 5-admissible t^{1,q} atoms.

    Each node of T(E_k) is assigned to the first greedy ball j with the node in T(5B_k^j); the
    scalar of piece (k, j) is λ = γ(5B)^{1/q'}·(Σ_{x ∈ 5B} A_q(f·1_{A_k})(x)^q γ_x)^{1/q}.

    Parameters
    ----------
    space : DiscreteSpace
    region : RegionGrid
    f : TentFunction
    q : float
        exponent, at least 1

    Returns
    -------
    Decomposition
        empty for f ≡ 0
    """
    if q < 1:
        raise ValueError(f"Atomic decompositions need q >= 1, got {q}")
    levels = level_sets(region, f, q)
    if levels is None:
        return Decomposition(region, q, [], None)
    tents = {k: tent(region, level) for k, level in levels.sets.items()}
    terms: List[Term] = []
    unassigned = 0
    for k in levels.levels:
        layer = tents[k] & ~tents[k + 1]
        piece = np.where(layer, f.values, 0)
        if not np.any(piece):
            continue
        area_q = a_q_alpha(region, piece, q, 1.0) ** q
        assigned = np.zeros(region.shape, dtype=bool)
        for j, ball in enumerate(vitali_tent_cover(space, levels.sets[k])):
            dilate = ball.scaled(5.0)
            members = ball_members(space, dilate)
            share = tent(region, members) & tents[k] & ~assigned
            assigned |= share
            part = np.where(share & layer, piece, 0)
            if not np.any(part):
                continue
            mass = float(space.gamma[members].sum())
            energy = float(np.sum(area_q[members] * space.gamma[members]))
            lam = mass ** (1.0 - 1.0 / q) * energy ** (1.0 / q)
            if lam == 0:
                continue
            atom = Atom(TentFunction(region, part / lam), dilate, q)
            terms.append(Term(k, j, lam, atom))
        unassigned += int(np.sum(tents[k] & ~assigned))
    if unassigned:
        log.warning("%d tent nodes escaped every dilated cover ball", unassigned)
    log.info(
        "Decomposed into %d terms over levels %d..%d", len(terms), levels.k_min, levels.k_max
    )
    return Decomposition(region, q, terms, (levels.k_min, levels.k_max), unassigned)


def reconstruct(decomposition: Decomposition) -> TentFunction:
    """Σ λ·a node-wise."""
    region = decomposition.region
    is_complex = any(np.iscomplexobj(t.atom.values.values) for t in decomposition.terms)
    dtype = complex if is_complex else float
    total = np.zeros(region.shape, dtype=dtype)
    for term in decomposition.terms:
        total += term.lam * term.atom.values.values
    return TentFunction(region, total)


@dataclass(frozen=True)
class AtomReport:
    """
    Outcome of an atom validation.

    ``size`` is Σ_{T(B)} |a|^q γw, ``chain`` is γ(B)^{1/q'}·size^{1/q} and ``norm`` is
    ‖a‖_{t^{1,q}}; a valid atom has norm ≤ chain ≤ 1.
    """

    support_ok: bool
    size: float
    size_bound: float
    norm: float
    chain: float
    passed: bool
    witness: Optional[Tuple[int, int]]


def validate_atom(
    space: DiscreteSpace, region: RegionGrid, atom: Atom, rtol: float = 1e-9
) -> AtomReport:
    """Check support in T(B), the size bound γ(B)^{1-q} and the norm chain."""
    values = atom.values.values
    members = ball_members(space, atom.ball)
    outside = (values != 0) & ~tent(region, members)
    witness = None
    if outside.any():
        point, level = np.argwhere(outside)[0]
        witness = (int(point), int(level))
    mass = float(space.gamma[members].sum())
    size = float(np.sum(np.abs(values) ** atom.q * region.node_weight))
    size_bound = mass ** (1.0 - atom.q)
    chain = mass ** (1.0 - 1.0 / atom.q) * size ** (1.0 / atom.q)
    norm = tpq_norm(region, atom.values, 1.0, atom.q)
    passed = (
        witness is None
        and size <= size_bound * (1 + rtol)
        and norm <= chain * (1 + rtol)
        and chain <= 1 + rtol
    )
    if not passed:
        log.warning("Atom on %s fails validation: size=%g bound=%g", atom.ball, size, size_bound)
    return AtomReport(witness is None, size, size_bound, norm, chain, passed, witness)


@dataclass(frozen=True)
class DecompositionCertificate:
    """Measured quantities of one decomposition and the proof inequalities they satisfy."""

    n_terms: int
    reconstruction_error: float
    atoms_valid: bool
    worst_atom_norm: float
    worst_lambda_ratio: float
    worst_cover_ratio: float
    total_lambda: float
    norm: float
    ratio: float
    aperture_ratio: float
    ratio_bound: float
    lower_bound: float
    unassigned_nodes: int

    @property
    def ratio_within_bounds(self) -> bool:
        """Check 1/max‖a‖ ≤ ρ ≤ 4·C̃_{1,5}·K_3."""
        if self.n_terms == 0:
            return True
        return self.lower_bound <= self.ratio * (1 + 1e-9) <= self.ratio_bound * (1 + 2e-9)

    @property
    def passed(self) -> bool:
        """Check every asserted inequality."""
        return (
            self.reconstruction_error <= 1e-10
            and self.atoms_valid
            and self.worst_lambda_ratio <= 1 + 1e-9
            and self.worst_cover_ratio <= 1 + 1e-9
            and self.unassigned_nodes == 0
            and self.ratio_within_bounds
        )


def certify_decomposition(
    space: DiscreteSpace,
    region: RegionGrid,
    f: TentFunction,
    decomposition: Decomposition,
    c_15: Optional[float] = None,
) -> DecompositionCertificate:
    """
    Certify reconstruction, atoms, scalar bounds and the norm-equivalence chain.

    Per term λ_k^j ≤ γ(5B_k^j)·2^{k+1}; per level Σ_j γ(5B_k^j) ≤ C̃_{1,5}·γ(E_k).
    The ratio ρ = Σλ/‖f‖_{t^{1,q}} lies between 1/max‖a‖ and
    4·C̃_{1,5}·‖f‖_{t^{1,q}_3}/‖f‖_{t^{1,q}}.
    """
    q = decomposition.q
    scale = max(float(np.abs(f.values).max(initial=0.0)), 1e-300)
    error = float(np.abs(reconstruct(decomposition).values - f.values).max(initial=0.0)) / scale
    c_15 = c_15 if c_15 is not None else doubling_constant(space, 1.0, 5.0)

    reports = [validate_atom(space, region, term.atom) for term in decomposition.terms]
    lambda_ratio, level_mass = 0.0, {}
    for term in decomposition.terms:
        mass = float(space.gamma[ball_members(space, term.atom.ball)].sum())
        lambda_ratio = max(lambda_ratio, term.lam / (mass * 2.0 ** (term.k + 1)))
    levels = level_sets(region, f, q)
    cover_ratio = 0.0
    if levels is not None:
        for k in levels.levels:
            balls = vitali_tent_cover(space, levels.sets[k])
            level_mass[k] = sum(
                float(space.gamma[ball_members(space, b.scaled(5.0))].sum()) for b in balls
            )
            enclosing = c_15 * float(space.gamma[levels.sets[k]].sum())
            cover_ratio = max(cover_ratio, level_mass[k] / enclosing)

    norm = tpq_norm(region, f, 1.0, q) if not f.is_zero else 0.0
    norm3 = tpq_norm(region, f, 1.0, q, 3.0) if not f.is_zero else 0.0
    total = decomposition.total_lambda
    ratio = total / norm if norm > 0 else 0.0
    aperture_ratio = norm3 / norm if norm > 0 else 1.0
    worst_norm = max((report.norm for report in reports), default=0.0)
    return DecompositionCertificate(
        n_terms=len(decomposition.terms),
        reconstruction_error=error,
        atoms_valid=all(report.passed for report in reports),
        worst_atom_norm=worst_norm,
        worst_lambda_ratio=lambda_ratio,
        worst_cover_ratio=cover_ratio,
        total_lambda=total,
        norm=norm,
        ratio=ratio,
        aperture_ratio=aperture_ratio,
        ratio_bound=4.0 * c_15 * aperture_ratio,
        lower_bound=1.0 / worst_norm if worst_norm > 0 else 0.0,
        unassigned_nodes=decomposition.unassigned_nodes,
    )


def aperture_atom_bound(space: DiscreteSpace, alpha: float, q: float) -> float:
    """C̃_{1,α}^{1/q}·C̃_{5,α}^{1-1/q}, the change-of-aperture bound for 5-admissible atoms."""
    return doubling_constant(space, 1.0, alpha) ** (1.0 / q) * doubling_constant(
        space, 5.0, alpha
    ) ** (1.0 - 1.0 / q)
