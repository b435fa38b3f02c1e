"""Certification suites: the default check list, its shared context and the runner."""

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed
from tqdm import tqdm

from tentlab.atomic import (
    DecompositionCertificate,
    Decomposition,
    aperture_atom_bound,
    atomic_decompose,
    certify_decomposition,
    certify_tent_cover,
    pointwise2_check,
    pointwise2_inclusion,
    vitali_tent_cover,
)
from tentlab.checks import Check, Outcome, check
from tentlab.config import ScenarioConfig
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
    sector_extension_check,
    sector_members,
    sector_scan,
)
from tentlab.corpus import (
    random_point_function,
    random_point_set,
    random_tent_function,
    tent_corpus,
)
from tentlab.dyadic import (
    DyadicSystem,
    ContainmentReport,
    build_shifted_systems,
    check_system,
    containment_constants,
    domination_ratio,
    fefferman_stein_ratios,
    weak11_check,
)
from tentlab.errors import ConfigError, DuplicateCheckError
from tentlab.functionals import (
    TentFunction,
    a_q_alpha,
    fubini_qq,
    j_alpha,
    mixed_norm,
    n_alpha,
    tinf_norm,
    tpq_norm,
)
from tentlab.region import (
    RegionGrid,
    TimeGrid,
    build_region,
    cone_tent_reach,
    tent,
    tent_by_containment,
)
from tentlab.report import CertificationReport, CheckRecord, Curve
from tentlab.spaces import (
    Ball,
    DiscreteSpace,
    check_metric,
    doubling_constant,
    geometric_doubling_witness,
    load_space,
    polynomial_line,
    preset,
    uniform_local,
    verify_condition_A,
    verify_condition_B,
    verify_condition_C,
)

log = logging.getLogger(__name__)

IDENTITY_RTOL = 1e-12
NORM_RTOL = 1e-10
APERTURE_PAIRS = ((1.0, 2.0), (1.0, 3.0), (2.0, 5.0))
CURVE_APERTURES = (1.0, 1.5, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0)


class SuiteContext:
    """Spaces, regions, corpora and measured constants shared by the checks of one run."""

    def __init__(self, config: ScenarioConfig) -> None:
        self.config = config

    @property
    def seed(self) -> int:
        return self.config.seed

    def stream(self, label: int, index: int = 0) -> np.random.Generator:
        """Independent random stream ``index`` of the check labelled ``label``."""
        return np.random.default_rng([self.seed, label, index])

    @cached_property
    def space(self) -> DiscreteSpace:
        settings = self.config.space
        if settings.file is not None:
            return load_space(settings.file)
        return preset(settings.preset, **settings.params)

    @cached_property
    def region(self) -> RegionGrid:
        settings = self.config.grid
        t_min = settings.t_min if settings.t_min is not None else float(self.space.m.min()) / 8
        t_max = settings.t_max if settings.t_max is not None else float(self.space.m.max())
        return build_region(self.space, TimeGrid.log_uniform(t_min, t_max, settings.n_levels))

    @cached_property
    def plane(self) -> DiscreteSpace:
        settings = self.config.cone
        if settings.file is not None:
            return load_space(settings.file)
        return preset(settings.preset, **settings.params)

    @cached_property
    def plane_region(self) -> RegionGrid:
        return build_region(self.plane, TimeGrid.default_for(self.plane, self.config.cone.n_levels))

    @cached_property
    def polynomial(self) -> DiscreteSpace:
        return polynomial_line(n_points=self.config.space.aux_points)

    @cached_property
    def uniform(self) -> DiscreteSpace:
        n_points = self.config.space.aux_points
        return uniform_local(n_points=n_points, length=n_points / 20.0)

    @cached_property
    def corpus(self) -> List[TentFunction]:
        settings = self.config.corpus
        return tent_corpus(self.region, settings.seed, settings.size, settings.complex_values)

    def _threads(self) -> Parallel:
        return Parallel(n_jobs=self.config.suite.n_jobs, backend="threading")

    @cached_property
    def decompositions(self) -> Dict[float, List[Decomposition]]:
        space, region = self.space, self.region
        return {
            q: self._threads()(delayed(atomic_decompose)(space, region, f, q) for f in self.corpus)
            for q in self.config.exponents.q
        }

    @cached_property
    def c_15(self) -> float:
        return doubling_constant(self.space, 1.0, 5.0)

    @cached_property
    def certificates(self) -> Dict[float, List[DecompositionCertificate]]:
        space, region, c_15 = self.space, self.region, self.c_15
        return {
            q: self._threads()(
                delayed(certify_decomposition)(space, region, f, decomposition, c_15)
                for f, decomposition in zip(self.corpus, decompositions)
            )
            for q, decompositions in self.decompositions.items()
        }

    @cached_property
    def systems(self) -> List[DyadicSystem]:
        return build_shifted_systems(self.space)

    @cached_property
    def containment(self) -> ContainmentReport:
        return containment_constants(self.space, self.systems, self.config.dyadic.alpha)

    @cached_property
    def point_functions(self) -> List[np.ndarray]:
        return [
            random_point_function(self.space, self.stream(900, index))
            for index in range(self.config.dyadic.functions)
        ]

    @cached_property
    def lda(self) -> LdaParams:
        return choose_lda_params(self.plane)

    def load_inputs(self) -> None:
        """Read the space files named by the scenario so that a bad file fails before any check."""
        if self.config.space.file is not None:
            _ = self.space
        if self.config.cone.file is not None:
            _ = self.plane

    def prepare(self) -> None:
        """Build the shared state before checks run on several threads."""
        _ = self.space, self.region, self.corpus, self.plane_region


def _relative_gap(measured: np.ndarray, expected: np.ndarray) -> float:
    scale = np.maximum(np.abs(expected), 1e-300)
    gaps = np.abs(measured - expected) / scale
    return float(gaps.max(initial=0.0))


def _lambda_grid(u: np.ndarray, count: int) -> np.ndarray:
    top = float(np.abs(u).max())
    return top * np.geomspace(1e-3, 1.0, count)


# space_core


@check("space.metric-axioms", "d is a metric on every suite space")
def metric_axioms(context: SuiteContext) -> Outcome:
    reports = {
        space.name: check_metric(space, seed=context.seed)
        for space in (context.space, context.plane)
    }
    failed = [name for name, report in reports.items() if not report.passed]
    worst = max(report.worst_violation for report in reports.values())
    witness = None
    if failed:
        witness = f"{failed[0]} at indices {reports[failed[0]].witness}"
    return Outcome(not failed, {"worst_violation": worst}, {"rtol": 1e-12}, witness)


@check("space.doubling", "condition (A): gamma(2B) <= C_alpha gamma(B) on alpha-admissible balls")
def doubling(context: SuiteContext) -> Outcome:
    constants: Dict[str, float] = {"mu_doubling": context.space.mu_doubling}
    rows: Curve = []
    witness = None
    passed = True
    for alpha in context.config.exponents.apertures:
        report = verify_condition_A(context.space, alpha)
        constants[f"C_{alpha:g}"] = report.empirical_constant
        bound = report.theoretical_bound
        row = {"alpha": alpha, "constant": report.empirical_constant}
        if bound is not None:
            constants[f"bound_{alpha:g}"] = bound
            row["bound"] = bound
        rows.append(row)
        if report.passed is False:
            passed = False
            witness = witness or f"alpha={alpha:g} ball={report.worst_ball.as_dict()}"
    return Outcome(passed, constants, {"rtol": 1e-12}, witness, {"doubling_constants": rows})


@check("space.doubling-curve", "the doubling table C_{1,lambda} against lambda", assertive=False)
def doubling_curve(context: SuiteContext) -> Outcome:
    rows = [
        {"lam": lam, "constant": doubling_constant(context.space, 1.0, lam)}
        for lam in CURVE_APERTURES
    ]
    constants = {f"C_1_{row['lam']:g}": row["constant"] for row in rows}
    return Outcome(True, constants, curves={"c1_alpha": rows})


@check("space.condition-b", "condition (B) and the C^2 potential doubling bound")
def condition_b(context: SuiteContext) -> Outcome:
    space = context.polynomial
    xs = space.coords[:, 0]
    report = verify_condition_B(space.potential, (float(xs.min()), float(xs.max())))
    constants: Dict[str, float] = {"M": report.minimal_M}
    witness = f"non-finite ratio at x={report.violations[0]}" if report.violations else None
    passed = not report.violations
    for alpha in (1.0, 2.0):
        doubling_report = verify_condition_A(space, alpha)
        constants[f"C_{alpha:g}"] = doubling_report.empirical_constant
        if doubling_report.passed is False:
            passed = False
            witness = witness or f"alpha={alpha:g} ball={doubling_report.worst_ball.as_dict()}"
    return Outcome(passed, constants, {"rtol": 1e-12}, witness)


@check("space.condition-c", "condition (C) for C^2 potentials: c_alpha <= exp(M alpha)")
def condition_c(context: SuiteContext) -> Outcome:
    space = context.polynomial
    m_constant = float(space.admissibility.condition_b_constant)
    constants: Dict[str, float] = {"M": m_constant}
    witness = None
    for alpha in (1.0, 2.0):
        report = verify_condition_C(space, alpha)
        constants[f"c_{alpha:g}"] = report.empirical_c_alpha
        if report.empirical_c_alpha > math.exp(m_constant * alpha) * (1 + IDENTITY_RTOL):
            witness = witness or f"alpha={alpha:g} pair={report.worst_pair}"
    return Outcome(witness is None, constants, {"rtol": IDENTITY_RTOL}, witness)


@check("space.uniform-local", "the uniformly local setting: c_alpha = 1 and C <= D_mu")
def uniform_setting(context: SuiteContext) -> Outcome:
    space = context.uniform
    constants: Dict[str, float] = {"mu_doubling": space.mu_doubling}
    witness = None
    for alpha in context.config.exponents.apertures:
        c_alpha = verify_condition_C(space, alpha).empirical_c_alpha
        doubling_alpha = doubling_constant(space, alpha, 2.0)
        constants[f"c_{alpha:g}"] = c_alpha
        constants[f"C_{alpha:g}"] = doubling_alpha
        if c_alpha != 1.0 or doubling_alpha > space.mu_doubling * (1 + IDENTITY_RTOL):
            witness = witness or f"alpha={alpha:g} c={c_alpha:.6g} C={doubling_alpha:.6g}"
    return Outcome(witness is None, constants, {"rtol": IDENTITY_RTOL}, witness)


@check("space.geometric-doubling", "geometric doubling of the point cloud", assertive=False)
def geometric_doubling(context: SuiteContext) -> Outcome:
    count, ball = geometric_doubling_witness(context.space, seed=context.seed)
    witness = str(ball.as_dict()) if ball is not None else None
    return Outcome(True, {"max_half_radius_separated": float(count)}, witness=witness)


# tent_geometry


@check("tent.containment", "T(E) by complement distance equals T(E) by ball containment")
def tent_containment(context: SuiteContext) -> Outcome:
    witness = None
    trials = context.config.corpus.random_sets
    for index in range(trials):
        open_set = random_point_set(context.space, context.stream(100, index))
        direct = tent(context.region, open_set)
        contained = tent_by_containment(context.region, open_set)
        if not np.array_equal(direct, contained):
            point, level = np.argwhere(direct != contained)[0]
            witness = f"set {index}: node ({point}, {level})"
            break
    return Outcome(witness is None, {"sets": float(trials)}, witness=witness)


@check(
    "tent.length-space-reach",
    "cones of aperture alpha meet T(B) only over alpha B",
    assertive=False,
)
def length_space_reach(context: SuiteContext) -> Outcome:
    space = context.space
    rng = context.stream(110)
    constants: Dict[str, float] = {}
    for alpha in (1.0, 2.0):
        failures = 0
        for _ in range(20):
            center = int(rng.integers(space.n_points))
            ball = Ball(center, float(space.m[center] * rng.uniform(0.25, 1.0)))
            failures += int(cone_tent_reach(context.region, ball, alpha).size)
        constants[f"points_outside_{alpha:g}"] = float(failures)
    return Outcome(True, constants)


# functionals


@check("functionals.fubini", "Fubini: the t^{q,q}_alpha norm is a node sum")
def fubini(context: SuiteContext) -> Outcome:
    worst = 0.0
    for f in context.corpus:
        for q in context.config.exponents.q:
            for alpha in (1.0, 2.0):
                direct = np.array(tpq_norm(context.region, f, q, q, alpha) ** q)
                summed = np.array(fubini_qq(context.region, f, q, alpha))
                worst = max(worst, _relative_gap(summed, direct))
    witness = None if worst <= NORM_RTOL else f"relative gap {worst:.3g}"
    return Outcome(worst <= NORM_RTOL, {"worst_gap": worst}, {"rtol": NORM_RTOL}, witness)


@check("functionals.aperture-identity", "N_alpha J_beta f = gamma ratio times J_alpha f")
def aperture_identity(context: SuiteContext) -> Outcome:
    region = context.region
    worst = 0.0
    witness = None
    for index in range(context.config.corpus.aperture_functions):
        f = random_tent_function(
            region,
            context.stream(200, index),
            complex_values=context.config.corpus.complex_values,
        )
        for beta, alpha in APERTURE_PAIRS:
            projected = n_alpha(region, j_alpha(region, f, beta), alpha)
            target = j_alpha(region, f, alpha)
            ratio = (region.scaled_ball_mass(beta) / region.scaled_ball_mass(alpha))[region.mask]
            expected = target.values * ratio[target.node_id]
            gap = _relative_gap(projected.values, expected)
            if gap > worst:
                worst = gap
                witness = f"f {index}, beta={beta:g}, alpha={alpha:g}: relative gap {gap:.3g}"
    passed = worst <= IDENTITY_RTOL
    witness = None if passed else witness
    return Outcome(passed, {"worst_gap": worst}, {"rtol": IDENTITY_RTOL}, witness)


@check("functionals.j-alpha-isometry", "J_alpha is an isometry t^{p,q}_alpha -> L^p(L^q)")
def j_alpha_isometry(context: SuiteContext) -> Outcome:
    region = context.region
    p = context.config.exponents.p
    worst = 0.0
    for f in context.corpus[: context.config.corpus.aperture_functions]:
        for q in context.config.exponents.q:
            for alpha in (1.0, 2.0):
                lifted = mixed_norm(region, j_alpha(region, f, alpha), p, q)
                direct = tpq_norm(region, f, p, q, alpha)
                worst = max(worst, _relative_gap(np.array(lifted), np.array(direct)))
    passed = worst <= NORM_RTOL
    witness = None if passed else f"relative gap {worst:.3g}"
    return Outcome(passed, {"worst_gap": worst}, {"rtol": NORM_RTOL}, witness)


@check("functionals.duality", "atoms pair with g at most ||g||_{t^{inf,q'}}")
def duality(context: SuiteContext) -> Outcome:
    region = context.region
    weight = region.node_weight
    constants: Dict[str, float] = {}
    witness = None
    for q in context.config.exponents.q:
        qprime = math.inf if q == 1 else q / (q - 1)
        duals = [
            random_tent_function(
                region,
                context.stream(300, index),
                complex_values=context.config.corpus.complex_values,
            )
            for index in range(context.config.corpus.dual_functions)
        ]
        norms = np.array([tinf_norm(region, g, qprime) for g in duals])
        stacked = np.stack([np.conj(g.values) * weight for g in duals])
        worst = 0.0
        for decomposition in context.decompositions[q]:
            for term in decomposition.terms:
                support = np.nonzero(term.atom.values.values)
                values = term.atom.values.values[support]
                pairs = np.abs(stacked[:, support[0], support[1]] @ values)
                ratio = float(np.max(pairs / norms))
                if ratio > worst:
                    worst = ratio
                    if ratio > 1 + NORM_RTOL:
                        witness = f"q={q:g} atom k={term.k} j={term.j}: ratio {ratio:.12g}"
        constants[f"worst_ratio_q{q:g}"] = worst
    return Outcome(witness is None, constants, {"rtol": NORM_RTOL}, witness)


@check(
    "functionals.change-of-aperture",
    "norms of apertures alpha and 1 are comparable; atoms stay bounded",
    assertive=False,
)
def change_of_aperture(context: SuiteContext) -> Outcome:
    region = context.region
    p = context.config.exponents.p
    rows: Curve = []
    constants: Dict[str, float] = {}
    for q in context.config.exponents.q:
        for alpha in context.config.exponents.apertures:
            if alpha < 1:
                continue
            ratios = [
                tpq_norm(region, f, p, q, alpha) / tpq_norm(region, f, p, q, 1.0)
                for f in context.corpus
                if not f.is_zero
            ]
            atoms = [term.atom for d in context.decompositions[q] for term in d.terms][:50]
            bound = aperture_atom_bound(context.space, alpha, q)
            atom_ratio = max(
                (tpq_norm(region, atom.values, 1.0, q, alpha) / bound for atom in atoms),
                default=0.0,
            )
            rows.append(
                {
                    "q": q,
                    "alpha": alpha,
                    "max_norm_ratio": max(ratios, default=0.0),
                    "min_norm_ratio": min(ratios, default=0.0),
                    "max_atom_ratio": atom_ratio,
                }
            )
            constants[f"atom_ratio_q{q:g}_a{alpha:g}"] = atom_ratio
    return Outcome(True, constants, curves={"aperture_ratios": rows})


# atomic


@check("atomic.vitali-cover", "greedy balls: disjoint, admissible, inside E, T(E) in union T(5B)")
def vitali_cover(context: SuiteContext) -> Outcome:
    witness = None
    total = 0
    for label, region in ((400, context.region), (401, context.plane_region)):
        space = region.space
        for index in range(context.config.corpus.random_sets):
            open_set = random_point_set(space, context.stream(label, index))
            balls = vitali_tent_cover(space, open_set)
            certificate = certify_tent_cover(region, open_set, balls)
            total += 1
            if not certificate.passed:
                witness = witness or f"{space.name} set {index}: {certificate}"
    return Outcome(witness is None, {"sets": float(total)}, witness=witness)


@check("atomic.pointwise2", "A_q(f 1_{D minus T(E)}) <= lambda with E = {A_q^3 f > lambda}")
def pointwise2(context: SuiteContext) -> Outcome:
    worst = 0.0
    witness = None
    thresholds = 0
    for q, decompositions in context.decompositions.items():
        for index, (f, decomposition) in enumerate(zip(context.corpus, decompositions)):
            if decomposition.k_range is None:
                continue
            k_min, k_max = decomposition.k_range
            for k in range(k_min, k_max + 2):
                report = pointwise2_check(context.region, f, q, 2.0**k)
                thresholds += 1
                worst = max(worst, report.worst_value / report.lam)
                if not report.passed and witness is None:
                    witness = f"q={q:g} f {index} k={k} x={report.worst_x}"
    constants = {"worst_ratio": worst, "thresholds": float(thresholds)}
    return Outcome(witness is None, constants, {"rtol": 1e-12}, witness)


@check("atomic.pointwise2-inclusion", "Gamma(x) minus T(E) lies in Gamma_3(x0), x0 nearest outside")
def pointwise2_cones(context: SuiteContext) -> Outcome:
    space = context.space
    witness = None
    for index in range(context.config.corpus.random_sets):
        rng = context.stream(500, index)
        open_set = random_point_set(space, rng)
        x = int(rng.integers(space.n_points))
        if not pointwise2_inclusion(context.region, open_set, x):
            witness = f"set {index}, x={x}"
            break
    constants = {"sets": float(context.config.corpus.random_sets)}
    return Outcome(witness is None, constants, witness=witness)


@check("atomic.decomposition", "f = sum lambda a with 5-admissible atoms and bounded scalars")
def decomposition(context: SuiteContext) -> Outcome:
    constants: Dict[str, float] = {"C_1_5": context.c_15}
    witness = None
    for q, certificates in context.certificates.items():
        constants[f"terms_q{q:g}"] = float(sum(c.n_terms for c in certificates))
        constants[f"reconstruction_q{q:g}"] = max(c.reconstruction_error for c in certificates)
        constants[f"lambda_ratio_q{q:g}"] = max(c.worst_lambda_ratio for c in certificates)
        constants[f"cover_ratio_q{q:g}"] = max(c.worst_cover_ratio for c in certificates)
        for index, certificate in enumerate(certificates):
            if not certificate.passed and witness is None:
                witness = f"q={q:g} f {index}: {certificate}"
    tolerances = {"reconstruction": 1e-10, "atoms": 1e-9}
    return Outcome(witness is None, constants, tolerances, witness)


@check("atomic.norm-equivalence", "1/max||a|| <= sum|lambda|/||f|| <= 4 C_{1,5} K_3")
def norm_equivalence(context: SuiteContext) -> Outcome:
    constants: Dict[str, float] = {}
    rows: Curve = []
    witness = None
    for q, certificates in context.certificates.items():
        ratios = [c.ratio for c in certificates if c.n_terms]
        for index, certificate in enumerate(certificates):
            rows.append({"q": q, "index": float(index), "ratio": certificate.ratio})
            finite = math.isfinite(certificate.ratio)
            if (not finite or not certificate.ratio_within_bounds) and witness is None:
                witness = (
                    f"q={q:g} f {index}: ratio {certificate.ratio:.6g} outside "
                    f"[{certificate.lower_bound:.6g}, {certificate.ratio_bound:.6g}]"
                )
        constants[f"max_ratio_q{q:g}"] = max(ratios, default=0.0)
        constants[f"min_ratio_q{q:g}"] = min(ratios, default=0.0)
        constants[f"max_K3_q{q:g}"] = max((c.aperture_ratio for c in certificates), default=1.0)
    curves = {"decomposition_ratios": rows}
    return Outcome(witness is None, constants, {"rtol": 2e-9}, witness, curves)


@check("atomic.atomic-norm", "sum|lambda| bounds the atomic norm", assertive=False)
def atomic_norm(context: SuiteContext) -> Outcome:
    constants: Dict[str, float] = {}
    for q, certificates in context.certificates.items():
        constants[f"total_lambda_q{q:g}"] = float(sum(c.total_lambda for c in certificates))
        constants[f"total_norm_q{q:g}"] = float(sum(c.norm for c in certificates))
    return Outcome(True, constants)


# dyadic


@check("dyadic.partition", "every generation partitions X and refines the previous one")
def dyadic_partition(context: SuiteContext) -> Outcome:
    bad = [s.shift_label for s in context.systems if not check_system(context.space, s)]
    constants = {
        "systems": float(len(context.systems)),
        "generations": float(len(context.systems[0].generations)),
    }
    return Outcome(not bad, constants, witness=f"shift {bad[0]}" if bad else None)


@check("dyadic.weak11", "gamma({M_D u > lambda}) <= ||u||_1 / lambda")
def dyadic_weak11(context: SuiteContext) -> Outcome:
    measured = 0.0
    witness = None
    for system in context.systems:
        for index, u in enumerate(context.point_functions):
            grid = _lambda_grid(u, context.config.dyadic.lambdas)
            report = weak11_check(context.space, system, u, grid)
            measured = max(measured, report.measured_constant)
            if report.violations and witness is None:
                witness = f"shift {system.shift_label} u {index} lambda={report.worst_lambda}"
    return Outcome(witness is None, {"measured_constant": measured}, {"rtol": 1e-12}, witness)


@check("dyadic.containment", "every admissible ball lies in a cube of some shifted system")
def dyadic_containment(context: SuiteContext) -> Outcome:
    report = context.containment
    constants = {
        "balls": float(report.n_balls),
        "uncontained": float(report.uncontained),
        "c_X": report.c_x,
        "C_mass": report.mass_constant,
    }
    passed = report.uncontained == 0 and math.isfinite(report.c_x)
    witness = None if passed else f"{report.uncontained} balls, e.g. {report.worst_ball}"
    return Outcome(passed, constants, witness=witness)


@check("dyadic.domination", "M_alpha u <= C sum_D M_D u pointwise")
def dyadic_domination(context: SuiteContext) -> Outcome:
    alpha = context.config.dyadic.alpha
    constant = context.containment.mass_constant
    worst = 0.0
    witness = None
    for index, u in enumerate(context.point_functions):
        ratio = domination_ratio(context.space, context.systems, u, alpha, constant)
        if ratio > worst:
            worst = ratio
            if ratio > 1 + IDENTITY_RTOL:
                witness = f"u {index}: ratio {ratio:.12g}"
    constants = {"C_mass": constant, "worst_ratio": worst}
    return Outcome(witness is None, constants, {"rtol": IDENTITY_RTOL}, witness)


@check("dyadic.local-weak11", "gamma({M_alpha u > lambda}) <= C N ||u||_1 / lambda")
def local_weak11(context: SuiteContext) -> Outcome:
    alpha = context.config.dyadic.alpha
    constant = context.containment.mass_constant * len(context.systems)
    measured = 0.0
    witness = None
    for index, u in enumerate(context.point_functions):
        grid = _lambda_grid(u, context.config.dyadic.lambdas)
        report = weak11_check(context.space, alpha, u, grid, constant=constant)
        measured = max(measured, report.measured_constant)
        if report.violations and witness is None:
            witness = f"u {index} lambda={report.worst_lambda}"
    constants = {"constant": constant, "measured_constant": measured}
    return Outcome(witness is None, constants, {"rtol": 1e-12}, witness)


@check("dyadic.fefferman-stein", "M_alpha is bounded on L^p(l^q)", assertive=False)
def fefferman_stein(context: SuiteContext) -> Outcome:
    rng = context.stream(600)
    field = np.column_stack([random_point_function(context.space, rng) for _ in range(4)])
    q = max(max(context.config.exponents.q), 2.0)
    ratios = fefferman_stein_ratios(context.space, field, context.config.dyadic.alpha, q)
    rows = [{"p": p, "q": q, "ratio": ratio} for p, ratio in ratios.items()]
    constants = {f"ratio_p{p:g}": ratio for p, ratio in ratios.items()}
    return Outcome(True, constants, curves={"fefferman_stein": rows})


# cone_cover


@check("cone.sector", "closed-form sector membership agrees with a dense scan")
def sector(context: SuiteContext) -> Outcome:
    space = context.plane
    rng = context.stream(700)
    cosine_floor = math.sqrt(15.0 / 16.0)
    disagreements = 0
    witness = None
    for trial in range(20):
        apex = int(rng.integers(space.n_points))
        raw = rng.normal(size=space.coords.shape[1])
        shape = SectorSpec(apex, tuple(raw / np.linalg.norm(raw)), float(rng.uniform(0.2, 2.0)))
        members = sector_members(space, shape)
        scanned = sector_scan(space, shape, samples=2001)
        disagreements += int(np.sum(members != scanned))
        offset = space.coords[members] - space.coords[apex]
        cosines = offset @ np.asarray(shape.direction) / np.linalg.norm(offset, axis=1)
        if members[apex] or np.any(scanned & ~members) or np.any(cosines < cosine_floor - 1e-12):
            witness = witness or f"trial {trial}: {shape}"
    constants = {"scan_only_misses": float(disagreements)}
    return Outcome(witness is None, constants, {"angle": 1e-12}, witness)


@check("cone.direction-net", "every direction is within arctan(1/4) of the net")
def direction_net_check(context: SuiteContext) -> Outcome:
    rng = context.stream(710)
    net = direction_net(2)
    samples = rng.normal(size=(10_000, 2))
    samples /= np.linalg.norm(samples, axis=1)[:, None]
    closest = np.arccos(np.clip((samples @ net.T).max(axis=1), -1.0, 1.0))
    worst = float(closest.max())
    passed = len(net) == 13 and worst <= MAX_ANGLE and len(direction_net(1)) == 2
    witness = None if passed else f"N={len(net)} worst angle {worst:.6g}"
    return Outcome(passed, {"N": float(len(net)), "worst_angle": worst}, witness=witness)


@check("cone.extension", "E* as a ball union equals {M_alpha 1_E > lambda}")
def extension_agreement(context: SuiteContext) -> Outcome:
    space = context.plane
    params = context.lda
    everything = np.ones(space.n_points, dtype=bool)
    nothing = np.zeros(space.n_points, dtype=bool)
    witness = None
    if extension(space, nothing, params).points.any():
        witness = "E empty gives nonempty E*"
    if not extension(space, everything, params).points.all():
        witness = witness or "E = X gives E* != X"
    for index in range(context.config.corpus.random_sets):
        result = extension(space, random_point_set(space, context.stream(720, index)), params)
        if not result.agree and witness is None:
            witness = f"set {index}: computations differ"
    constants = {"alpha": params.alpha, "beta": params.beta, "lambda": params.lam}
    return Outcome(witness is None, constants, witness=witness)


@check("cone.extension-mass", "gamma(E*) <= (C / lambda) gamma(E)", assertive=False)
def extension_mass(context: SuiteContext) -> Outcome:
    space = context.plane
    params = context.lda
    worst = 0.0
    for index in range(context.config.corpus.random_sets):
        open_set = random_point_set(space, context.stream(730, index))
        star = extension(space, open_set, params).points
        worst = max(worst, params.lam * space.gamma[star].sum() / space.gamma[open_set].sum())
    constants = {"measured_constant": float(worst), "A_beta": params.a_beta}
    return Outcome(True, constants, witness=params.assumption)


@check("cone.single-point-cover", "for E = X minus {p}, Gamma(x) minus T(E*) lies in Gamma(p)")
def single_point_cover(context: SuiteContext) -> Outcome:
    space = context.plane
    witness = None
    for trial in range(context.config.cone.trials):
        rng = context.stream(740, trial)
        removed, x = (int(i) for i in rng.choice(space.n_points, size=2, replace=False))
        open_set = np.ones(space.n_points, dtype=bool)
        open_set[removed] = False
        result = cone_cover(space, context.plane_region, open_set, x, context.lda)
        hits = {h for h in result.hits if h is not None}
        if not result.passed or hits != {removed}:
            witness = witness or f"p={removed} x={x}: hits {sorted(hits)}"
    return Outcome(witness is None, {"trials": float(context.config.cone.trials)}, witness=witness)


@check("cone.random-cover", "Gamma(x) minus T(E*) lies in the union of the Gamma(x_m)")
def random_cover(context: SuiteContext) -> Outcome:
    space = context.plane
    passed = tried = escaped = 0
    failure = None
    for trial in range(context.config.cone.trials):
        rng = context.stream(750, trial)
        open_set = random_point_set(space, rng)
        if open_set.all():
            continue
        x = int(rng.choice(np.flatnonzero(open_set)))
        result = cone_cover(space, context.plane_region, open_set, x, context.lda)
        tried += 1
        passed += int(result.passed)
        escaped += result.escaped_nodes
        if not result.passed and failure is None:
            failure = f"trial={trial} x={x}: {result.escaped_nodes} escaped nodes"
    constants = {"tried": float(tried), "passed": float(passed), "escaped_nodes": float(escaped)}
    return Outcome(passed == tried, constants, witness=failure or context.lda.assumption)


@check(
    "cone.corollary-pointwise", "A_q(f 1_{D minus T(E*)}) <= N lambda with E = {A_q f > lambda}"
)
def corollary_pointwise(context: SuiteContext) -> Outcome:
    region = context.plane_region
    functions = tent_corpus(region, context.seed, context.config.cone.trials)
    worst = 0.0
    violations = 0
    witness = None
    for f in functions:
        for q in context.config.exponents.q:
            area = a_q_alpha(region, f, q)
            lam = float(np.quantile(area, 0.9))
            if not lam > 0:
                continue
            report = corollary_pointwise_check(context.plane, region, f, q, lam, context.lda)
            worst = max(worst, report.worst_value / report.bound)
            violations += int(not report.passed)
            if not report.passed and witness is None:
                value, bound = report.worst_value, report.bound
                witness = f"q={q:g} x={report.worst_x}: {value:.6g} > {bound:.6g}"
    constants = {"worst_ratio": worst, "violations": float(violations)}
    return Outcome(violations == 0, constants, {"rtol": 1e-12}, witness)


@check("cone.sector-extension", "sectors inside E have B(y, 2t) inside E*", assertive=False)
def sector_extension(context: SuiteContext) -> Outcome:
    space = context.plane
    found = violations = 0
    for index in range(context.config.corpus.random_sets):
        rng = context.stream(760, index)
        open_set = random_point_set(space, rng, n_balls=3)
        report = sector_extension_check(space, open_set, context.lda, rng)
        found += report.sectors_inside
        violations += report.violations
    constants = {"sectors_inside": float(found), "violations": float(violations)}
    return Outcome(violations == 0, constants, witness=context.lda.assumption)


@check("cone.geometry", "flat comparison d(y,z) <= d(x,z) tan(theta) and t/4 divergence")
def geometry(context: SuiteContext) -> Outcome:
    comparison = comparison_selftest(context.stream(770))
    divergence = divergence_selftest(context.stream(771))
    passed = comparison <= 1 + IDENTITY_RTOL and divergence <= 1 + IDENTITY_RTOL
    constants = {"comparison_ratio": comparison, "divergence_ratio": divergence}
    witness = None if passed else f"ratios {comparison:.12g}, {divergence:.12g}"
    return Outcome(passed, constants, {"rtol": IDENTITY_RTOL}, witness)


DEFAULT_CHECKS: Tuple[Check, ...] = (
    metric_axioms,
    doubling,
    doubling_curve,
    condition_b,
    condition_c,
    uniform_setting,
    geometric_doubling,
    tent_containment,
    length_space_reach,
    fubini,
    aperture_identity,
    j_alpha_isometry,
    duality,
    change_of_aperture,
    vitali_cover,
    pointwise2,
    pointwise2_cones,
    decomposition,
    norm_equivalence,
    atomic_norm,
    dyadic_partition,
    dyadic_weak11,
    dyadic_containment,
    dyadic_domination,
    local_weak11,
    fefferman_stein,
    sector,
    direction_net_check,
    extension_agreement,
    extension_mass,
    single_point_cover,
    random_cover,
    corollary_pointwise,
    sector_extension,
    geometry,
)


@dataclass(frozen=True)
class Suite:
    """A named tuple of checks run against one context."""

    name: str
    checks: Tuple[Check, ...]

    def __post_init__(self) -> None:
        self._validate_checks()

    def _validate_checks(self) -> None:
        seen = set()
        for item in self.checks:
            if item.name in seen:
                raise DuplicateCheckError(item.name)
            seen.add(item.name)

    def run(
        self, context: SuiteContext, parallel: bool = False, n_jobs: int = 2
    ) -> CertificationReport:
        """
        Run every check and assemble the report in check order.

        Parameters
        ----------
        context : SuiteContext
        parallel : bool
            run checks on a joblib thread pool
        n_jobs : int
            threads when ``parallel`` is set

        Returns
        -------
        CertificationReport

        Raises
        ------
        TentlabError
            if a space file named by the scenario cannot be read
        """
        context.load_inputs()
        if parallel:
            context.prepare()
            results = Parallel(n_jobs=n_jobs, backend="threading")(
                delayed(item.evaluate)(context) for item in self.checks
            )
        else:
            results = [
                item.evaluate(context)
                for item in tqdm(self.checks, desc=self.name, unit="check", disable=None)
            ]
        records: List[CheckRecord] = []
        curves: Dict[str, Curve] = {}
        for record, record_curves in results:
            records.append(record)
            curves.update(record_curves)
        report = CertificationReport(self.name, context.seed, records, curves)
        log.info("Suite %s: %d checks, %d failed", self.name, len(records), len(report.failures))
        return report


def default_suite(disabled: Tuple[str, ...] = ()) -> Suite:
    """The default suite without the checks named in ``disabled``."""
    names = {item.name for item in DEFAULT_CHECKS}
    unknown = sorted(set(disabled) - names)
    if unknown:
        raise ConfigError("suite.disabled", f"unknown check {unknown[0]!r}")
    return Suite("default", tuple(item for item in DEFAULT_CHECKS if item.name not in disabled))


def run_suite(config: ScenarioConfig, suite: Optional[Suite] = None) -> CertificationReport:
    """Run a suite (the default one unless given) for a scenario."""
    suite = suite if suite is not None else default_suite(config.suite.disabled)
    context = SuiteContext(config)
    return suite.run(context, config.suite.parallel, config.suite.n_jobs)
