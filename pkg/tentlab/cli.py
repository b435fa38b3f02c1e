"""Command-line interface: ``tentlab <command> [options]``."""

import argparse
import csv
import dataclasses
import json
import logging
import os
import sys
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence

from tentlab import __version__
from tentlab.atomic import atomic_decompose, certify_decomposition
from tentlab.config import ScenarioConfig, SpaceConfig, load_config, with_overrides
from tentlab.corpus import random_seeded, read_tent_csv
from tentlab.errors import ConfigError, TentlabError
from tentlab.functionals import TentFunction, a_q_alpha, tinf_norm, tpq_norm
from tentlab.report import emit_report
from tentlab.spaces import PRESETS, check_metric, verify_condition_A, verify_condition_C
from tentlab.suites import DEFAULT_CHECKS, Suite, SuiteContext, run_suite

log = logging.getLogger(__name__)

EXIT_OK, EXIT_FAILED, EXIT_USAGE = 0, 1, 2
LOG_ENV = "TENTLAB_LOG"

MAXIMAL_CHECKS = {
    "dyadic": ("dyadic.partition", "dyadic.weak11", "dyadic.containment"),
    "local": ("dyadic.containment", "dyadic.domination", "dyadic.local-weak11"),
    "lattice": ("dyadic.fefferman-stein",),
}
DECOMPOSITION_COLUMNS = ("k", "j", "lambda", "center", "radius", "atom_size", "atom_norm")
ATOM_CHECKS = ("atomic.decomposition", "atomic.norm-equivalence", "functionals.duality")


def _configure_logging() -> None:
    level = os.environ.get(LOG_ENV, "WARNING").upper()
    if not isinstance(logging.getLevelName(level), int):
        log.warning("Ignoring unknown %s level %s", LOG_ENV, level)
        return
    logging.getLogger("tentlab").setLevel(level)


def _space_config(value: str) -> SpaceConfig:
    if value in PRESETS:
        return SpaceConfig(preset=value)
    return SpaceConfig(file=value)


def _print_json(payload: Dict[str, Any]) -> None:
    print(json.dumps(payload, indent=2, sort_keys=True, default=str))


def _run_checks(
    config: ScenarioConfig, name: str, names: Sequence[str], out: Optional[str]
) -> int:
    selected = tuple(
        item
        for item in DEFAULT_CHECKS
        if item.name in names and item.name not in config.suite.disabled
    )
    report = Suite(name, selected).run(
        SuiteContext(config), config.suite.parallel, config.suite.n_jobs
    )
    print(report)
    if out is not None:
        emit_report(report, out, config.output.format, config.output.timings)
    return EXIT_OK if report.passed else EXIT_FAILED


def _function(context: SuiteContext, path: Optional[str]) -> TentFunction:
    if path is not None:
        return read_tent_csv(context.region, path)
    return random_seeded(context.region, context.seed)


def cmd_space(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """Summarize a space with its metric, doubling and admissibility constants."""
    context = SuiteContext(config)
    space = context.space
    metric = check_metric(space, seed=config.seed)
    payload: Dict[str, Any] = {
        "space": space.summary(),
        "metric": {"passed": metric.passed, "worst_violation": metric.worst_violation},
        "doubling": {},
        "condition_c": {},
    }
    for alpha in config.exponents.apertures:
        report = verify_condition_A(space, alpha)
        payload["doubling"][f"{alpha:g}"] = {
            "constant": report.empirical_constant,
            "bound": report.theoretical_bound,
            "worst_ball": report.worst_ball.as_dict(),
        }
        payload["condition_c"][f"{alpha:g}"] = verify_condition_C(space, alpha).empirical_c_alpha
    _print_json(payload)
    return EXIT_OK if metric.passed else EXIT_FAILED


def cmd_region(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """Summarize the admissible region of a space."""
    _print_json(SuiteContext(config).region.summary())
    return EXIT_OK


def cmd_norms(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """Tent-space norms of a function file (or of a seeded random function)."""
    context = SuiteContext(config)
    f = _function(context, args.function)
    region = context.region
    qprime = float("inf") if args.q == 1 else args.q / (args.q - 1)
    _print_json(
        {
            "tpq": tpq_norm(region, f, args.p, args.q, args.alpha),
            "tinf": tinf_norm(region, f, qprime),
            "max_area": float(a_q_alpha(region, f, args.q, args.alpha).max()),
            "p": args.p,
            "q": args.q,
            "alpha": args.alpha,
        }
    )
    return EXIT_OK


def cmd_decompose(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """Decompose a function into atoms and certify the result."""
    context = SuiteContext(config)
    f = _function(context, args.function)
    decomposition = atomic_decompose(context.space, context.region, f, args.q)
    certificate = certify_decomposition(context.space, context.region, f, decomposition)
    payload = {**dataclasses.asdict(certificate), "passed": certificate.passed}
    out = Path(config.output.out)
    try:
        out.mkdir(parents=True, exist_ok=True)
        with open(out / "decomposition.csv", "w", newline="", encoding="utf-8") as handle:
            writer = csv.DictWriter(handle, fieldnames=DECOMPOSITION_COLUMNS)
            writer.writeheader()
            writer.writerows(decomposition.table())
        with open(out / "certificate.json", "w", encoding="utf-8") as handle:
            json.dump(payload, handle, indent=2, sort_keys=True, default=str)
    except OSError as err:
        raise ConfigError("output.out", f"cannot write to {out}: {err}") from err
    _print_json(payload)
    return EXIT_OK if certificate.passed else EXIT_FAILED


def cmd_verify_atoms(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """Certify the atoms of the corpus decompositions."""
    return _run_checks(config, "verify-atoms", ATOM_CHECKS, config.output.out)


def cmd_maximal(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """Dyadic, local or lattice maximal-function checks."""
    if args.alpha is not None:
        config = dataclasses.replace(
            config, dyadic=dataclasses.replace(config.dyadic, alpha=args.alpha)
        )
    return _run_checks(config, f"maximal-{args.op}", MAXIMAL_CHECKS[args.op], args.report)


def cmd_conecover(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """Cone covering checks on a Euclidean space of dimension 1 or 2."""
    cone = config.cone
    if args.space is not None:
        if args.space in PRESETS:
            cone = dataclasses.replace(cone, preset=args.space, params={}, file=None)
        else:
            cone = dataclasses.replace(cone, file=args.space)
    if args.trials is not None:
        cone = dataclasses.replace(cone, trials=args.trials)
    config = dataclasses.replace(config, cone=cone)
    if args.set_seed is not None:
        config = with_overrides(config, seed=args.set_seed)
    names = tuple(item.name for item in DEFAULT_CHECKS if item.name.startswith("cone."))
    out = config.output.out if args.report else None
    return _run_checks(config, "conecover", names, out)


def cmd_suite(args: argparse.Namespace, config: ScenarioConfig) -> int:
    """Run the default certification suite."""
    report = run_suite(config)
    print(report)
    emit_report(report, config.output.out, config.output.format, config.output.timings)
    return EXIT_OK if report.passed else EXIT_FAILED


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected a nonnegative integer, got {text}")
    return value


def build_parser() -> argparse.ArgumentParser:
    """Parser with one subcommand per operation and the shared scenario flags."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="scenario JSON file (schema_version 1)")
    common.add_argument("--seed", type=_positive_int, help="corpus seed")
    common.add_argument("--out", help="output directory")
    common.add_argument("--format", choices=("json", "csv"), help="report format")
    common.add_argument("--parallel", action="store_true", help="run checks on threads")
    common.add_argument("--timings", action="store_true", help="include wall times in reports")

    parser = argparse.ArgumentParser(
        prog="tentlab",
        description="Tent spaces over Gaussian-type measures on discrete metric measure spaces.",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)

    def add(name: str, handler: Callable[..., int], space: bool = True) -> argparse.ArgumentParser:
        sub = commands.add_parser(name, parents=[common], help=handler.__doc__)
        if space:
            sub.add_argument("--space", help="preset name or space definition file")
        sub.set_defaults(handler=handler)
        return sub

    add("space", cmd_space)
    add("region", cmd_region)
    for name, handler in (("norms", cmd_norms), ("decompose", cmd_decompose)):
        sub = add(name, handler)
        sub.add_argument("--function", help="CSV file with node,value columns")
        sub.add_argument("--q", type=float, default=2.0)
        if name == "norms":
            sub.add_argument("--p", type=float, default=2.0)
            sub.add_argument("--alpha", type=float, default=1.0)
    add("verify-atoms", cmd_verify_atoms)
    maximal = add("maximal", cmd_maximal)
    maximal.add_argument("--alpha", type=float)
    maximal.add_argument("--op", choices=sorted(MAXIMAL_CHECKS), default="dyadic")
    maximal.add_argument("--report", metavar="DIR", help="write the report files to DIR")
    conecover = add("conecover", cmd_conecover, space=False)
    conecover.add_argument("--space", help="Euclidean preset name or space definition file")
    conecover.add_argument("--set-seed", type=_positive_int, help="seed of the random sets")
    conecover.add_argument("--trials", type=int)
    conecover.add_argument("--report", action="store_true", help="write the report files")
    add("suite", cmd_suite)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """Run the command line; returns the exit code (0 pass, 1 check failure, 2 usage error)."""
    _configure_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as err:
        return int(err.code) if isinstance(err.code, int) else EXIT_USAGE
    try:
        config = load_config(args.config) if args.config else ScenarioConfig()
        config = with_overrides(
            config,
            seed=args.seed,
            out=args.out,
            fmt=args.format,
            parallel=True if args.parallel else None,
            timings=True if args.timings else None,
        )
        if getattr(args, "space", None) is not None and args.command != "conecover":
            config = dataclasses.replace(config, space=_space_config(args.space))
        return args.handler(args, config)
    except TentlabError as err:
        print(f"tentlab: {err}", file=sys.stderr)
        return EXIT_USAGE
