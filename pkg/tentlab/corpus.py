"""
Seeded generators and readers for tent functions, point functions and point sets
"""

import csv
import logging
from pathlib import Path
from typing import List, Optional, Union

import numpy as np

from tentlab.errors import ConfigError
from tentlab.functionals import TentFunction
from tentlab.region import RegionGrid, tent
from tentlab.spaces import Ball, DiscreteSpace, ball_members

log = logging.getLogger(__name__)


def generator(seed: int, index: int = 0) -> np.random.Generator:
    """Independent stream for item ``index`` of a corpus seeded by ``seed``."""
    return np.random.default_rng([seed, index])


def point_mass(
    region: RegionGrid, point: int, level: int, amplitude: complex = 1.0
) -> TentFunction:
    """Indicator of a single node scaled by ``amplitude``."""
    if not region.mask[point, level]:
        raise ValueError(f"Node ({point}, {level}) is outside the admissible region")
    return TentFunction.from_nodes(
        region, np.array([point]), np.array([level]), np.array([amplitude])
    )


def tent_indicator(region: RegionGrid, ball: Ball, amplitude: complex = 1.0) -> TentFunction:
    """Indicator of T(B) scaled by ``amplitude``."""
    nodes = tent(region, ball_members(region.space, ball))
    dtype = complex if isinstance(amplitude, complex) else float
    return TentFunction(region, np.where(nodes, amplitude, 0).astype(dtype))


def random_tent_function(
    region: RegionGrid,
    rng: np.random.Generator,
    n_masses: int = 4,
    n_tents: int = 2,
    complex_values: bool = False,
) -> TentFunction:
    """
    Sum of node point masses and tent indicators with log-normal amplitudes.

    Tent indicators use 1-admissible balls with radius uniform in [m(c)/4, m(c)]; masses are
    placed on uniformly drawn region nodes. Amplitudes get a uniform random phase when
    ``complex_values`` is set.
    """
    space = region.space
    points, levels = region.nodes
    dtype = complex if complex_values else float
    values = np.zeros(region.shape, dtype=dtype)

    def amplitude() -> complex:
        size = rng.lognormal(mean=0.0, sigma=1.0)
        if complex_values:
            return size * np.exp(2j * np.pi * rng.uniform())
        return size

    for node in rng.integers(0, len(points), size=n_masses):
        values[points[node], levels[node]] += amplitude()
    for center in rng.integers(0, space.n_points, size=n_tents):
        radius = space.m[center] * rng.uniform(0.25, 1.0)
        nodes = tent(region, ball_members(space, Ball(int(center), float(radius))))
        values[nodes] += amplitude()
    return TentFunction(region, values)


def random_seeded(region: RegionGrid, seed: int, index: int = 0, **params: object) -> TentFunction:
    """Item ``index`` of the random corpus seeded by ``seed``."""
    return random_tent_function(region, generator(seed, index), **params)  # type: ignore[arg-type]


def tent_corpus(
    region: RegionGrid, seed: int, size: int, complex_values: bool = False
) -> List[TentFunction]:
    """The first ``size`` items of the random corpus."""
    return [
        random_tent_function(region, generator(seed, index), complex_values=complex_values)
        for index in range(size)
    ]


def random_point_function(
    space: DiscreteSpace, rng: np.random.Generator, density: float = 0.2
) -> np.ndarray:
    """Nonnegative log-normal values on a random subset of points, zero elsewhere."""
    support = rng.uniform(size=space.n_points) < density
    support[rng.integers(space.n_points)] = True
    return np.where(support, rng.lognormal(0.0, 1.0, size=space.n_points), 0.0)


def random_point_set(
    space: DiscreteSpace,
    rng: np.random.Generator,
    n_balls: Optional[int] = None,
) -> np.ndarray:
    """Union of a few random 1-admissible balls, as a point mask (never empty)."""
    n_balls = n_balls if n_balls is not None else int(rng.integers(1, 4))
    mask = np.zeros(space.n_points, dtype=bool)
    for center in rng.integers(0, space.n_points, size=n_balls):
        radius = space.m[center] * rng.uniform(0.1, 1.0)
        mask |= space.distances[center] < radius
    return mask


def read_tent_csv(region: RegionGrid, path: Union[str, Path]) -> TentFunction:
    """
    Read a tent function from a CSV file with columns ``node,value``.

    Nodes are numbered in the region's row-major node order; values may be complex literals
    such as ``1+2j``.
    """
    nodes = region.node_list()
    indices, values = [], []
    try:
        with open(path, newline="", encoding="utf-8") as handle:
            for line, row in enumerate(csv.DictReader(handle), start=2):
                try:
                    indices.append(int(row["node"]))
                    values.append(complex(row["value"].replace(" ", "")))
                except (KeyError, TypeError, ValueError, AttributeError) as err:
                    raise ConfigError("function.csv", f"bad row: {err}", line=line) from err
    except OSError as err:
        raise ConfigError("function.csv", f"cannot read {path}: {err}") from err
    index = np.asarray(indices, dtype=np.int64)
    if index.size and (index.min() < 0 or index.max() >= len(nodes)):
        raise ConfigError("function.csv", f"node indices must lie in [0, {len(nodes)})")
    array = np.asarray(values, dtype=complex)
    if not np.any(array.imag):
        array = array.real
    log.debug("Read %d node values from %s", len(index), path)
    return TentFunction.from_nodes(region, nodes[index, 0], nodes[index, 1], array)


def write_tent_csv(function: TentFunction, path: Union[str, Path]) -> None:
    """Write the nonzero node values of a tent function as ``node,value`` rows."""
    values = function.node_values()
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle)
        writer.writerow(["node", "value"])
        for node in np.flatnonzero(values):
            writer.writerow([int(node), repr(values[node].item())])
