"""Edge boundaries, isoperimetric excess and influences, with brute-force oracles."""

import dataclasses
import functools
import math
from fractions import Fraction
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np

from .cubeset import CubeSet, SubCube, subset_table
from .exceptions import CapabilityError, DomainError, InputError
from .options import (
    EPS0,
    EXHAUSTIVE_MAX_DIM,
    ORACLE_MAX_DIM,
    SUBCUBE_TOLERANCE,
    TOLERANCE,
)
from .types import JSON, Coordinates, Options


@dataclasses.dataclass(frozen=True)
class IsoReport:
    """Edge boundary of a nonempty set against the edge-isoperimetric bound.

    ``excess`` is K = boundary/|A| - log2(2^n/|A|), which is never negative.
    """

    boundary: int
    bound: float
    excess: float
    alpha: float

    def to_json(self) -> Dict[str, JSON]:
        return {
            "boundary": self.boundary,
            "bound": self.bound,
            "excess": self.excess,
            "alpha": self.alpha,
        }


@dataclasses.dataclass(frozen=True)
class InfluenceProfile:
    """Exact influences of the indicator of a set.

    ``influences[i - 1]`` is the fraction of vertices whose membership
    changes when coordinate ``i`` is flipped.
    """

    influences: Tuple[Fraction, ...]
    total: Fraction
    max_coordinate: Optional[int]
    max_influence: Fraction

    def to_json(self) -> Dict[str, JSON]:
        return {
            "influences": [str(i) for i in self.influences],
            "total": str(self.total),
            "max_coordinate": self.max_coordinate,
            "max_influence": str(self.max_influence),
        }


class TalagrandRatio(NamedTuple):
    sum: float
    variance: float
    ratio: float


@dataclasses.dataclass(frozen=True)
class EllisCheck:
    excess: float
    relative_distance: float
    bound: float
    applicable: bool
    holds: bool
    cube: SubCube

    def to_json(self) -> Dict[str, JSON]:
        return {
            "excess": self.excess,
            "relative_distance": self.relative_distance,
            "bound": self.bound,
            "applicable": self.applicable,
            "holds": self.holds,
            "cube": self.cube.to_json(),
        }


def directional_boundaries(a: CubeSet) -> np.ndarray:
    """Boundary edges per direction; entry ``i - 1`` counts direction ``i``."""
    counts = np.zeros(a.n, dtype=np.int64)
    for k in range(a.n):
        halves = a.members.reshape(-1, 2, 1 << k)
        counts[k] = np.count_nonzero(halves[:, 0, :] != halves[:, 1, :])
    return counts


def edge_boundary(a: CubeSet, dirs: Optional[Coordinates] = None) -> int:
    """Count edges with one endpoint in ``a`` and direction in ``dirs``.

    Example Usage
    -------------
    >>> from isocube.cubeset import make_set
    >>> edge_boundary(make_set(3, [0, 6]))
    6
    """
    counts = directional_boundaries(a)
    if dirs is None:
        return int(counts.sum())
    chosen = set(dirs)
    bad = sorted(c for c in chosen if not 1 <= c <= a.n)
    if bad:
        raise InputError(f"directions {bad} outside [1, {a.n}]", "edge_boundary")
    return int(sum(counts[c - 1] for c in chosen))


def excess_of(boundary: int, size: int, n: int) -> float:
    """K = boundary/size - log2(2^n/size) for a set of ``size`` vertices in Q_n."""
    return boundary / size - (n - math.log2(size))


def iso_excess(a: CubeSet) -> IsoReport:
    if a.is_empty:
        raise DomainError("the excess of the empty set is undefined", "iso_excess")
    boundary = edge_boundary(a)
    return IsoReport(
        boundary=boundary,
        bound=a.size * (a.n - math.log2(a.size)),
        excess=excess_of(boundary, a.size, a.n),
        alpha=a.density,
    )


def influence_profile(a: CubeSet) -> InfluenceProfile:
    """Exact influences; each boundary edge contributes two vertices out of 2^n."""
    denominator = 1 << a.n
    influences = tuple(
        Fraction(2 * int(count), denominator) for count in directional_boundaries(a)
    )
    total = sum(influences, Fraction(0))
    if not influences:
        return InfluenceProfile((), total, None, Fraction(0))
    best = max(influences)
    return InfluenceProfile(influences, total, influences.index(best) + 1, best)


def talagrand_ratio(a: CubeSet) -> TalagrandRatio:
    """Σ_i I_i/(1 - log2 I_i) against the variance α(1 - α)."""
    if a.is_empty or a.is_full:
        raise DomainError(
            "the set is constant; its variance is zero", "talagrand_ratio"
        )
    total = 0.0
    for influence in influence_profile(a).influences:
        if influence:
            value = float(influence)
            total += value / (1.0 - math.log2(value))
    variance = a.density * (1.0 - a.density)
    return TalagrandRatio(total, variance, total / variance)


def best_subcube(
    a: CubeSet, mode: str = "exhaustive", options: Optional[Options] = None
) -> Tuple[SubCube, int]:
    """Find a subcube C close to ``a`` in symmetric difference.

    Exhaustive mode minimizes |A △ C| over all 3^n subcubes, breaking ties
    by smaller codimension and then lexicographically smallest (T, z0).
    Greedy mode fixes one (coordinate, bit) at a time while that strictly
    lowers the distance.

    Raises
    ------
    CapabilityError
        If exhaustive search is requested above the configured dimension.
    """
    options = options or {}
    if mode == "exhaustive":
        limit = EXHAUSTIVE_MAX_DIM(options)
        if a.n > limit:
            raise CapabilityError(
                f"exhaustive subcube search covers n <= {limit} (3^n candidates); "
                f"use greedy mode for n={a.n}",
                "best_subcube",
            )
        return _exhaustive_best_subcube(a)
    if mode == "greedy":
        return _greedy_best_subcube(a)
    raise InputError(
        f"unknown mode {mode!r}; expected exhaustive or greedy", "best_subcube"
    )


def _exhaustive_best_subcube(a: CubeSet) -> Tuple[SubCube, int]:
    # slot 0/1 fixes the axis to that bit, slot 2 leaves it free
    overlap = a.grid.astype(np.int32)
    for axis in range(a.n):
        overlap = np.concatenate(
            [overlap, overlap.sum(axis=axis, keepdims=True)], axis=axis
        )
    codimension = np.zeros((3,) * a.n, dtype=np.int64)
    for axis in range(a.n):
        shape = [1] * a.n
        shape[axis] = 3
        codimension = codimension + np.array([1, 1, 0]).reshape(shape)
    sizes = np.left_shift(1, a.n - codimension)
    distance = a.size + sizes - 2 * overlap.astype(np.int64)

    best = int(distance.min())
    ties = distance == best
    ties &= codimension == int(codimension[ties].min())
    candidates = [
        SubCube(a.n, tuple((k + 1, int(s)) for k, s in enumerate(slots) if s != 2))
        for slots in np.argwhere(ties)
    ]
    return min(candidates, key=SubCube.sort_key), best


def _greedy_best_subcube(a: CubeSet) -> Tuple[SubCube, int]:
    fixed: Dict[int, int] = {}
    distance = (1 << a.n) - a.size
    while len(fixed) < a.n:
        free = [k for k in range(1, a.n + 1) if k not in fixed]
        index = tuple(fixed.get(k, slice(None)) for k in range(1, a.n + 1))
        sub = np.asarray(a.grid[index]).astype(np.int64)
        half = 1 << (len(free) - 1)
        step = None
        for position, coordinate in enumerate(free):
            others = tuple(p for p in range(len(free)) if p != position)
            counts = sub.sum(axis=others)
            for bit in (0, 1):
                candidate = a.size + half - 2 * int(counts[bit])
                if candidate < distance and (step is None or candidate < step[0]):
                    step = (candidate, coordinate, bit)
        if step is None:
            break
        distance, coordinate, bit = step
        fixed[coordinate] = bit
    return SubCube.from_assignment(a.n, fixed), distance


@functools.lru_cache(maxsize=None)
def _min_boundary_table(n: int) -> Tuple[int, ...]:
    subsets = subset_table(n)
    vertices = np.arange(1 << n)
    boundary = np.zeros(subsets.shape[0], dtype=np.int64)
    for k in range(n):
        neighbours = subsets[:, vertices ^ (1 << k)]
        boundary += np.count_nonzero(subsets & ~neighbours, axis=1)
    sizes = np.count_nonzero(subsets, axis=1)
    minima = np.full((1 << n) + 1, np.iinfo(np.int64).max, dtype=np.int64)
    np.minimum.at(minima, sizes, boundary)
    return tuple(int(m) for m in minima)


def min_boundary_oracle(n: int, m: int, options: Optional[Options] = None) -> int:
    """Minimum edge boundary over every subset of Q_n with ``m`` vertices.

    All 2^(2^n) subsets are swept once per dimension and bucketed by size.
    """
    limit = ORACLE_MAX_DIM(options or {})
    if n > limit:
        raise CapabilityError(
            f"the boundary oracle enumerates all subsets and covers n <= {limit}",
            "min_boundary_oracle",
        )
    if n < 0 or not 0 <= m <= 1 << n:
        raise InputError(
            f"no subsets of Q_{n} have {m} vertices", "min_boundary_oracle"
        )
    return _min_boundary_table(n)[m]


def ellis_check(a: CubeSet, options: Optional[Options] = None) -> EllisCheck:
    """Compare the closest subcube with the stability bound 3ε/log2(1/ε)."""
    options = options or {}
    report = iso_excess(a)
    mode = "exhaustive" if a.n <= EXHAUSTIVE_MAX_DIM(options) else "greedy"
    cube, distance = best_subcube(a, mode, options)

    excess = report.excess
    if abs(excess) <= SUBCUBE_TOLERANCE(options):
        excess = 0.0
    if excess == 0.0:
        bound = 0.0
    elif excess < 1.0:
        bound = 3.0 * excess / math.log2(1.0 / excess)
    else:
        bound = math.inf
    applicable = excess <= EPS0(options)
    relative = distance / a.size
    holds = not applicable or relative <= bound + TOLERANCE(options)
    return EllisCheck(report.excess, relative, bound, applicable, holds, cube)

