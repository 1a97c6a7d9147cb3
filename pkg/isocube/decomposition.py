"""Approximating a set by a disjoint union of subcubes.

The recursion splits on a coordinate of maximal influence. Each node
either closes with a base case or recurses on the two halves
A^- and A^+ (the lighter and heavier sections along the split coordinate)
with integer slack budgets that add up to the parent's, so the result
always satisfies |A △ (C_1 ∪ ... ∪ C_L)| <= floor(ε|A|).

Base cases:

- ``B1`` A is empty: no cubes.
- ``B2`` A is the whole cube: one cube.
- ``B3`` the excess is at most κ0 and the closest subcube fits the budget.
- ``B4`` the budget absorbs all of A: no cubes.

Split cases:

- ``S1`` the lighter half fits within ``drop_frac`` of the budget: drop it
  and recurse on the heavier half alone.
- ``S2`` recurse on both halves, sharing the budget in proportion
  δ = γK^-/K̃ (δ = γ when K̃ vanishes).
"""

import dataclasses
import math
from fractions import Fraction
from typing import Dict, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from . import logging
from .cubeset import CubeSet, SubCube
from .exceptions import DomainError, InputError
from .isoperimetry import best_subcube, influence_profile, iso_excess
from .options import (
    BOUND_CONSTANT,
    DROP_FRAC,
    EXH_DIM,
    EXHAUSTIVE_MAX_DIM,
    KAPPA0,
    TOLERANCE,
)
from .types import JSON, Options

CASES = ("B1", "B2", "B3", "B4", "S1", "S2")


class MaxInfluence(NamedTuple):
    coord: int
    influence: Fraction
    ratio: Fraction
    """I_j 2^n / |A|."""


@dataclasses.dataclass(frozen=True)
class SplitBookkeeping:
    """The split of the excess along one coordinate.

    With γ = |A^-|/|A| <= 1/2 and b_j the number of direction-j boundary
    edges divided by |A|, the exact identity

        γ K^- + (1 - γ) K^+ = K - (H(γ) - 2γ) - (b_j - (1 - 2γ)) = K̃

    holds and both bracketed deficits are nonnegative.
    """

    split_coord: int
    light_bit: int
    light_size: int
    heavy_size: int
    gamma: float
    k: float
    k_minus: float
    k_plus: float
    b_j: float
    h_gamma: float
    k_tilde: float
    delta: float
    degenerate: bool

    @property
    def heavy_bit(self) -> int:
        return 1 - self.light_bit

    @property
    def entropy_deficit(self) -> float:
        return self.h_gamma - 2.0 * self.gamma

    @property
    def influence_deficit(self) -> float:
        return self.b_j - (1.0 - 2.0 * self.gamma)

    @property
    def identity_residual(self) -> float:
        return (
            self.gamma * self.k_minus + (1.0 - self.gamma) * self.k_plus - self.k_tilde
        )

    def to_json(self) -> Dict[str, JSON]:
        return {
            "coord": self.split_coord,
            "gamma": self.gamma,
            "k_minus": self.k_minus,
            "k_plus": self.k_plus,
            "b_j": self.b_j,
            "h_gamma": self.h_gamma,
            "k_tilde": self.k_tilde,
            "delta": self.delta,
            "degenerate": self.degenerate,
        }


@dataclasses.dataclass
class TraceNode:
    case: str
    dimension: int
    size: int
    budget: int
    coord: Optional[int] = None
    bookkeeping: Optional[SplitBookkeeping] = None
    children: List["TraceNode"] = dataclasses.field(default_factory=list)

    def to_json(self) -> Dict[str, JSON]:
        node: Dict[str, JSON] = {
            "case": self.case,
            "coord": self.coord,
            "size": self.size,
            "budget": self.budget,
        }
        if self.bookkeeping is not None:
            book = self.bookkeeping.to_json()
            for key in ("gamma", "k_minus", "k_plus", "b_j", "k_tilde"):
                node[key] = book[key]
        if self.children:
            node["children"] = [child.to_json() for child in self.children]
        return node

    def walk(self):
        yield self
        for child in self.children:
            yield from child.walk()


@dataclasses.dataclass(frozen=True)
class DecompositionResult:
    """Disjoint subcubes approximating a set.

    ``paper_bound_L`` is 2^(2^(C (K/ε)^2)) for reference only; it overflows
    to infinity almost immediately, so ``paper_bound_log2log2`` keeps the
    exponent C (K/ε)^2. Infinite values are written as ``null`` in JSON.
    """

    n: int
    cubes: Tuple[SubCube, ...]
    sym_diff: int
    eps: float
    eps_achieved: float
    excess: float
    paper_bound_L: float
    paper_bound_log2log2: float
    trace: TraceNode

    def to_json(self) -> Dict[str, JSON]:
        return {
            "n": self.n,
            "cubes": [cube.to_json() for cube in self.cubes],
            "sym_diff": self.sym_diff,
            "eps": self.eps,
            "eps_achieved": self.eps_achieved,
            "excess": self.excess,
            "paper_bound_L": _finite_or_none(self.paper_bound_L),
            "paper_bound_log2log2": _finite_or_none(self.paper_bound_log2log2),
            "trace": self.trace.to_json(),
        }


def _finite_or_none(value: float) -> Optional[float]:
    return value if math.isfinite(value) else None


class Verification(NamedTuple):
    passed: bool
    reason: Optional[str]
    sym_diff: int

    def __bool__(self) -> bool:
        return self.passed


def max_influence_coordinate(a: CubeSet) -> MaxInfluence:
    """The coordinate of largest influence; ties go to the smallest index."""
    if a.is_empty or a.is_full:
        raise DomainError(
            "a constant set has no influential coordinate", "max_influence_coordinate"
        )
    profile = influence_profile(a)
    coord = profile.max_coordinate
    ratio = profile.max_influence * (1 << a.n) / a.size
    return MaxInfluence(coord, profile.max_influence, ratio)  # type: ignore [arg-type]


def halves(a: CubeSet, j: int) -> Tuple[CubeSet, CubeSet]:
    """The sections of ``a`` at x_j = 0 and x_j = 1, as subsets of Q_(n-1)."""
    if not 1 <= j <= a.n:
        raise InputError(f"coordinate {j} outside [1, {a.n}]", "halves")
    pairs = a.members.reshape(-1, 2, 1 << (j - 1))
    return (
        CubeSet(a.n - 1, pairs[:, 0, :].reshape(-1)),
        CubeSet(a.n - 1, pairs[:, 1, :].reshape(-1)),
    )


def _binary_entropy(gamma: float) -> float:
    if gamma <= 0.0 or gamma >= 1.0:
        return 0.0
    return -gamma * math.log2(gamma) - (1.0 - gamma) * math.log2(1.0 - gamma)


def _section_excess(half: CubeSet) -> float:
    return iso_excess(half).excess if half.size else 0.0


def split_bookkeeping(
    a: CubeSet, j: int, options: Optional[Options] = None
) -> SplitBookkeeping:
    """Split the excess of ``a`` along coordinate ``j``.

    The halves are relabelled so that the lighter one is A^-, and K is
    recomputed exactly from ``a``.
    """
    if a.is_empty:
        raise DomainError("cannot split the empty set", "split_bookkeeping")
    zero, one = halves(a, j)
    light_bit = 0 if zero.size <= one.size else 1
    light, heavy = (zero, one) if light_bit == 0 else (one, zero)

    gamma = light.size / a.size
    k = iso_excess(a).excess
    k_minus = _section_excess(light)
    k_plus = _section_excess(heavy)
    b_j = int(np.count_nonzero(zero.members != one.members)) / a.size
    h_gamma = _binary_entropy(gamma)
    k_tilde = k - (h_gamma - 2.0 * gamma) - (b_j - (1.0 - 2.0 * gamma))

    if k_tilde > TOLERANCE(options or {}):
        delta = min(1.0, max(0.0, gamma * k_minus / k_tilde))
    else:
        delta = gamma
    return SplitBookkeeping(
        split_coord=j,
        light_bit=light_bit,
        light_size=light.size,
        heavy_size=heavy.size,
        gamma=gamma,
        k=k,
        k_minus=k_minus,
        k_plus=k_plus,
        b_j=b_j,
        h_gamma=h_gamma,
        k_tilde=k_tilde,
        delta=delta,
        degenerate=light.size == 0,
    )


def decompose(
    a: CubeSet, eps: float, options: Optional[Options] = None
) -> DecompositionResult:
    """Approximate ``a`` within ε|A| by pairwise disjoint subcubes.

    Example Usage
    -------------
    >>> from isocube.cubeset import SubCube, union_of
    >>> planted = [SubCube(4, ((1, 0), (2, 0))), SubCube(4, ((1, 1), (2, 1)))]
    >>> result = decompose(union_of(4, planted), 0.01)
    >>> result.cubes == tuple(planted), result.sym_diff
    (True, 0)
    """
    options = options or {}
    if not 0 < eps < math.inf:
        raise InputError(f"eps={eps} must be positive and finite", "decompose")
    drop_frac = DROP_FRAC(options)
    if not 0.0 <= drop_frac <= 1.0:
        # a dropped half larger than the budget would leave a negative slack
        raise InputError(f"drop_frac={drop_frac} outside [0, 1]", "decompose")

    budget = int(math.floor(eps * a.size))
    labels = tuple(range(1, a.n + 1))
    cubes, trace = _decompose(a, budget, labels, options)

    covered = np.zeros(1 << a.n, dtype=bool)
    index = np.arange(1 << a.n)
    for cube in cubes:
        covered |= (index & cube.mask) == cube.value
    sym_diff = int(np.count_nonzero(covered != a.members))

    excess = iso_excess(a).excess if a.size else 0.0
    ratio = max(excess, 0.0) / eps
    exponent = BOUND_CONSTANT(options) * ratio * ratio
    bound = _cube_count_bound(exponent)

    result = DecompositionResult(
        n=a.n,
        cubes=tuple(cubes),
        sym_diff=sym_diff,
        eps=eps,
        eps_achieved=sym_diff / a.size if a.size else 0.0,
        excess=excess,
        paper_bound_L=bound,
        paper_bound_log2log2=exponent,
        trace=trace,
    )
    logging.INFO(
        __name__,
        f"decomposed |A|={a.size} in Q_{a.n} into {len(cubes)} cubes "
        f"over {sum(1 for _ in trace.walk())} nodes, "
        f"|A △ ∪C|={sym_diff} (budget {budget})",
        options,
    )
    return result


def _cube_count_bound(exponent: float) -> float:
    # 2^(2^x) leaves double range once 2^x reaches 1024
    if exponent >= 10:
        return math.inf
    inner = 2.0**exponent
    return 2.0**inner if inner < 1024 else math.inf


def _decompose(
    a: CubeSet, budget: int, labels: Sequence[int], options: Options
) -> Tuple[List[SubCube], TraceNode]:
    node = TraceNode(case="", dimension=a.n, size=a.size, budget=budget)

    if a.is_empty:
        node.case = "B1"
        return [], node
    if a.is_full:
        node.case = "B2"
        return [SubCube(a.n)], node

    report = iso_excess(a)
    if report.excess <= KAPPA0(options):
        exhaustive = a.n <= min(EXH_DIM(options), EXHAUSTIVE_MAX_DIM(options))
        cube, distance = best_subcube(
            a, "exhaustive" if exhaustive else "greedy", options
        )
        if distance <= budget:
            node.case = "B3"
            return [cube], node

    if a.size <= budget:
        node.case = "B4"
        return [], node

    j = max_influence_coordinate(a).coord
    book = split_bookkeeping(a, j, options)
    node.coord = labels[j - 1]
    node.bookkeeping = book
    child_labels = tuple(label for label in labels if label != labels[j - 1])
    zero, one = halves(a, j)
    light, heavy = (zero, one) if book.light_bit == 0 else (one, zero)
    logging.DEBUG(
        __name__,
        f"split x{node.coord}: |A|={a.size} γ={book.gamma:.4f} "
        f"K={book.k:.4f} K̃={book.k_tilde:.4f} budget={budget}",
        options,
    )

    if light.size <= DROP_FRAC(options) * budget:
        node.case = "S1"
        cubes, child = _decompose(heavy, budget - light.size, child_labels, options)
        node.children = [child]
        return [cube.lift(j, book.heavy_bit) for cube in cubes], node

    node.case = "S2"
    light_budget = int(math.floor(book.delta * budget))
    budgets = {book.light_bit: light_budget, book.heavy_bit: budget - light_budget}
    cubes = []
    for bit, half in ((0, zero), (1, one)):
        side, child = _decompose(half, budgets[bit], child_labels, options)
        cubes.extend(cube.lift(j, bit) for cube in side)
        node.children.append(child)
    return cubes, node


def verify_decomposition(
    a: CubeSet, result: DecompositionResult, eps: float
) -> Verification:
    """Independently check disjointness and the ε|A| budget by full enumeration."""
    index = np.arange(1 << a.n)
    multiplicity = np.zeros(1 << a.n, dtype=np.int64)
    for cube in result.cubes:
        if cube.n != a.n:
            return Verification(False, "dimension", -1)
        multiplicity += ((index & cube.mask) == cube.value).astype(np.int64)
    sym_diff = int(np.count_nonzero((multiplicity > 0) != a.members))
    if multiplicity.max(initial=0) > 1:
        return Verification(False, "overlap", sym_diff)
    if sym_diff > eps * a.size:
        return Verification(False, "budget", sym_diff)
    if sym_diff != result.sym_diff:
        return Verification(False, "sym_diff_mismatch", sym_diff)
    return Verification(True, None, sym_diff)
