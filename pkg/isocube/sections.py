"""Section distributions, entropies and the sectional lemmas.

For I ⊆ [n] and y ∈ {0,1}^J (J = [n] \\ I), the y-section of A is the set
of z ∈ {0,1}^I with y∘z ∈ A. The distribution α^I puts mass |A^I_y|/|A|
on y, and K^I_y is the isoperimetric excess of the section inside {0,1}^I.
"""

import dataclasses
import math
from fractions import Fraction
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from .cubeset import CubeSet, complement_coordinates, fibre_table
from .exceptions import DomainError, InputError
from .isoperimetry import edge_boundary, excess_of, iso_excess
from .options import TOLERANCE
from .types import JSON, Coordinates, Options

Mass = Union[Fraction, float, int]
Tables = Mapping[Tuple[int, ...], "SectionTable"]


@dataclasses.dataclass(frozen=True)
class SectionEntry:
    count: int
    alpha: Fraction
    excess: float
    boundary: int


@dataclasses.dataclass(frozen=True)
class SectionTable:
    """Nonempty I-sections of a set, keyed by the integer encoding of y.

    ``entropy`` is H(α^I) in bits, ``weighted_excess`` is K^I = Σ_y α^I_y K^I_y
    and ``i_boundary`` is the number of boundary edges with direction in I.
    """

    n: int
    i_coords: tuple
    size: int
    entries: Dict[int, SectionEntry]
    entropy: float
    weighted_excess: float
    i_boundary: int

    def to_json(self) -> Dict[str, JSON]:
        return {
            "i_coords": list(self.i_coords),
            "entropy": self.entropy,
            "weighted_excess": self.weighted_excess,
            "entries": {
                str(y): {
                    "count": entry.count,
                    "alpha": str(entry.alpha),
                    "excess": entry.excess,
                }
                for y, entry in self.entries.items()
            },
        }


class SectionalControl(NamedTuple):
    lhs_i: float
    lhs_ii: float
    k: float
    passed: bool
    boundary_split_exact: bool


class ShearerCheck(NamedTuple):
    lhs: float
    rhs: float
    passed: bool


class ProductStructure(NamedTuple):
    good_count: int
    threshold: float
    passed: bool
    mutual_information: float


def entropy(dist: Sequence[Mass]) -> float:
    """Shannon entropy in bits; zero masses contribute nothing.

    Example Usage
    -------------
    >>> entropy([Fraction(1, 4)] * 4)
    2.0
    """
    if any(p < 0 for p in dist):
        raise InputError("probability masses must be nonnegative", "entropy")
    if abs(float(sum(dist)) - 1.0) > 1e-12:
        raise InputError(f"masses sum to {float(sum(dist))!r}, not 1", "entropy")
    masses = np.array([float(p) for p in dist if p > 0], dtype=float)
    return float(-np.sum(masses * np.log2(masses))) + 0.0


def entropy_of_counts(counts: np.ndarray) -> float:
    """Entropy of the distribution proportional to ``counts``.

    Computed as log2(total) - Σ c log2 c / total so that exact integer
    counts lose no precision before the logarithm.
    """
    counts = counts[counts > 0].astype(np.float64)
    total = counts.sum()
    if total == 0:
        return 0.0
    return float(math.log2(total) - np.sum(counts * np.log2(counts)) / total) + 0.0


def section_counts(a: CubeSet, i_coords: Coordinates) -> np.ndarray:
    """|A^I_y| for every y ∈ {0,1}^J, in ascending encoding of y."""
    return np.count_nonzero(fibre_table(a, i_coords), axis=1)


def section_table(a: CubeSet, i_coords: Coordinates) -> SectionTable:
    if a.is_empty:
        raise DomainError(
            "sections of the empty set carry no distribution", "section_table"
        )
    i_sorted = tuple(sorted(i_coords))
    fibres = fibre_table(a, i_sorted)
    counts = np.count_nonzero(fibres, axis=1)

    boundaries = np.zeros(fibres.shape[0], dtype=np.int64)
    for k in range(len(i_sorted)):
        halves = fibres.reshape(fibres.shape[0], -1, 2, 1 << k)
        crossing = halves[:, :, 0, :] != halves[:, :, 1, :]
        boundaries += np.count_nonzero(crossing, axis=(1, 2))

    entries = {}
    weighted = 0.0
    for y in np.flatnonzero(counts):
        count, boundary = int(counts[y]), int(boundaries[y])
        alpha = Fraction(count, a.size)
        excess = excess_of(boundary, count, len(i_sorted))
        entries[int(y)] = SectionEntry(count, alpha, excess, boundary)
        weighted += count * excess
    return SectionTable(
        n=a.n,
        i_coords=i_sorted,
        size=a.size,
        entries=entries,
        entropy=entropy_of_counts(counts),
        weighted_excess=weighted / a.size,
        i_boundary=int(boundaries.sum()),
    )


def section_tables(
    a: CubeSet, blocks: Sequence[Coordinates]
) -> Dict[Tuple[int, ...], SectionTable]:
    """Section tables keyed by sorted block, each distinct block built once."""
    tables: Dict[Tuple[int, ...], SectionTable] = {}
    for block in blocks:
        key = tuple(sorted(block))
        if key not in tables:
            tables[key] = section_table(a, key)
    return tables


def _table(a: CubeSet, block: Coordinates, tables: Optional[Tables]) -> SectionTable:
    key = tuple(sorted(block))
    if tables is not None and key in tables:
        return tables[key]
    return section_table(a, key)


def mutual_information(a: CubeSet, i_coords: Coordinates) -> float:
    """H(α^I) + H(α^J) - log2|A| for the uniform distribution on ``a``."""
    i_coords = _check_bipartition(a, i_coords, "mutual_information")
    j_coords = complement_coordinates(a.n, i_coords)
    return (
        entropy_of_counts(section_counts(a, i_coords))
        + entropy_of_counts(section_counts(a, j_coords))
        - math.log2(a.size)
    )


def is_product(a: CubeSet, i_coords: Coordinates) -> bool:
    """Whether ``a`` is B × C across the split (I, J)."""
    fibres = fibre_table(a, i_coords)
    rows = np.count_nonzero(fibres.any(axis=1))
    columns = np.count_nonzero(fibres.any(axis=0))
    return rows * columns == a.size


def boundary_identity(
    a: CubeSet, i_coords: Coordinates, tables: Optional[Tables] = None
) -> tuple:
    """Both sides of |∂^I(A)| = |A| log2(2^|I|/|A|) + |A|(H(α^I) + K^I)."""
    table = _table(a, i_coords, tables)
    rhs = a.size * (len(table.i_coords) - math.log2(a.size)) + a.size * (
        table.entropy + table.weighted_excess
    )
    return edge_boundary(a, table.i_coords), rhs


def sectional_control(
    a: CubeSet,
    partition: Sequence[Coordinates],
    options: Optional[Options] = None,
    tables: Optional[Tables] = None,
) -> SectionalControl:
    """Check Σ_m H(α^{I_m}) - (M-1) log2|A| <= K and Σ_m K^{I_m} <= K.

    Also confirms that the directional boundaries of the blocks add up to
    the full boundary exactly. Blocks found in ``tables`` (as built by
    :func:`section_tables`) are not rebuilt.
    """
    options = options or {}
    blocks = [tuple(sorted(block)) for block in partition]
    covered = [c for block in blocks for c in block]
    if sorted(covered) != list(range(1, a.n + 1)):
        raise DomainError(
            f"{blocks} is not a partition of [1, {a.n}]", "sectional_control"
        )
    report = iso_excess(a)
    k = report.excess
    chosen = [_table(a, block, tables) for block in blocks]
    lhs_i = sum(t.entropy for t in chosen) - (len(blocks) - 1) * math.log2(a.size)
    lhs_ii = sum(t.weighted_excess for t in chosen)
    split_exact = sum(t.i_boundary for t in chosen) == report.boundary
    tolerance = TOLERANCE(options)
    passed = lhs_i <= k + tolerance and lhs_ii <= k + tolerance and split_exact
    return SectionalControl(lhs_i, lhs_ii, k, passed, split_exact)


def shearer_check(
    a: CubeSet,
    cover: Sequence[Coordinates],
    d_cover: int,
    options: Optional[Options] = None,
    tables: Optional[Tables] = None,
) -> ShearerCheck:
    """Σ_S H(X_S) >= D·H(X) for X uniform on ``a`` and a D-cover of [n].

    H(X_S) is the entropy of the sections over [n] \\ S, so a table in
    ``tables`` keyed by that complement is reused.
    """
    if a.is_empty:
        raise DomainError("X must be uniform on a nonempty set", "shearer_check")
    for coordinate in range(1, a.n + 1):
        hits = sum(coordinate in set(member) for member in cover)
        if hits < d_cover:
            raise DomainError(
                f"coordinate {coordinate} appears {hits} times; "
                f"a {d_cover}-cover needs {d_cover}",
                "shearer_check",
            )
    lhs = 0.0
    for member in cover:
        rest = tuple(complement_coordinates(a.n, member))
        if tables is not None and rest in tables:
            lhs += tables[rest].entropy
        else:
            lhs += entropy_of_counts(section_counts(a, rest))
    rhs = d_cover * math.log2(a.size)
    return ShearerCheck(lhs, rhs, lhs >= rhs - TOLERANCE(options or {}))


def complement_cover(partition: Sequence[Coordinates], n: int) -> List[List[int]]:
    """The complements of the blocks of a partition; an (M-1)-cover of [n]."""
    return [complement_coordinates(n, block) for block in partition]


def product_sizes(a: CubeSet, i_coords: Coordinates) -> np.ndarray:
    """|A^J_{x_I}| · |A^I_{x_J}| for every x ∈ A, ordered by y and then z."""
    fibres = fibre_table(a, i_coords)
    rows = np.count_nonzero(fibres, axis=1).astype(np.int64)
    columns = np.count_nonzero(fibres, axis=0).astype(np.int64)
    return np.outer(rows, columns)[fibres]


def product_structure(
    a: CubeSet, i_coords: Coordinates, eps: float, options: Optional[Options] = None
) -> ProductStructure:
    """Count x ∈ A with |A^J_{x_I}||A^I_{x_J}| >= |A| / (e 2^(K/ε)).

    K is the mutual information between the I and J coordinates.
    """
    if not 0.0 < eps < 1.0:
        raise InputError(f"eps={eps} outside (0, 1)", "product_structure")
    information = mutual_information(a, i_coords)
    k = max(information, 0.0)
    threshold = a.size / (math.e * 2.0 ** (k / eps))
    good = int(np.count_nonzero(product_sizes(a, i_coords) >= threshold))
    passed = good >= (1.0 - eps) * a.size - TOLERANCE(options or {})
    return ProductStructure(good, threshold, passed, information)


def product_excess_tail(a: CubeSet, i_coords: Coordinates, d: float) -> tuple:
    """Fraction of x ∈ A with b_x >= D, and its bound.

    Here b_x = |A| / (|A^J_{x_I}||A^I_{x_J}|).

    The bound (ln 2)·MI / (ln D - 1) needs D > e.
    """
    if d <= math.e:
        raise InputError(f"D={d} must exceed e", "product_excess_tail")
    information = max(mutual_information(a, i_coords), 0.0)
    ratios = a.size / product_sizes(a, i_coords)
    fraction = float(np.count_nonzero(ratios >= d)) / a.size
    return fraction, math.log(2) * information / (math.log(d) - 1.0)


def _check_bipartition(a: CubeSet, i_coords: Coordinates, source: str) -> List[int]:
    if a.is_empty:
        raise DomainError("mutual information needs a nonempty set", source)
    chosen = sorted(set(i_coords))
    if not chosen or len(chosen) >= a.n:
        raise InputError("I must be a proper nonempty subset of [n]", source)
    if any(not 1 <= c <= a.n for c in chosen):
        raise InputError(f"coordinates {chosen} outside [1, {a.n}]", source)
    return chosen
