"""Real-valued functions on the cube and the spherical averaging operator."""

import dataclasses
import itertools
import json
import math
import pathlib
from typing import Dict, Optional, Union

import numpy as np

from .cubeset import CubeSet, read_json, write_text
from .exceptions import DomainError, InputError, OutOfScopeError, SetFormatError
from .options import TOLERANCE
from .sections import section_counts
from .types import JSON, Options

HYPERCONTRACTIVE_RANGE = 0.15
"""Sphere radii and section dimensions are limited to this fraction of n."""


class PseudoBooleanFn:
    """A real-valued function on {0,1}^n, stored in vertex-index order."""

    __slots__ = ("n", "values")

    n: int
    values: np.ndarray

    def __init__(self, n: int, values) -> None:
        table = np.array(values, dtype=np.float64).reshape(-1)
        if table.shape != (1 << n,):
            raise InputError(
                f"function has {table.size} values, expected {1 << n}",
                "PseudoBooleanFn",
            )
        if not np.all(np.isfinite(table)):
            raise InputError("function values must be finite", "PseudoBooleanFn")
        table.flags.writeable = False
        self.n = n
        self.values = table

    @classmethod
    def indicator(cls, a: CubeSet) -> "PseudoBooleanFn":
        return cls(a.n, a.members.astype(np.float64))

    @classmethod
    def constant(cls, n: int, c: float) -> "PseudoBooleanFn":
        return cls(n, np.full(1 << n, c, dtype=np.float64))

    def mean(self) -> float:
        return float(np.mean(self.values))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PseudoBooleanFn):
            return NotImplemented
        return self.n == other.n and bool(np.array_equal(self.values, other.values))

    def __repr__(self) -> str:
        return f"PseudoBooleanFn(n={self.n})"


@dataclasses.dataclass(frozen=True)
class NormCheck:
    lhs: float
    rhs: float
    passed: bool


@dataclasses.dataclass(frozen=True)
class SparseSections:
    """Expected size of the section of a random member over d random coordinates.

    ``passed`` is None for sampled estimates, which are never asserted.
    """

    expectation: float
    bound: float
    passed: Optional[bool]
    standard_error: Optional[float] = None
    note: str = ""


def inner_product(f: PseudoBooleanFn, g: PseudoBooleanFn) -> float:
    """⟨f, g⟩ = 2^-n Σ_x f(x) g(x)."""
    if f.n != g.n:
        raise InputError(f"dimensions differ: {f.n} and {g.n}", "inner_product")
    return float(np.dot(f.values, g.values)) / (1 << f.n)


def lp_norm(f: PseudoBooleanFn, p: float) -> float:
    """‖f‖_p = (2^-n Σ |f|^p)^(1/p); ``p = inf`` gives max |f|."""
    if not p >= 1:
        raise InputError(f"p={p} must be at least 1", "lp_norm")
    magnitudes = np.abs(f.values)
    if math.isinf(p):
        return float(magnitudes.max())
    return float(np.mean(magnitudes**p)) ** (1.0 / p)


def spherical_average(f: PseudoBooleanFn, ell: int) -> PseudoBooleanFn:
    """S_ℓ f(x): the average of f over the Hamming sphere of radius ℓ about x.

    Spheres are enumerated by flip masks in lexicographic order so the
    floating-point sum is reproducible.
    """
    if not 0 <= ell <= f.n:
        raise InputError(f"radius {ell} outside [0, {f.n}]", "spherical_average")
    index = np.arange(1 << f.n)
    total = np.zeros(1 << f.n, dtype=np.float64)
    for flipped in itertools.combinations(range(f.n), ell):
        mask = sum(1 << k for k in flipped)
        total += f.values[index ^ mask]
    return PseudoBooleanFn(f.n, total / math.comb(f.n, ell))


def binomial_mixture(f: PseudoBooleanFn, d: int) -> PseudoBooleanFn:
    """S = 2^-d Σ_ℓ C(d, ℓ) S_ℓ: rerandomize d uniformly chosen coordinates."""
    if not 0 <= d <= f.n:
        raise InputError(f"d={d} outside [0, {f.n}]", "binomial_mixture")
    total = np.zeros(1 << f.n, dtype=np.float64)
    for ell in range(d + 1):
        total += math.comb(d, ell) * spherical_average(f, ell).values
    return PseudoBooleanFn(f.n, total / (1 << d))


def polyanskiy_check(
    f: PseudoBooleanFn, ell: int, options: Optional[Options] = None
) -> NormCheck:
    """‖S_ℓ f‖_2 <= √2 ‖f‖_q with q = 1 + (1 - 2ℓ/n)^2, for ℓ <= 0.15 n.

    Raises
    ------
    OutOfScopeError
        If ℓ exceeds 0.15 n, where the inequality makes no claim, or n = 0.
    """
    if ell < 0:
        raise InputError(f"radius {ell} is negative", "polyanskiy_check")
    if f.n == 0:
        raise OutOfScopeError(
            "the exponent q is undefined for n=0", "polyanskiy_check"
        )
    if ell > HYPERCONTRACTIVE_RANGE * f.n:
        raise OutOfScopeError(
            f"radius {ell} exceeds 0.15 n = {HYPERCONTRACTIVE_RANGE * f.n:g}",
            "polyanskiy_check",
        )
    q = 1.0 + (1.0 - 2.0 * ell / f.n) ** 2
    lhs = lp_norm(spherical_average(f, ell), 2)
    rhs = math.sqrt(2.0) * lp_norm(f, q)
    return NormCheck(lhs, rhs, lhs <= rhs + TOLERANCE(options or {}))


def valid_radii(n: int) -> range:
    """Every radius ℓ with 0 <= ℓ <= 0.15 n."""
    return range(int(math.floor(HYPERCONTRACTIVE_RANGE * n + 1e-12)) + 1)


def sparse_section_bound(a: CubeSet, d: int) -> float:
    """2 α^(d/8n) 2^d."""
    return 2.0 * a.density ** (d / (8.0 * a.n)) * 2.0**d


def sparse_section_expectation(
    a: CubeSet,
    d: int,
    mode: str = "exact",
    samples: int = 0,
    seed: int = 0,
    options: Optional[Options] = None,
) -> SparseSections:
    """E_{x,I} |A^I_{x_J}| for x uniform in A and I a uniform d-subset of [n].

    Exact mode sums Σ_y |A^I_y|^2 over every I; sampled mode averages
    ``samples`` independent draws of (x, I) and reports the standard error.
    """
    if a.is_empty:
        raise DomainError(
            "x must be drawn from a nonempty set", "sparse_section_expectation"
        )
    if not 1 <= d <= HYPERCONTRACTIVE_RANGE * a.n:
        raise OutOfScopeError(
            f"d={d} outside [1, 0.15 n = {HYPERCONTRACTIVE_RANGE * a.n:g}]",
            "sparse_section_expectation",
        )
    bound = sparse_section_bound(a, d)

    if mode == "exact":
        total = 0
        for i_coords in itertools.combinations(range(1, a.n + 1), d):
            counts = section_counts(a, i_coords).astype(np.int64)
            total += int(np.dot(counts, counts))
        expectation = total / (a.size * math.comb(a.n, d))
        passed = expectation <= bound + TOLERANCE(options or {})
        return SparseSections(expectation, bound, passed)

    if mode == "sampled":
        if samples < 2:
            raise InputError(
                "sampled mode needs at least two samples", "sparse_section_expectation"
            )
        rng = np.random.default_rng(seed)
        vertices = a.vertices()
        sizes = np.empty(samples, dtype=np.float64)
        for s in range(samples):
            x = int(vertices[rng.integers(vertices.size)])
            flipped = rng.choice(a.n, size=d, replace=False)
            kept = ((1 << a.n) - 1) ^ int(sum(1 << int(k) for k in flipped))
            sizes[s] = np.count_nonzero((vertices & kept) == (x & kept))
        error = float(sizes.std(ddof=1) / math.sqrt(samples))
        return SparseSections(
            float(sizes.mean()),
            bound,
            None,
            standard_error=error,
            note=f"sampled estimate from {samples} draws; not asserted",
        )

    raise InputError(
        f"unknown mode {mode!r}; expected exact or sampled",
        "sparse_section_expectation",
    )


def operator_expectation(a: CubeSet, d: int) -> float:
    """The same expectation through the operator form 2^d α^-1 ⟨1_A, S 1_A⟩."""
    indicator = PseudoBooleanFn.indicator(a)
    mixed = binomial_mixture(indicator, d)
    return 2.0**d * inner_product(indicator, mixed) / a.density


def function_to_json(f: PseudoBooleanFn) -> Dict[str, JSON]:
    return {"n": f.n, "values": f.values.tolist()}


def function_from_json(data: JSON) -> PseudoBooleanFn:
    if not isinstance(data, dict):
        raise SetFormatError(
            "function file must be a JSON object", "function_from_json"
        )
    n, values = data.get("n"), data.get("values")
    if not isinstance(n, int) or not isinstance(values, list):
        raise SetFormatError(
            "function file needs 'n' and 'values'", "function_from_json"
        )
    try:
        return PseudoBooleanFn(n, values)
    except (TypeError, ValueError, InputError) as e:
        raise SetFormatError(f"bad function values: {e}", "function_from_json")


def load_function(path: Union[str, pathlib.Path]) -> PseudoBooleanFn:
    return function_from_json(read_json(path, "load_function"))


def dump_function(f: PseudoBooleanFn, path: Union[str, pathlib.Path]) -> None:
    write_text(path, json.dumps(function_to_json(f)) + "\n", "dump_function")
