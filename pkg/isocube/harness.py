"""Verification suites and their reports.

A suite turns its parameters and seed into a list of trial descriptors:
small JSON documents that fully determine one trial input. Each descriptor
is evaluated independently into a set of checks (an observed quantity
against a bound). Because descriptors are plain data, any failure witness
can be replayed later with :func:`replay`.
"""

import contextlib
import csv
import dataclasses
import functools
import io
import itertools
import json
import math
import pathlib
import time
from typing import Callable, Dict, List, NamedTuple, Optional, Sequence, Tuple, Union

import numpy as np

from . import logging, parallel
from .cubeset import (
    ENUMERATION_MAX_DIMENSION,
    CubeSet,
    GeneratorSpec,
    SubCube,
    generate,
    harper_segment,
    is_subcube,
    union_of,
    write_text,
)
from .decomposition import (
    decompose,
    max_influence_coordinate,
    split_bookkeeping,
    verify_decomposition,
)
from .exceptions import CapabilityError, GenerationError, InputError, IsoCubeError
from .hypercontractivity import (
    PseudoBooleanFn,
    inner_product,
    lp_norm,
    operator_expectation,
    polyanskiy_check,
    sparse_section_expectation,
    spherical_average,
    valid_radii,
)
from .isoperimetry import (
    edge_boundary,
    ellis_check,
    influence_profile,
    iso_excess,
    min_boundary_oracle,
    talagrand_ratio,
)
from .options import (
    REPORT_TIMING,
    SUBCUBE_TOLERANCE,
    SUITE_MIN_DIM,
    TOLERANCE,
    WORKERS,
)
from .sections import (
    boundary_identity,
    complement_cover,
    is_product,
    mutual_information,
    product_structure,
    section_tables,
    sectional_control,
    shearer_check,
)
from .types import JSON, Options

Descriptor = Dict[str, JSON]

OPERATOR_TOLERANCE = 1e-12
SPARSE_DENSITIES = (2.0**-10, 0.1, 0.5, 0.9)
PRODUCT_EPSILONS = (0.25, 0.5)
MAX_PLANTED_CUBES = 8
NOISE_RATES = (0.0, 0.02)


@dataclasses.dataclass(frozen=True)
class SuiteParams:
    """Parameters shared by every suite.

    ``n`` holds one or more dimensions; in random mode trial ``t`` uses
    ``n[t % len(n)]``.
    """

    n: Tuple[int, ...]
    mode: str = "random"
    samples: int = 100
    eps: float = 0.1

    def validate(self) -> None:
        if self.mode not in ("exhaustive", "random"):
            raise InputError(f"unknown mode {self.mode!r}", "SuiteParams")
        if not self.n or any(not 1 <= n <= 24 for n in self.n):
            raise InputError(
                f"dimensions {list(self.n)} outside [1, 24]", "SuiteParams"
            )
        if self.samples < 0:
            raise InputError(f"negative sample count {self.samples}", "SuiteParams")
        if not 0 < self.eps < math.inf:
            raise InputError(
                f"eps={self.eps} must be positive and finite", "SuiteParams"
            )

    def to_json(self) -> Dict[str, JSON]:
        return {
            "n": list(self.n),
            "mode": self.mode,
            "samples": self.samples,
            "eps": self.eps,
        }


def _finite_or_none(value: Optional[float]) -> Optional[float]:
    # strict JSON has no token for ±inf or nan
    return value if value is not None and math.isfinite(value) else None


class Check(NamedTuple):
    name: str
    observed: float
    bound: float
    margin: float
    passed: bool
    note: str = ""


@dataclasses.dataclass(frozen=True)
class Witness:
    """A failed check together with everything needed to reproduce it."""

    suite: str
    input_id: str
    check: str
    observed: float
    bound: float
    input: Descriptor
    note: str = ""

    def to_json(self) -> Dict[str, JSON]:
        witness: Dict[str, JSON] = {
            "input_id": self.input_id,
            "check": self.check,
            "observed": _finite_or_none(self.observed),
            "bound": _finite_or_none(self.bound),
            "input": self.input,
        }
        if self.note:
            witness["note"] = self.note
        return witness


class TrialRow(NamedTuple):
    input_id: str
    quantity: float
    bound: float
    margin: float
    passed: bool


@dataclasses.dataclass
class SuiteReport:
    suite: str
    params: SuiteParams
    seed: int
    trials: int
    failures: int
    witnesses: List[Witness]
    empirical_constants: Dict[str, Optional[float]]
    rows: List[TrialRow]
    wall_time: float

    def to_json(self, include_timing: bool = False) -> Dict[str, JSON]:
        report: Dict[str, JSON] = {
            "suite": self.suite,
            "params": self.params.to_json(),
            "seed": self.seed,
            "trials": self.trials,
            "failures": self.failures,
            "witnesses": [witness.to_json() for witness in self.witnesses],
            "empirical_constants": {
                key: _finite_or_none(value)
                for key, value in self.empirical_constants.items()
            },
        }
        if include_timing:
            report["wall_time"] = self.wall_time
        return report


class _Outcome(NamedTuple):
    row: Optional[TrialRow]
    failed: List[Check]
    observations: Dict[str, float]


class _Suite(NamedTuple):
    trials: Callable[[SuiteParams, int, Options], List[Descriptor]]
    evaluate: Callable[[Descriptor, Options], Tuple[List[Check], Dict[str, float]]]
    constants: Dict[str, str]


def _at_most(name: str, observed: float, bound: float, tolerance: float) -> Check:
    margin = bound - observed
    return Check(name, observed, bound, margin, margin >= -tolerance)


def _at_least(name: str, observed: float, bound: float, tolerance: float) -> Check:
    margin = observed - bound
    return Check(name, observed, bound, margin, margin >= -tolerance)


def _equal(
    name: str, observed: float, expected: float, tolerance: float = 0.0
) -> Check:
    gap = abs(observed - expected)
    return Check(name, observed, expected, -gap if gap else 0.0, gap <= tolerance)


def _label(coords: Sequence[int]) -> str:
    return ",".join(str(c) for c in coords)


def _trial_seeds(seed: int, count: int) -> List[int]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1, dtype=np.uint64)[0]) for child in children]


def _exhaustive_dimension(params: SuiteParams) -> int:
    if len(params.n) != 1 or params.n[0] > ENUMERATION_MAX_DIMENSION:
        raise CapabilityError(
            f"exhaustive mode enumerates every subset and needs a single "
            f"n <= {ENUMERATION_MAX_DIMENSION}, got {list(params.n)}",
            "run_suite",
        )
    return params.n[0]


def _dimension(params: SuiteParams, trial: int) -> int:
    return params.n[trial % len(params.n)]


def _every_subset(n: int) -> List[Descriptor]:
    width = max(1, (1 << n) // 8)
    return [
        {"set": {"n": n, "bits_hex": mask.to_bytes(width, "little").hex()}}
        for mask in range(1 << (1 << n))
    ]


def _random_sets(
    params: SuiteParams,
    seed: int,
    density: Callable[[int, np.random.Generator], float],
    dimension: Optional[Callable[[int, np.random.Generator], int]] = None,
) -> List[Descriptor]:
    descriptors = []
    for trial, trial_seed in enumerate(_trial_seeds(seed, params.samples)):
        rng = np.random.default_rng(trial_seed)
        n = dimension(trial, rng) if dimension else _dimension(params, trial)
        descriptors.append(
            {
                "gen": {
                    "kind": "density-random",
                    "n": n,
                    "density": density(trial, rng),
                    "seed": trial_seed,
                }
            }
        )
    return descriptors


def _uniform_density(trial: int, rng: np.random.Generator) -> float:
    return float(rng.uniform(0.05, 0.95))


def _set_trials(
    params: SuiteParams, seed: int, options: Options
) -> List[Descriptor]:
    if params.mode == "exhaustive":
        return _every_subset(_exhaustive_dimension(params))
    return _random_sets(params, seed, _uniform_density)


def _load(
    descriptor: Descriptor, options: Optional[Options] = None
) -> Tuple[CubeSet, List[SubCube]]:
    if "set" in descriptor:
        data = descriptor["set"]
        return CubeSet.from_bits_hex(data["n"], data["bits_hex"]), []  # type: ignore
    spec = dict(descriptor["gen"])  # type: ignore [arg-type]
    if "planted" in spec:
        spec["planted"] = tuple(
            SubCube.from_json(spec["n"], cube) for cube in spec["planted"]
        )
    return generate(GeneratorSpec(**spec), options)


def _iso_evaluate(descriptor: Descriptor, options: Options):
    a, _ = _load(descriptor)
    if a.is_empty:
        return [_equal("boundary", edge_boundary(a), 0)], {}
    report = iso_excess(a)
    checks = [_at_least("excess", report.excess, 0.0, TOLERANCE(options))]
    observations = {"min_excess": report.excess}
    if is_subcube(a) is not None:
        checks.append(
            _at_most("subcube_excess", report.excess, SUBCUBE_TOLERANCE(options), 0.0)
        )
        observations["subcubes"] = 1.0
    return checks, observations


def _harper_trials(
    params: SuiteParams, seed: int, options: Options
) -> List[Descriptor]:
    if params.mode == "exhaustive":
        n = _exhaustive_dimension(params)
        return [{"harper": {"n": n, "m": m}} for m in range((1 << n) + 1)]
    return _random_sets(params, seed, _uniform_density)


def _harper_evaluate(descriptor: Descriptor, options: Options):
    if "harper" in descriptor:
        n, m = descriptor["harper"]["n"], descriptor["harper"]["m"]  # type: ignore
        segment = harper_segment(n, m)
        oracle = min_boundary_oracle(n, m, options)
        checks = [
            _equal("segment_is_extremal", edge_boundary(segment), oracle),
            _equal(
                "complement_symmetry",
                edge_boundary(segment.complement()),
                edge_boundary(segment),
            ),
        ]
        return checks, {}
    a, _ = _load(descriptor)
    segment = harper_segment(a.n, a.size)
    checks = [
        _at_least("beats_segment", edge_boundary(a), edge_boundary(segment), 0.0),
        _equal(
            "complement_symmetry", edge_boundary(a.complement()), edge_boundary(a)
        ),
    ]
    return checks, {}


def _influence_trials(
    params: SuiteParams, seed: int, options: Options
) -> List[Descriptor]:
    if params.mode == "exhaustive":
        return _every_subset(_exhaustive_dimension(params))
    if len(params.n) > 1:
        return _random_sets(params, seed, _uniform_density)
    low = min(SUITE_MIN_DIM(options), params.n[0])

    def spread(trial: int, rng: np.random.Generator) -> int:
        return int(rng.integers(low, params.n[0] + 1))

    return _random_sets(params, seed, _uniform_density, spread)


def _influence_evaluate(descriptor: Descriptor, options: Options):
    a, _ = _load(descriptor)
    profile = influence_profile(a)
    boundary = edge_boundary(a)
    scaled = profile.total * (1 << a.n) / 2
    checks = [
        Check(
            "influence_identity",
            float(scaled),
            float(boundary),
            -abs(float(scaled - boundary)) if scaled != boundary else 0.0,
            scaled == boundary,
        ),
    ]
    if profile.influences:
        low, high = min(profile.influences), max(profile.influences)
        checks.append(_at_least("influence_nonnegative", float(low), 0.0, 0.0))
        checks.append(_at_most("influence_at_most_one", float(high), 1.0, 0.0))
    observations = {}
    if not (a.is_empty or a.is_full) and 8 * a.size <= 7 * (1 << a.n):
        ratio = float(max_influence_coordinate(a).ratio)
        checks.append(_at_least("max_influence_ratio", ratio, 0.0, 0.0))
        checks[-1] = checks[-1]._replace(passed=ratio > 0)
        observations["min_max_influence_ratio"] = ratio
    return checks, observations


def _talagrand_evaluate(descriptor: Descriptor, options: Options):
    a, _ = _load(descriptor)
    if a.is_empty or a.is_full:
        return [], {}
    ratio = talagrand_ratio(a).ratio
    return (
        [Check("talagrand_ratio", ratio, 0.0, ratio, ratio > 0)],
        {"min_talagrand_ratio": ratio},
    )


def _talagrand_extras(params: SuiteParams, options: Options) -> Dict[str, float]:
    n = max(params.n)
    dictator = CubeSet(n, (np.arange(1 << n) & 1).astype(bool))
    return {"dictator_ratio": talagrand_ratio(dictator).ratio}


def _ellis_evaluate(descriptor: Descriptor, options: Options):
    a, _ = _load(descriptor)
    if a.is_empty:
        return [], {}
    result = ellis_check(a, options)
    if not result.applicable:
        return [], {}
    observations = {"applicable": 1.0}
    if result.bound > 0:
        ratio = result.relative_distance / result.bound
        observations["max_distance_over_bound"] = ratio
    return (
        [
            _at_most(
                "stability_distance",
                result.relative_distance,
                result.bound,
                TOLERANCE(options),
            )
        ],
        observations,
    )


def _set_partitions(coords: Sequence[int]) -> List[List[List[int]]]:
    if not coords:
        return [[]]
    first, rest = coords[0], coords[1:]
    partitions = []
    for partition in _set_partitions(rest):
        partitions.append([[first]] + partition)
        for k in range(len(partition)):
            partitions.append(
                partition[:k] + [[first] + partition[k]] + partition[k + 1 :]
            )
    return partitions


def _sections_trials(
    params: SuiteParams, seed: int, options: Options
) -> List[Descriptor]:
    if params.mode == "exhaustive":
        n = _exhaustive_dimension(params)
        partitions = [
            sorted(sorted(block) for block in partition)
            for partition in _set_partitions(list(range(1, n + 1)))
            if len(partition) >= 2
        ]
        descriptors = _every_subset(n)
        for descriptor in descriptors:
            descriptor["partitions"] = partitions  # type: ignore [assignment]
        return descriptors

    descriptors = _random_sets(params, seed, _uniform_density)
    for descriptor in descriptors:
        gen = descriptor["gen"]
        rng = np.random.default_rng(gen["seed"] + 1)  # type: ignore
        n = gen["n"]  # type: ignore
        blocks = int(rng.integers(2, n + 1)) if n >= 2 else 1
        labels = rng.integers(0, blocks, size=n)
        partition = [
            [k + 1 for k in range(n) if labels[k] == label]
            for label in range(blocks)
            if (labels == label).any()
        ]
        descriptor["partitions"] = [partition]
    return descriptors


def _sections_evaluate(descriptor: Descriptor, options: Options):
    a, _ = _load(descriptor)
    if a.is_empty:
        return [], {}
    tolerance = TOLERANCE(options)
    checks = []
    observations: Dict[str, float] = {}
    partitions = descriptor["partitions"]
    tables = section_tables(
        a, [block for partition in partitions for block in partition]  # type: ignore
    )
    for partition in partitions:  # type: ignore
        tag = "|".join(_label(block) for block in partition)
        control = sectional_control(a, partition, options, tables)
        checks.append(
            _at_most(f"entropy_sum[{tag}]", control.lhs_i, control.k, tolerance)
        )
        checks.append(
            _at_most(f"excess_sum[{tag}]", control.lhs_ii, control.k, tolerance)
        )
        checks.append(
            Check(
                f"boundary_split[{tag}]",
                float(control.boundary_split_exact),
                1.0,
                0.0 if control.boundary_split_exact else -1.0,
                control.boundary_split_exact,
            )
        )
        cover = complement_cover(partition, a.n)
        shearer = shearer_check(a, cover, len(partition) - 1, options, tables)
        checks.append(_at_least(f"shearer[{tag}]", shearer.lhs, shearer.rhs, tolerance))
        observations["max_entropy_gap"] = max(
            observations.get("max_entropy_gap", -math.inf), control.lhs_i - control.k
        )
        observations["max_excess_gap"] = max(
            observations.get("max_excess_gap", -math.inf), control.lhs_ii - control.k
        )
    for block in sorted(tables):
        lhs, rhs = boundary_identity(a, block, tables)
        checks.append(_equal(f"identity[{_label(block)}]", float(lhs), rhs, tolerance))
    return checks, observations


def _bipartitions(n: int) -> List[Tuple[int, ...]]:
    return [
        i_coords
        for size in range(1, n)
        for i_coords in itertools.combinations(range(1, n + 1), size)
    ]


def _product_evaluate(descriptor: Descriptor, options: Options):
    a, _ = _load(descriptor)
    if a.is_empty or a.n < 2:
        return [], {}
    tolerance = TOLERANCE(options)
    checks = []
    smallest = math.inf
    for i_coords in _bipartitions(a.n):
        tag = _label(i_coords)
        information = mutual_information(a, i_coords)
        smallest = min(smallest, information)
        checks.append(_at_least(f"mi_nonnegative[{tag}]", information, 0.0, tolerance))
        product = is_product(a, i_coords)
        vanishes = abs(information) <= tolerance
        checks.append(
            Check(
                f"mi_zero_iff_product[{tag}]",
                information,
                0.0,
                0.0,
                product == vanishes,
            )
        )
        for eps in PRODUCT_EPSILONS:
            result = product_structure(a, i_coords, eps, options)
            checks.append(
                _at_least(
                    f"good_count[{tag}]@{eps}",
                    result.good_count,
                    (1.0 - eps) * a.size,
                    tolerance,
                )
            )
    return checks, {"min_mutual_information": smallest}


def _hyper_trials(
    params: SuiteParams, seed: int, options: Options
) -> List[Descriptor]:
    if params.mode == "exhaustive":
        n = _exhaustive_dimension(params)
        return [
            dict(descriptor, ell=ell)
            for descriptor in _every_subset(n)
            for ell in valid_radii(n)
        ]
    descriptors = []
    for trial, trial_seed in enumerate(_trial_seeds(seed, params.samples)):
        n = _dimension(params, trial)
        for ell in valid_radii(n):
            descriptors.append({"function": {"n": n, "seed": trial_seed}, "ell": ell})
    return descriptors


def _hyper_functions(descriptor: Descriptor) -> Tuple[PseudoBooleanFn, PseudoBooleanFn]:
    if "function" in descriptor:
        spec = descriptor["function"]
        n, seed = spec["n"], spec["seed"]  # type: ignore
        rng = np.random.default_rng(seed)
        f = PseudoBooleanFn(n, rng.uniform(-1.0, 1.0, size=1 << n))
        g = PseudoBooleanFn(n, rng.uniform(-1.0, 1.0, size=1 << n))
        return f, g
    a, _ = _load(descriptor)
    f = PseudoBooleanFn.indicator(a)
    return f, PseudoBooleanFn.indicator(a.complement())


def _hyper_evaluate(descriptor: Descriptor, options: Options):
    f, g = _hyper_functions(descriptor)
    ell = int(descriptor["ell"])  # type: ignore [arg-type]
    averaged = spherical_average(f, ell)
    norms = polyanskiy_check(f, ell, options)
    adjoint = inner_product(f, spherical_average(g, ell))
    symmetric_gap = inner_product(averaged, g) - adjoint
    checks = [
        _at_most("polyanskiy", norms.lhs, norms.rhs, TOLERANCE(options)),
        _equal("mean_preserved", averaged.mean(), f.mean(), OPERATOR_TOLERANCE),
        _at_most(
            "sup_norm",
            lp_norm(averaged, math.inf),
            lp_norm(f, math.inf),
            OPERATOR_TOLERANCE,
        ),
        _equal("self_adjoint", symmetric_gap, 0.0, OPERATOR_TOLERANCE),
    ]
    observations = {}
    if norms.rhs > 0:
        observations["max_polyanskiy_ratio"] = norms.lhs / norms.rhs
    return checks, observations


def _sparse_trials(
    params: SuiteParams, seed: int, options: Options
) -> List[Descriptor]:
    if params.mode == "exhaustive":
        return _every_subset(_exhaustive_dimension(params))

    def cycle(trial: int, rng: np.random.Generator) -> float:
        return SPARSE_DENSITIES[trial % len(SPARSE_DENSITIES)]

    return _random_sets(params, seed, cycle)


def _sparse_evaluate(descriptor: Descriptor, options: Options):
    a, _ = _load(descriptor)
    if a.is_empty:
        return [], {}
    checks = []
    observations: Dict[str, float] = {}
    for d in range(1, int(math.floor(0.15 * a.n + 1e-12)) + 1):
        result = sparse_section_expectation(a, d, "exact", options=options)
        checks.append(
            _at_most(
                f"expectation[d={d}]",
                result.expectation,
                result.bound,
                TOLERANCE(options),
            )
        )
        checks.append(
            _equal(
                f"operator_form[d={d}]",
                operator_expectation(a, d),
                result.expectation,
                TOLERANCE(options),
            )
        )
        observations["max_expectation_over_bound"] = max(
            observations.get("max_expectation_over_bound", -math.inf),
            result.expectation / result.bound,
        )
    return checks, observations


def _placeable(n: int, cubes: int, seed: int, options: Options) -> int:
    """The largest count up to ``cubes`` that places disjointly under ``seed``."""
    while cubes > 1:
        try:
            generate(GeneratorSpec("cube-union", n, cubes=cubes, seed=seed), options)
            return cubes
        except GenerationError:
            cubes -= 1
    return cubes


def _decomp_trials(
    params: SuiteParams, seed: int, options: Options
) -> List[Descriptor]:
    if params.mode == "exhaustive":
        descriptors = _every_subset(_exhaustive_dimension(params))
        for descriptor in descriptors:
            descriptor["eps"] = params.eps
            descriptor["bookkeeping"] = True
        return descriptors

    descriptors = []
    for trial, trial_seed in enumerate(_trial_seeds(seed, params.samples)):
        rng = np.random.default_rng(trial_seed)
        n = _dimension(params, trial)
        drawn = int(rng.integers(1, MAX_PLANTED_CUBES + 1))
        cubes = _placeable(n, drawn, trial_seed, options)
        descriptors.append(
            {
                "gen": {
                    "kind": "cube-union",
                    "n": n,
                    "cubes": cubes,
                    "noise": NOISE_RATES[trial % len(NOISE_RATES)],
                    "seed": trial_seed,
                },
                "eps": params.eps,
            }
        )
    return descriptors


def _decomp_evaluate(descriptor: Descriptor, options: Options):
    a, planted = _load(descriptor, options)
    eps = float(descriptor["eps"])  # type: ignore [arg-type]
    tolerance = TOLERANCE(options)
    checks = []
    observations: Dict[str, float] = {}

    if descriptor.get("bookkeeping") and a.size:
        for j in range(1, a.n + 1):
            book = split_bookkeeping(a, j, options)
            residual = book.identity_residual
            checks += [
                _equal(f"split_identity[{j}]", residual, 0.0, tolerance),
                _at_least(
                    f"entropy_deficit[{j}]", book.entropy_deficit, 0.0, tolerance
                ),
                _at_least(
                    f"influence_deficit[{j}]", book.influence_deficit, 0.0, tolerance
                ),
            ]
            observations["max_identity_residual"] = max(
                observations.get("max_identity_residual", 0.0), abs(residual)
            )

    result = decompose(a, eps, options)
    verdict = verify_decomposition(a, result, eps)
    checks.append(
        Check(
            "contract",
            float(verdict.sym_diff),
            eps * a.size,
            eps * a.size - verdict.sym_diff,
            verdict.passed,
            verdict.reason or "",
        )
    )
    observations["max_cubes"] = float(len(result.cubes))
    observations["max_eps_achieved"] = result.eps_achieved

    gen = descriptor.get("gen") or {}
    if planted and gen.get("noise", 0.0) == 0.0:  # type: ignore [union-attr]
        # below one vertex the slack budget is zero at every node
        exact = decompose(a, min(eps, 0.5 / a.size), options)
        covered = union_of(a.n, exact.cubes)
        target = union_of(a.n, planted)
        mismatch = int(np.count_nonzero(covered.members != target.members))
        checks.append(_equal("exact_cover", float(mismatch), 0.0))
    return checks, observations


SUITES: Dict[str, _Suite] = {
    "iso": _Suite(_set_trials, _iso_evaluate, {"min_excess": "min", "subcubes": "sum"}),
    "harper": _Suite(_harper_trials, _harper_evaluate, {}),
    "influence": _Suite(
        _influence_trials, _influence_evaluate, {"min_max_influence_ratio": "min"}
    ),
    "talagrand": _Suite(
        _set_trials, _talagrand_evaluate, {"min_talagrand_ratio": "min"}
    ),
    "ellis": _Suite(
        _set_trials,
        _ellis_evaluate,
        {"applicable": "sum", "max_distance_over_bound": "max"},
    ),
    "sections": _Suite(
        _sections_trials,
        _sections_evaluate,
        {"max_entropy_gap": "max", "max_excess_gap": "max"},
    ),
    "product": _Suite(
        _set_trials, _product_evaluate, {"min_mutual_information": "min"}
    ),
    "hyper": _Suite(_hyper_trials, _hyper_evaluate, {"max_polyanskiy_ratio": "max"}),
    "sparse": _Suite(
        _sparse_trials, _sparse_evaluate, {"max_expectation_over_bound": "max"}
    ),
    "decomp": _Suite(
        _decomp_trials,
        _decomp_evaluate,
        {
            "max_cubes": "max",
            "max_eps_achieved": "max",
            "max_identity_residual": "max",
        },
    ),
}

_EXTRAS: Dict[str, Callable[[SuiteParams, Options], Dict[str, float]]] = {
    "talagrand": _talagrand_extras,
}

_REDUCERS: Dict[str, Callable[[List[float]], float]] = {
    "min": min,
    "max": max,
    "sum": sum,
}


def _suite(name: str) -> _Suite:
    try:
        return SUITES[name]
    except KeyError:
        raise InputError(
            f"unknown suite {name!r}; expected one of {', '.join(SUITES)}", "run_suite"
        )


def _evaluate(
    suite: _Suite, descriptor: Descriptor, options: Options
) -> Tuple[List[Check], Dict[str, float]]:
    try:
        return suite.evaluate(descriptor, options)
    except IsoCubeError as e:
        logging.ERROR(__name__, f"trial {descriptor!r} raised {e}", options)
        return [Check("error", 0.0, 0.0, -1.0, False, str(e))], {}


def _run_trial(suite: _Suite, options: Options, descriptor: Descriptor) -> _Outcome:
    checks, observations = _evaluate(suite, descriptor, options)
    row = None
    if checks:
        tightest = min(checks, key=lambda check: (check.passed, check.margin))
        row = TrialRow(
            "", tightest.observed, tightest.bound, tightest.margin, tightest.passed
        )
    return _Outcome(row, [check for check in checks if not check.passed], observations)


def run_suite(
    name: str, params: SuiteParams, seed: int, options: Optional[Options] = None
) -> SuiteReport:
    """Run every trial of a suite and collect failures and empirical constants.

    Failing instances are recorded as witnesses; the run itself only raises
    for invalid parameters.

    Raises
    ------
    CapabilityError
        If exhaustive mode is requested for n > 4.
    """
    options = options or {}
    suite = _suite(name)
    params.validate()
    if not 0 <= seed < 1 << 64:
        raise InputError(f"seed {seed} is not a 64-bit integer", "run_suite")

    started = time.perf_counter()
    descriptors = suite.trials(params, seed, options)
    logging.INFO(
        __name__, f"suite {name}: {len(descriptors)} trials ({params.mode})", options
    )

    workers = WORKERS(options)
    runtime = parallel.workers(workers) if workers > 1 else contextlib.nullcontext()
    with runtime:
        outcomes = parallel.shard_map(
            functools.partial(_run_trial, suite, options), descriptors, options
        )

    rows, witnesses = [], []
    collected: Dict[str, List[float]] = {key: [] for key in suite.constants}
    for index, (descriptor, outcome) in enumerate(zip(descriptors, outcomes)):
        input_id = f"{name}-{index}"
        if outcome.row is not None:
            rows.append(outcome.row._replace(input_id=input_id))
        for check in outcome.failed:
            witness = Witness(
                name,
                input_id,
                check.name,
                check.observed,
                check.bound,
                descriptor,
                check.note,
            )
            witnesses.append(witness)
            logging.WARNING(
                __name__,
                f"{input_id} failed {check.name}: observed {check.observed!r}, "
                f"bound {check.bound!r}",
                options,
            )
        for key, value in outcome.observations.items():
            if key in collected:
                collected[key].append(value)

    constants: Dict[str, Optional[float]] = {
        key: (_REDUCERS[suite.constants[key]](values) if values else None)
        for key, values in collected.items()
    }
    if name in _EXTRAS:
        constants.update(_EXTRAS[name](params, options))

    elapsed = time.perf_counter() - started
    logging.INFO(
        __name__,
        f"suite {name}: {len(witnesses)} failures in {len(descriptors)} trials "
        f"({elapsed:.2f}s)",
        options,
    )
    return SuiteReport(
        suite=name,
        params=params,
        seed=seed,
        trials=len(descriptors),
        failures=len(witnesses),
        witnesses=witnesses,
        empirical_constants=constants,
        rows=rows,
        wall_time=elapsed,
    )


def replay(witness: Witness, options: Optional[Options] = None) -> float:
    """Re-evaluate a witness's input and return the observed value of its check."""
    options = options or {}
    checks, _ = _evaluate(_suite(witness.suite), witness.input, options)
    for check in checks:
        if check.name == witness.check:
            return check.observed
    raise InputError(
        f"check {witness.check!r} not produced when replaying {witness.input_id}",
        "replay",
    )


def _format_float(value: float) -> str:
    return format(value, ".17g")


def report_to_json(report: SuiteReport, options: Optional[Options] = None) -> str:
    document = report.to_json(REPORT_TIMING(options or {}))
    return json.dumps(document, indent=2, allow_nan=False) + "\n"


def report_to_csv(report: SuiteReport) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["input_id", "quantity", "bound", "margin", "pass"])
    for row in report.rows:
        writer.writerow(
            [
                row.input_id,
                _format_float(row.quantity),
                _format_float(row.bound),
                _format_float(row.margin),
                "true" if row.passed else "false",
            ]
        )
    return buffer.getvalue()


def emit_report(
    report: SuiteReport,
    format: str,
    path: Union[str, pathlib.Path],
    options: Optional[Options] = None,
) -> None:
    """Write a report as JSON or as CSV with one row per trial; ``-`` is stdout."""
    if format == "json":
        text = report_to_json(report, options)
    elif format == "csv":
        text = report_to_csv(report)
    else:
        raise InputError(f"unknown report format {format!r}", "emit_report")
    write_text(path, text, "emit_report")
