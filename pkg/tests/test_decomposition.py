import dataclasses
import json
import math
from fractions import Fraction

import numpy as np
import pytest

from isocube.cubeset import CubeSet, GeneratorSpec, SubCube, generate, make_set
from isocube.decomposition import (
    CASES,
    decompose,
    halves,
    max_influence_coordinate,
    split_bookkeeping,
    verify_decomposition,
)
from isocube.exceptions import DomainError, InputError


def test_max_influence_coordinate(dictator, two_cubes, pair):
    assert max_influence_coordinate(dictator) == (1, Fraction(1), Fraction(2))
    assert max_influence_coordinate(two_cubes) == (1, Fraction(1), Fraction(2))
    assert max_influence_coordinate(pair) == (1, Fraction(1, 2), Fraction(2))

    with pytest.raises(DomainError):
        max_influence_coordinate(make_set(3, []))

    with pytest.raises(DomainError):
        max_influence_coordinate(make_set(2, [0, 1, 2, 3]))


def test_halves(pair):
    zero, one = halves(pair, 1)
    assert zero.vertices().tolist() == [0, 3]
    assert one.is_empty

    zero, one = halves(pair, 3)
    assert zero.vertices().tolist() == [0]
    assert one.vertices().tolist() == [2]

    with pytest.raises(InputError):
        halves(pair, 4)


def test_split_bookkeeping(two_cubes):
    book = split_bookkeeping(two_cubes, 1)
    assert book.gamma == 0.5
    assert book.light_bit == 0
    assert book.k == 1.0
    assert book.k_minus == book.k_plus == 0.0
    assert book.b_j == 1.0
    assert book.h_gamma == 1.0
    assert book.k_tilde == 0.0
    assert book.delta == 0.5
    assert not book.degenerate


def test_split_bookkeeping_degenerate():
    half = SubCube(3, ((1, 0),)).members()
    book = split_bookkeeping(half, 1)
    assert book.gamma == 0.0
    assert book.light_bit == 1
    assert book.heavy_bit == 0
    assert book.degenerate
    assert book.b_j == 1.0
    assert book.delta == 0.0

    with pytest.raises(DomainError):
        split_bookkeeping(make_set(3, []), 1)


def test_split_identity_and_deficits():
    rng = np.random.default_rng(21)
    for _ in range(20):
        a = CubeSet(6, rng.random(64) < rng.uniform(0.1, 0.9))
        if a.is_empty:
            continue
        for j in range(1, 7):
            book = split_bookkeeping(a, j)
            assert abs(book.identity_residual) <= 1e-9
            assert book.entropy_deficit >= -1e-9
            assert book.influence_deficit >= -1e-9
            assert 0.0 <= book.delta <= 1.0


def test_decompose_planted_pair(planted, two_cubes):
    result = decompose(two_cubes, 0.01)
    assert result.cubes == tuple(planted)
    assert result.sym_diff == 0
    assert result.eps_achieved == 0.0
    assert result.excess == 1.0
    assert verify_decomposition(two_cubes, result, 0.01)


def test_decompose_single_subcube():
    cube = SubCube(4, ((1, 1), (3, 0)))
    result = decompose(cube.members(), 0.1)
    assert result.cubes == (cube,)
    assert result.trace.case == "B3"
    assert result.sym_diff == 0


def test_decompose_constant_sets():
    empty = decompose(make_set(3, []), 0.1)
    assert empty.cubes == ()
    assert empty.trace.case == "B1"
    assert empty.eps_achieved == 0.0

    full = decompose(make_set(3, list(range(8))), 0.1)
    assert full.cubes == (SubCube(3),)
    assert full.trace.case == "B2"


def test_decompose_budget_absorbs_set():
    diagonal = make_set(2, [0, 3])
    result = decompose(diagonal, 1.0)
    assert result.trace.case == "B4"
    assert result.trace.budget == 2
    assert result.cubes == ()
    assert result.sym_diff == 2
    assert verify_decomposition(diagonal, result, 1.0)


def test_decompose_drops_light_half():
    # {x1 = 1} plus the stray vertex 0000 across the split coordinate
    a = make_set(4, [0] + [v for v in range(16) if v & 1])
    result = decompose(a, 0.25)

    trace = result.trace
    assert trace.case == "S1"
    assert trace.coord == 1
    assert trace.budget == 2
    assert trace.bookkeeping.light_size == 1
    assert trace.bookkeeping.heavy_bit == 1

    (child,) = trace.children
    assert child.case == "B2"
    assert child.budget == trace.budget - trace.bookkeeping.light_size

    assert result.cubes == (SubCube(4, ((1, 1),)),)
    assert result.sym_diff == 1
    assert verify_decomposition(a, result, 0.25)


def test_decompose_rejects_drop_frac_outside_unit_interval():
    a, _ = generate(GeneratorSpec("density-random", 8, density=0.5, seed=3))
    for drop_frac in (3.0, -0.5):
        options = {"ISOCUBE": {"DECOMPOSE": {"DROP_FRAC": drop_frac}}}
        with pytest.raises(InputError):
            decompose(a, 0.1, options)

    options = {"ISOCUBE": {"DECOMPOSE": {"DROP_FRAC": 1.0}}}
    assert verify_decomposition(a, decompose(a, 0.1, options), 0.1)


def test_decomposition_json_is_strict():
    def reject(token):
        raise ValueError(f"non-finite number {token}")

    a, _ = generate(GeneratorSpec("density-random", 8, density=0.5, seed=3))
    result = decompose(a, 0.1)
    assert result.paper_bound_L == math.inf

    text = json.dumps(result.to_json(), allow_nan=False)
    document = json.loads(text, parse_constant=reject)
    assert document["paper_bound_L"] is None
    assert document["paper_bound_log2log2"] == result.paper_bound_log2log2


def test_decompose_whole_budget_drops_everything():
    a, _ = generate(GeneratorSpec("density-random", 10, density=0.3, seed=4))
    result = decompose(a, 1.0)
    assert result.sym_diff <= a.size
    assert verify_decomposition(a, result, 1.0)


def test_decompose_within_budget():
    rng = np.random.default_rng(8)
    for eps in (0.05, 0.2, 0.5):
        for _ in range(5):
            a = CubeSet(7, rng.random(128) < rng.uniform(0.05, 0.95))
            result = decompose(a, eps)
            assert result.sym_diff <= math.floor(eps * a.size)
            assert all(node.case in CASES for node in result.trace.walk())
            assert verify_decomposition(a, result, eps).passed


def test_decompose_planted_unions():
    for seed in range(5):
        a, _ = generate(GeneratorSpec("cube-union", 8, cubes=3, seed=seed))
        result = decompose(a, 0.1)
        assert verify_decomposition(a, result, 0.1)


def test_decompose_options(two_cubes):
    options = {"ISOCUBE": {"DECOMPOSE": {"EXH_DIM": 0, "KAPPA0": 0.0}}}
    result = decompose(two_cubes, 0.01, options)
    assert result.sym_diff == 0
    assert verify_decomposition(two_cubes, result, 0.01)

    with pytest.raises(InputError):
        decompose(two_cubes, 0.0)


def test_cube_count_bound_is_reported(two_cubes):
    result = decompose(two_cubes, 0.5)
    assert result.paper_bound_log2log2 == 4.0
    assert result.paper_bound_L == 2.0**16

    tight = decompose(two_cubes, 0.01)
    assert tight.paper_bound_L == math.inf
    assert tight.paper_bound_log2log2 == 10000.0


def test_verify_decomposition_reasons(two_cubes):
    result = decompose(two_cubes, 0.01)

    overlapping = dataclasses.replace(result, cubes=result.cubes + (result.cubes[0],))
    assert verify_decomposition(two_cubes, overlapping, 0.01).reason == "overlap"

    missing = dataclasses.replace(result, cubes=result.cubes[:1])
    verdict = verify_decomposition(two_cubes, missing, 0.01)
    assert not verdict
    assert verdict.reason == "budget"
    assert verdict.sym_diff == 4

    wrong_count = dataclasses.replace(result, sym_diff=3)
    assert verify_decomposition(two_cubes, wrong_count, 0.01).reason == (
        "sym_diff_mismatch"
    )

    other_dimension = dataclasses.replace(result, cubes=(SubCube(3),))
    assert verify_decomposition(two_cubes, other_dimension, 0.01).reason == "dimension"


def test_trace_json(two_cubes):
    trace = decompose(two_cubes, 0.01).trace.to_json()
    assert trace["case"] == "S2"
    assert trace["coord"] == 1
    assert trace["budget"] == 0
    assert trace["gamma"] == 0.5
    assert [child["case"] for child in trace["children"]] == ["B3", "B3"]
    assert all("gamma" not in child for child in trace["children"])
