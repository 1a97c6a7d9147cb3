import math
from fractions import Fraction

import numpy as np
import pytest

from isocube.cubeset import (
    CubeSet,
    SubCube,
    all_subcubes,
    all_subsets,
    harper_segment,
    make_set,
)
from isocube.exceptions import CapabilityError, DomainError, InputError
from isocube.isoperimetry import (
    best_subcube,
    directional_boundaries,
    edge_boundary,
    ellis_check,
    influence_profile,
    iso_excess,
    min_boundary_oracle,
    talagrand_ratio,
)


def test_edge_boundary(pair):
    line = SubCube(3, ((1, 0), (2, 0))).members()
    assert edge_boundary(line) == 4
    assert edge_boundary(pair) == 6
    assert edge_boundary(make_set(3, list(range(8)))) == 0
    assert edge_boundary(make_set(3, [])) == 0


def test_edge_boundary_directions(pair, two_cubes):
    assert directional_boundaries(two_cubes).tolist() == [8, 8, 0, 0]
    assert edge_boundary(two_cubes, [1]) == 8
    assert edge_boundary(two_cubes, [3, 4]) == 0
    assert edge_boundary(pair, [1, 2, 3]) == edge_boundary(pair)

    with pytest.raises(InputError):
        edge_boundary(pair, [4])


def test_complement_symmetry():
    rng = np.random.default_rng(5)
    for _ in range(20):
        a = CubeSet(6, rng.random(64) < 0.3)
        assert edge_boundary(a) == edge_boundary(a.complement())


def test_iso_excess(pair, two_cubes):
    point = iso_excess(make_set(3, [5]))
    assert point.boundary == 3
    assert point.excess == 0.0

    report = iso_excess(pair)
    assert report.excess == 1.0
    assert report.alpha == 0.25
    assert report.bound == 4.0

    report = iso_excess(two_cubes)
    assert report.boundary == 16
    assert report.bound == 8.0
    assert report.excess == 1.0

    with pytest.raises(DomainError):
        iso_excess(make_set(3, []))


def test_edge_isoperimetric_inequality_q3():
    for a in all_subsets(3):
        if a.size:
            assert iso_excess(a).excess >= -1e-9


def test_subcubes_are_extremal():
    for cube in all_subcubes(4):
        assert abs(iso_excess(cube.members()).excess) <= 1e-12


def test_influence_profile(dictator, two_cubes):
    profile = influence_profile(dictator)
    assert profile.influences == (1, 0, 0, 0)
    assert profile.max_coordinate == 1

    profile = influence_profile(two_cubes)
    assert profile.influences == (1, 1, 0, 0)
    assert profile.total == 2
    assert profile.max_coordinate == 1

    profile = influence_profile(make_set(3, list(range(8))))
    assert profile.influences == (0, 0, 0)
    assert profile.total == 0


def test_influence_identity():
    rng = np.random.default_rng(9)
    for n in range(1, 9):
        a = CubeSet(n, rng.random(1 << n) < 0.5)
        profile = influence_profile(a)
        assert all(isinstance(i, Fraction) for i in profile.influences)
        assert profile.total * (1 << (n - 1)) == edge_boundary(a)


def test_talagrand_ratio(dictator, pair):
    result = talagrand_ratio(dictator)
    assert result.sum == 1.0
    assert result.variance == 0.25
    assert result.ratio == 4.0

    result = talagrand_ratio(pair)
    assert math.isclose(result.sum, 0.75)
    assert math.isclose(result.variance, 0.1875)
    assert math.isclose(result.ratio, 4.0)

    with pytest.raises(DomainError):
        talagrand_ratio(make_set(3, list(range(8))))

    with pytest.raises(DomainError):
        talagrand_ratio(make_set(3, []))


def test_best_subcube(pair):
    cube = SubCube(4, ((2, 1), (4, 0)))
    assert best_subcube(cube.members()) == (cube, 0)

    assert best_subcube(pair) == (SubCube(3, ((1, 0), (2, 0), (3, 0))), 1)

    plus_one = SubCube(4, ((1, 0), (2, 0))).members().members.copy()
    plus_one[15] = True
    assert best_subcube(CubeSet(4, plus_one)) == (SubCube(4, ((1, 0), (2, 0))), 1)


def test_best_subcube_matches_brute_force():
    rng = np.random.default_rng(1)
    cubes = list(all_subcubes(4))
    for _ in range(30):
        a = CubeSet(4, rng.random(16) < rng.uniform(0.1, 0.9))
        distances = [
            int(np.count_nonzero(cube.members().members != a.members)) for cube in cubes
        ]
        _, distance = best_subcube(a)
        assert distance == min(distances)


def test_best_subcube_greedy(pair):
    cube = SubCube(8, ((1, 1), (5, 0), (6, 1)))
    assert best_subcube(cube.members(), "greedy") == (cube, 0)

    found, distance = best_subcube(pair, "greedy")
    assert distance == int(np.count_nonzero(found.members().members != pair.members))
    assert distance >= 1


def test_best_subcube_errors(pair):
    with pytest.raises(CapabilityError):
        best_subcube(
            pair, options={"ISOCUBE": {"ISOPERIMETRY": {"EXHAUSTIVE_MAX_DIM": 2}}}
        )

    with pytest.raises(InputError):
        best_subcube(pair, "annealing")


def test_min_boundary_oracle():
    assert min_boundary_oracle(4, 8) == 8
    assert min_boundary_oracle(4, 3) == 8
    assert min_boundary_oracle(4, 0) == 0
    assert min_boundary_oracle(2, 0) == 0
    assert min_boundary_oracle(3, 8) == 0

    with pytest.raises(CapabilityError):
        min_boundary_oracle(5, 3)

    with pytest.raises(InputError):
        min_boundary_oracle(3, 9)


def test_harper_segments_are_extremal():
    for n in (1, 2, 3):
        for m in range((1 << n) + 1):
            assert edge_boundary(harper_segment(n, m)) == min_boundary_oracle(n, m)


def test_ellis_check(pair):
    cube = SubCube(4, ((3, 1),)).members()
    result = ellis_check(cube)
    assert result.excess == 0.0
    assert result.relative_distance == 0.0
    assert result.bound == 0.0
    assert result.applicable
    assert result.holds

    result = ellis_check(harper_segment(4, 8))
    assert result.excess == 0.0
    assert result.relative_distance == 0.0

    result = ellis_check(pair)
    assert result.excess == 1.0
    assert not result.applicable
    assert result.relative_distance == 0.5
    assert result.holds

    with pytest.raises(DomainError):
        ellis_check(make_set(3, []))


def test_ellis_threshold_is_configurable(pair):
    options = {"ISOCUBE": {"ELLIS": {"EPS0": 2.0}}}
    result = ellis_check(pair, options)
    assert result.applicable
    assert result.bound == math.inf
    assert result.holds
