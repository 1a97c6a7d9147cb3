import json

import numpy as np
import pytest

from isocube.cubeset import (
    CubeSet,
    GeneratorSpec,
    SubCube,
    all_subcubes,
    all_subsets,
    decode_assignment,
    dump_set,
    encode_assignment,
    fibre_table,
    generate,
    harper_segment,
    is_subcube,
    load_set,
    make_set,
    section,
    set_from_json,
    set_to_json,
    subcube_members,
    union_of,
)
from isocube.exceptions import (
    CapabilityError,
    GenerationError,
    InputError,
    SetFormatError,
)


def test_make_set():
    a = make_set(3, [0, 3])
    assert a.n == 3
    assert a.size == 2
    assert a.vertices().tolist() == [0, 3]
    assert 3 in a and 1 not in a

    assert make_set(3, []).is_empty
    assert make_set(2, [0, 1, 2, 3]).is_full
    assert make_set(3, [5, 5]).size == 1

    with pytest.raises(InputError):
        make_set(3, [8])

    with pytest.raises(InputError):
        make_set(25, [])


def test_cubeset_is_immutable():
    a = make_set(2, [1])
    with pytest.raises(ValueError):
        a.members[0] = True

    with pytest.raises(InputError):
        CubeSet(2, np.zeros(5, dtype=bool))


def test_zero_dimensional_cube():
    point = make_set(0, [0])
    assert point.is_full
    assert point.size == 1
    assert point.complement().is_empty


def test_grid_axes_are_coordinates():
    a = make_set(3, [1])
    assert a.grid[1, 0, 0]
    assert a.grid.sum() == 1
    assert CubeSet.from_grid(a.grid) == a


def test_complement():
    a = make_set(3, [0, 6])
    assert a.complement().size == 6
    assert a.complement().complement() == a


def test_bits_hex():
    a = make_set(3, [0, 3])
    assert a.to_bits_hex() == "09"
    assert CubeSet.from_bits_hex(3, "09") == a

    b = make_set(4, [0, 15])
    assert b.to_bits_hex() == "0180"
    assert CubeSet.from_bits_hex(4, "0180") == b

    with pytest.raises(SetFormatError):
        CubeSet.from_bits_hex(4, "01")

    with pytest.raises(SetFormatError):
        CubeSet.from_bits_hex(2, "ff")

    with pytest.raises(SetFormatError):
        CubeSet.from_bits_hex(3, "zz")


def test_subcube():
    half = SubCube(3, ((1, 0),))
    assert subcube_members(half).vertices().tolist() == [0, 2, 4, 6]
    assert half.size == 4
    assert half.codimension == 1

    point = SubCube(3, ((3, 0), (1, 0), (2, 0)))
    assert point.fixed == ((1, 0), (2, 0), (3, 0))
    assert point.members().vertices().tolist() == [0]

    assert SubCube(4).members().is_full

    with pytest.raises(InputError):
        SubCube(3, ((4, 0),))

    with pytest.raises(InputError):
        SubCube(3, ((1, 0), (1, 1)))

    with pytest.raises(InputError):
        SubCube(3, ((1, 2),))


def test_subcube_relations():
    left = SubCube(4, ((1, 0), (2, 0)))
    right = SubCube(4, ((1, 1), (2, 1)))
    assert left.disjoint(right)
    assert not left.disjoint(SubCube(4, ((3, 1),)))
    assert left.contains(0) and left.contains(12)
    assert not left.contains(1)


def test_subcube_lift():
    cube = SubCube(3, ((1, 0), (3, 1)))
    lifted = cube.lift(2, 1)
    assert lifted == SubCube(4, ((1, 0), (2, 1), (4, 1)))
    assert cube.lift(1, 0) == SubCube(4, ((1, 0), (2, 0), (4, 1)))


def test_subcube_json():
    cube = SubCube(4, ((1, 0), (2, 1)))
    assert cube.to_json() == {"fixed": [[1, 0], [2, 1]]}
    assert SubCube.from_json(4, cube.to_json()) == cube

    with pytest.raises(SetFormatError):
        SubCube.from_json(4, {"cubes": []})


def test_all_subcubes():
    cubes = list(all_subcubes(3))
    assert len(cubes) == 27
    assert len(set(cubes)) == 27


def test_all_subsets():
    subsets = list(all_subsets(2))
    assert len(subsets) == 16
    assert subsets[0].is_empty
    assert subsets[-1].is_full
    assert subsets[5].vertices().tolist() == [0, 2]

    with pytest.raises(CapabilityError):
        next(all_subsets(5))


def test_harper_segment():
    segment = harper_segment(4, 8)
    assert segment == SubCube(4, ((4, 0),)).members()
    assert harper_segment(4, 3).vertices().tolist() == [0, 1, 2]
    assert harper_segment(4, 0).is_empty

    with pytest.raises(InputError):
        harper_segment(4, 17)


def test_is_subcube(pair, two_cubes):
    assert is_subcube(SubCube(4, ((2, 1), (3, 0))).members()) == SubCube(
        4, ((2, 1), (3, 0))
    )
    assert is_subcube(make_set(4, list(range(16)))) == SubCube(4)
    assert is_subcube(pair) is None
    assert is_subcube(two_cubes) is None
    assert is_subcube(make_set(3, [])) is None


def test_section(pair):
    full = make_set(3, list(range(8)))
    assert section(full, [1, 2], {3: 1}).is_full

    assert section(pair, [1], {2: 1, 3: 1}).vertices().tolist() == [0]
    assert section(pair, [1], {2: 1, 3: 0}).is_empty
    assert section(pair, [2, 3], {1: 0}).vertices().tolist() == [0, 3]

    with pytest.raises(InputError):
        section(pair, [1], {2: 1})

    with pytest.raises(InputError):
        section(pair, [1, 2], {2: 1, 3: 0})


def test_sections_partition_the_set():
    rng = np.random.default_rng(3)
    a = CubeSet(5, rng.random(32) < 0.4)
    for i_coords in ([1], [2, 4], [1, 3, 5], [1, 2, 3, 4, 5]):
        assert fibre_table(a, i_coords).sum() == a.size


def test_fibre_table_rows_are_sections(pair):
    table = fibre_table(pair, [1])
    for y in range(4):
        assignment = decode_assignment([2, 3], y)
        assert table[y].tolist() == section(pair, [1], assignment).members.tolist()


def test_assignment_encoding():
    assert encode_assignment([2, 5], {2: 1, 5: 0}) == 1
    assert encode_assignment([5, 2], {2: 0, 5: 1}) == 2
    assert decode_assignment([2, 5], 3) == {2: 1, 5: 1}


def test_generate_cube_union(planted):
    spec = GeneratorSpec("cube-union", 4, planted=tuple(planted))
    a, cubes = generate(spec)
    assert a.size == 8
    assert cubes == planted

    spec = GeneratorSpec("cube-union", 4, noise=1.0, planted=tuple(planted))
    flipped, _ = generate(spec)
    assert flipped == a.complement()


def test_generate_random_placement():
    a, cubes = generate(GeneratorSpec("cube-union", 10, cubes=4, seed=11))
    assert len(cubes) == 4
    assert all(
        first.disjoint(second)
        for k, first in enumerate(cubes)
        for second in cubes[k + 1 :]
    )
    assert a == union_of(10, cubes)
    assert all(2 <= cube.codimension <= 5 for cube in cubes)


def test_generate_is_reproducible():
    spec = GeneratorSpec("density-random", 10, density=0.25, seed=7)
    first, _ = generate(spec)
    second, _ = generate(spec)
    assert first == second
    assert 0 <= first.size <= 1024

    other, _ = generate(GeneratorSpec("density-random", 10, density=0.25, seed=8))
    assert other != first


def test_generate_noisy_cube_and_segment():
    a, cubes = generate(GeneratorSpec("noisy-cube", 8, seed=2))
    assert len(cubes) == 1
    assert a == cubes[0].members()

    segment, cubes = generate(GeneratorSpec("harper-segment", 4, count=5))
    assert segment == harper_segment(4, 5)
    assert cubes == []


def test_generate_validation(planted):
    with pytest.raises(InputError):
        generate(GeneratorSpec("cube-union", 4))

    with pytest.raises(InputError):
        generate(GeneratorSpec("density-random", 4, density=0.5, noise=0.1))

    with pytest.raises(InputError):
        generate(GeneratorSpec("blobs", 4))

    with pytest.raises(InputError):
        generate(GeneratorSpec("cube-union", 4, planted=(planted[0], planted[0])))

    with pytest.raises(InputError):
        generate(GeneratorSpec("density-random", 4, density=1.5))


def test_generate_exhausts_retry_budget():
    # a fifth point cannot be placed disjointly in Q_2
    options = {"ISOCUBE": {"GENERATE": {"RETRY_BUDGET": 50}}}
    with pytest.raises(GenerationError):
        generate(GeneratorSpec("cube-union", 2, cubes=5, seed=1), options)


def test_set_json(tmp_path, pair):
    assert set_to_json(pair) == {"n": 3, "vertices": [0, 6], "bits_hex": "41"}
    assert set_from_json({"n": 3, "vertices": [0, 6]}) == pair
    assert set_from_json({"n": 3, "bits_hex": "41"}) == pair

    with pytest.raises(SetFormatError):
        set_from_json({"n": 3, "vertices": [0, 6], "bits_hex": "01"})

    with pytest.raises(SetFormatError):
        set_from_json({"vertices": [0]})

    with pytest.raises(SetFormatError):
        set_from_json({"n": 3})

    path = tmp_path / "pair.json"
    dump_set(pair, path)
    assert json.loads(path.read_text())["vertices"] == [0, 6]
    assert load_set(path) == pair


def test_load_set_errors(tmp_path):
    with pytest.raises(InputError):
        load_set(tmp_path / "missing.json")

    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(SetFormatError):
        load_set(bad)
