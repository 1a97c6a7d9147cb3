import pytest

from isocube.cubeset import CubeSet, SubCube, make_set, union_of


@pytest.fixture
def pair() -> CubeSet:
    """{000, 011} as (x1, x2, x3): vertices 0 and 6 of Q_3."""
    return make_set(3, [0, 6])


@pytest.fixture
def planted():
    return [SubCube(4, ((1, 0), (2, 0))), SubCube(4, ((1, 1), (2, 1)))]


@pytest.fixture
def two_cubes(planted) -> CubeSet:
    """{x1 = x2 = 0} together with {x1 = x2 = 1} in Q_4."""
    return union_of(4, planted)


@pytest.fixture
def dictator() -> CubeSet:
    return SubCube(4, ((1, 1),)).members()
