import math

import numpy as np
import pytest

from isocube.cubeset import CubeSet, make_set
from isocube.exceptions import DomainError, InputError, OutOfScopeError, SetFormatError
from isocube.hypercontractivity import (
    PseudoBooleanFn,
    binomial_mixture,
    dump_function,
    function_from_json,
    inner_product,
    load_function,
    lp_norm,
    operator_expectation,
    polyanskiy_check,
    sparse_section_bound,
    sparse_section_expectation,
    spherical_average,
    valid_radii,
)


def _random_function(n: int, seed: int) -> PseudoBooleanFn:
    return PseudoBooleanFn(n, np.random.default_rng(seed).uniform(-1.0, 1.0, 1 << n))


def test_pseudo_boolean_fn():
    f = PseudoBooleanFn(2, [1, 2, 3, 4])
    assert f.mean() == 2.5
    assert f == PseudoBooleanFn(2, [1.0, 2.0, 3.0, 4.0])

    with pytest.raises(InputError):
        PseudoBooleanFn(2, [1, 2, 3])

    with pytest.raises(InputError):
        PseudoBooleanFn(1, [1.0, math.nan])


def test_inner_product():
    f = PseudoBooleanFn(2, [1, 2, 3, 4])
    one = PseudoBooleanFn.constant(2, 1.0)
    assert inner_product(f, one) == f.mean()

    with pytest.raises(InputError):
        inner_product(f, PseudoBooleanFn.constant(3, 1.0))


def test_lp_norm():
    a = make_set(4, [0, 3, 5, 9])
    indicator = PseudoBooleanFn.indicator(a)
    for p in (1, 1.5, 2, 3):
        assert math.isclose(lp_norm(indicator, p), 0.25 ** (1 / p))

    constant = PseudoBooleanFn.constant(3, -2.0)
    for p in (1, 2, math.inf):
        assert math.isclose(lp_norm(constant, p), 2.0)

    point = PseudoBooleanFn.indicator(make_set(8, [0]))
    assert math.isclose(lp_norm(point, 2), 2.0**-4)

    with pytest.raises(InputError):
        lp_norm(point, 0.5)


def test_spherical_average():
    one = PseudoBooleanFn.constant(5, 1.0)
    for ell in range(6):
        assert np.allclose(spherical_average(one, ell).values, 1.0)

    point = PseudoBooleanFn.indicator(make_set(5, [0]))
    averaged = spherical_average(point, 2)
    weights = np.array([bin(v).count("1") for v in range(32)])
    expected = np.where(weights == 2, 1 / math.comb(5, 2), 0.0)
    assert np.allclose(averaged.values, expected)

    assert spherical_average(point, 0) == point

    with pytest.raises(InputError):
        spherical_average(point, 6)


def test_spherical_average_is_self_adjoint():
    f, g = _random_function(6, 1), _random_function(6, 2)
    lhs = inner_product(spherical_average(f, 2), g)
    rhs = inner_product(f, spherical_average(g, 2))
    assert abs(lhs - rhs) <= 1e-12


def test_spherical_average_is_an_averaging_operator():
    f = _random_function(7, 3)
    for ell in range(8):
        averaged = spherical_average(f, ell)
        assert abs(averaged.mean() - f.mean()) <= 1e-12
        assert lp_norm(averaged, math.inf) <= lp_norm(f, math.inf) + 1e-12


def test_binomial_mixture():
    f = _random_function(5, 4)
    assert np.allclose(binomial_mixture(f, 0).values, f.values)

    mixed = binomial_mixture(f, 1)
    expected = (f.values + spherical_average(f, 1).values) / 2
    assert np.allclose(mixed.values, expected)

    with pytest.raises(InputError):
        binomial_mixture(f, 6)


def test_polyanskiy_check():
    one = PseudoBooleanFn.constant(8, 1.0)
    for ell in valid_radii(8):
        result = polyanskiy_check(one, ell)
        assert math.isclose(result.lhs, 1.0)
        assert math.isclose(result.rhs, math.sqrt(2))
        assert result.passed

    point = PseudoBooleanFn.indicator(make_set(8, [0]))
    result = polyanskiy_check(point, 1)
    assert math.isclose(result.lhs, math.sqrt(2.0**-8 / 8))
    assert math.isclose(result.rhs, math.sqrt(2) * (2.0**-8) ** (1 / 1.5625))
    assert result.passed

    f = _random_function(8, 5)
    result = polyanskiy_check(f, 0)
    assert math.isclose(result.lhs, lp_norm(f, 2))
    assert math.isclose(result.rhs, math.sqrt(2) * lp_norm(f, 2))


def test_polyanskiy_check_scope():
    point = PseudoBooleanFn.indicator(make_set(8, [0]))
    with pytest.raises(OutOfScopeError):
        polyanskiy_check(point, 2)

    with pytest.raises(InputError):
        polyanskiy_check(point, -1)

    with pytest.raises(OutOfScopeError):
        polyanskiy_check(PseudoBooleanFn.constant(0, 1.0), 0)


def test_polyanskiy_random_functions():
    for n in (8, 10):
        for seed in range(5):
            f = _random_function(n, seed)
            for ell in valid_radii(n):
                assert polyanskiy_check(f, ell).passed


def test_valid_radii():
    assert list(valid_radii(6)) == [0]
    assert list(valid_radii(8)) == [0, 1]
    assert list(valid_radii(20)) == [0, 1, 2, 3]


def test_sparse_section_expectation():
    full = make_set(8, list(range(256)))
    result = sparse_section_expectation(full, 1)
    assert result.expectation == 2.0
    assert result.bound == 4.0
    assert result.passed

    point = make_set(8, [0])
    result = sparse_section_expectation(point, 1)
    assert result.expectation == 1.0
    assert math.isclose(result.bound, 4 * 2.0**-0.125)
    assert result.passed


def test_sparse_section_operator_form():
    rng = np.random.default_rng(10)
    a = CubeSet(10, rng.random(1024) < 0.3)
    exact = sparse_section_expectation(a, 1).expectation
    assert abs(operator_expectation(a, 1) - exact) <= 1e-9


def test_sparse_section_sampled():
    rng = np.random.default_rng(12)
    a = CubeSet(8, rng.random(256) < 0.5)
    exact = sparse_section_expectation(a, 1).expectation
    first = sparse_section_expectation(a, 1, "sampled", samples=400, seed=3)
    second = sparse_section_expectation(a, 1, "sampled", samples=400, seed=3)
    assert first == second
    assert first.passed is None
    assert first.standard_error > 0
    assert abs(first.expectation - exact) <= 6 * first.standard_error


def test_sparse_section_errors():
    a = make_set(8, [0, 1])
    with pytest.raises(OutOfScopeError):
        sparse_section_expectation(a, 2)

    with pytest.raises(OutOfScopeError):
        sparse_section_expectation(a, 0)

    with pytest.raises(DomainError):
        sparse_section_expectation(make_set(8, []), 1)

    with pytest.raises(InputError):
        sparse_section_expectation(a, 1, "sampled", samples=1)

    with pytest.raises(InputError):
        sparse_section_expectation(a, 1, "approximate")


def test_sparse_section_bound():
    assert sparse_section_bound(make_set(8, list(range(256))), 1) == 4.0


def test_function_files(tmp_path):
    f = _random_function(3, 7)
    path = tmp_path / "f.json"
    dump_function(f, path)
    assert load_function(path) == f

    with pytest.raises(SetFormatError):
        function_from_json({"n": 2, "values": [1, 2]})

    with pytest.raises(SetFormatError):
        function_from_json([1, 2, 3])

    with pytest.raises(SetFormatError):
        function_from_json({"values": [1.0]})
