import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicepi.functions import (
    axis_field,
    constant_function,
    coordinate_function,
    random_polynomial_function,
    signed_axis_field,
)
from slicepi.geometry import (
    BoundaryGrid,
    CircleGrid,
    GridSymmetryError,
    SampledFunction,
    SphereRule,
    build_sphere_rule,
    integrate_boundary,
    integrate_sphere,
    validate_well_defined,
    worst_antipodal_pair,
)
from slicepi.quaternion import qmul


@pytest.mark.parametrize("kind", ["angle", "cos"])
def test_rule_normalized_and_centered(kind):
    rule = build_sphere_rule(10, 12, kind)
    assert np.isclose(rule.weights.sum(), 1.0, atol=1e-15)
    assert np.abs(integrate_sphere(lambda J: J, rule)).max() < 1e-15
    assert np.allclose(np.linalg.norm(rule.nodes, axis=1), 1.0, atol=1e-15)


def test_antipodes_are_exact():
    rule = build_sphere_rule(9, 14)
    assert np.array_equal(rule.nodes[rule.antipode], -rule.nodes)
    assert np.array_equal(rule.weights[rule.antipode], rule.weights)
    assert np.array_equal(rule.antipode[rule.antipode], np.arange(len(rule)))


def test_sphere_constant_cos_rule_at_64():
    rule = build_sphere_rule(64, 128, "cos")
    i = np.array([1.0, 0.0, 0.0])
    val = integrate_sphere(lambda J: np.sqrt(2.0 + 2.0 * (J @ i)), rule)
    assert abs(val - 4.0 / 3.0) < 1e-6


def test_second_moments(grid):
    assert abs(integrate_sphere(lambda J: J[:, 0] ** 2, grid.sphere) - 1.0 / 3.0) < 1e-10
    i = np.array([1.0, 0.0, 0.0])
    assert abs(integrate_sphere(lambda J: 2.0 + 2.0 * (J @ i), grid.sphere) - 2.0) < 1e-10


def test_constant_integrates_to_itself(grid):
    q0 = np.array([0.3, -1.0, 2.0, 0.5])
    assert np.allclose(integrate_sphere(np.tile(q0, (len(grid.sphere), 1)), grid.sphere), q0, atol=1e-14)


@pytest.mark.parametrize("bad", [(1, 8), (4, 7), (4, 0)])
def test_rule_rejects_bad_sizes(bad):
    with pytest.raises(ValueError):
        build_sphere_rule(*bad)


def test_rule_rejects_unknown_kind():
    with pytest.raises(ValueError):
        build_sphere_rule(4, 8, "lebedev")


def test_rule_weights_must_be_positive():
    with pytest.raises(ValueError):
        SphereRule(np.eye(3), np.array([0.5, 0.5, 0.0]))


def test_circle_grid_basics():
    c = CircleGrid(64)
    assert math.isclose(c.weights.sum(), 1.0)
    for n in (1, 5, 31):
        assert abs(np.sum(c.weights * np.exp(1j * n * c.nodes))) < 1e-14
    assert abs(np.sum(c.weights * np.cos(c.nodes) ** 2) - 0.5) < 1e-14
    # reflection t -> 2 pi - t
    assert np.allclose(np.mod(c.nodes[c.reflect] + c.nodes, 2 * np.pi), 0.0, atol=1e-12)
    assert c.index_of(np.pi) == 32


@pytest.mark.parametrize("n", [2, 7, 0])
def test_circle_grid_rejects_bad_sizes(n):
    with pytest.raises(ValueError):
        CircleGrid(n)


def test_integrate_boundary_examples(small_grid):
    assert np.allclose(integrate_boundary(constant_function(small_grid, [1, 0, 0, 0])), [1, 0, 0, 0], atol=1e-14)
    cos_t = coordinate_function(small_grid, 0)
    assert np.abs(integrate_boundary(cos_t)).max() < 1e-14
    sq = SampledFunction(small_grid, qmul(cos_t.values, cos_t.values))
    assert abs(integrate_boundary(sq)[0] - 0.5) < 1e-12


def test_integrate_boundary_right_linear(small_grid, rng):
    phi = random_polynomial_function(small_grid, rng)
    q0 = rng.standard_normal(4)
    lhs = integrate_boundary(phi.right_mul(q0))
    rhs = qmul(integrate_boundary(phi), q0)
    assert np.abs(lhs - rhs).max() < 1e-13


def test_linear_polynomials_integrate_exactly(grid, rng):
    c = rng.standard_normal(4)
    vals = c[0] + grid.sphere.nodes @ c[1:]
    assert abs(integrate_sphere(vals, grid.sphere) - c[0]) < 1e-13


def test_sphere_moment_converges_toward_closed_form():
    i = np.array([0.0, 0.0, 1.0])
    exact = 2.0 ** 1.5 / 2.5
    errs = []
    for n in (6, 12, 24, 48):
        rule = build_sphere_rule(n, 2 * n)
        errs.append(abs(integrate_sphere(lambda J: (2.0 + 2.0 * (J @ i)) ** 0.25, rule) - exact))
    assert all(b < a for a, b in zip(errs, errs[1:]))


def test_well_defined_examples(small_grid, rng):
    assert validate_well_defined(random_polynomial_function(small_grid, rng)) == 0.0
    assert math.isclose(validate_well_defined(axis_field(small_grid)), 2.0, abs_tol=1e-15)
    assert validate_well_defined(signed_axis_field(small_grid)) == 0.0


def test_worst_pair_points_at_violation(small_grid):
    phi = constant_function(small_grid, [1, 0, 0, 0])
    phi.values[3, 5] = [1.0, 0.5, 0.0, 0.0]
    m, k, d = worst_antipodal_pair(phi)
    assert (m, k) in {(3, 5), (int(small_grid.sphere.antipode[3]), int(small_grid.circle.reflect[5]))}
    assert math.isclose(d, 0.5)


def test_missing_antipodes_detected(small_grid):
    rule = small_grid.sphere
    bare = SphereRule(rule.nodes, rule.weights)
    grid = BoundaryGrid(bare, small_grid.circle)
    with pytest.raises(GridSymmetryError):
        validate_well_defined(constant_function(grid, [1, 0, 0, 0]))


def test_sampled_function_shape_checked(small_grid):
    with pytest.raises(ValueError):
        SampledFunction(small_grid, np.zeros((3, 3, 4)))


def test_grid_description(small_grid):
    d = small_grid.describe()
    assert d == {"rule": "angle", "n_polar": 12, "n_azimuth": 16, "n_t": 32}
    assert small_grid.same_as(BoundaryGrid.build(12, 16, 32))
    assert not small_grid.same_as(BoundaryGrid.build(12, 16, 64))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 12), st.integers(1, 8).map(lambda k: 2 * k))
def test_any_rule_is_a_probability_measure(n_polar, n_azimuth):
    rule = build_sphere_rule(n_polar, n_azimuth)
    assert abs(rule.weights.sum() - 1.0) < 1e-14
    assert np.array_equal(rule.nodes[rule.antipode], -rule.nodes)
