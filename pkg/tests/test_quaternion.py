import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from slicepi.quaternion import (
    BoundaryPoint,
    ImaginaryUnit,
    Quaternion,
    ZeroDivisorError,
    canonical_point,
    exp_unit,
    qabs,
    qconj,
    qinv,
    qmul,
    random_units,
    unit_mul,
)

ONE = np.array([1.0, 0, 0, 0])
I_ = np.array([0, 1.0, 0, 0])
J_ = np.array([0, 0, 1.0, 0])
K_ = np.array([0, 0, 0, 1.0])

finite = st.floats(-10, 10, allow_nan=False)
quats = st.tuples(finite, finite, finite, finite).map(np.array)


def test_basis_products():
    assert np.array_equal(qmul(I_, J_), K_)
    assert np.array_equal(qmul(J_, K_), I_)
    assert np.array_equal(qmul(K_, I_), J_)
    assert np.array_equal(qmul(J_, I_), -K_)
    for u in (I_, J_, K_):
        assert np.array_equal(qmul(u, u), -ONE)


def test_expanded_product():
    assert np.array_equal(qmul(ONE + I_, ONE + J_), ONE + I_ + J_ + K_)


def test_operator_wrapper():
    q = Quaternion(1, 1, 0, 0) * Quaternion(1, 0, 1, 0)
    assert q == Quaternion(1, 1, 1, 1)
    assert (2 * Quaternion(0, 1, 0, 0)).isclose([0, 2, 0, 0])
    assert Quaternion(2).inv().isclose([0.5, 0, 0, 0])


@settings(max_examples=200)
@given(quats, quats)
def test_norm_multiplicative(a, b):
    assert math.isclose(qabs(qmul(a, b)), qabs(a) * qabs(b), rel_tol=1e-14, abs_tol=1e-12)


@settings(max_examples=100)
@given(quats, quats, quats)
def test_associative(a, b, c):
    lhs = qmul(qmul(a, b), c)
    rhs = qmul(a, qmul(b, c))
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-9)


@given(quats, quats)
def test_conjugate_reverses_products(a, b):
    assert np.allclose(qconj(qmul(a, b)), qmul(qconj(b), qconj(a)), atol=1e-10)


@given(quats)
def test_q_times_conjugate_is_norm_squared(a):
    prod = qmul(a, qconj(a))
    assert math.isclose(prod[0], np.dot(a, a), rel_tol=1e-14, abs_tol=1e-12)
    assert np.allclose(prod[1:], 0.0, atol=1e-12)


def test_conjugates():
    assert np.array_equal(qconj(I_), -I_)
    assert np.array_equal(qconj([1, 1, 1, 1]), [1, -1, -1, -1])


def test_inverse():
    assert np.allclose(qinv([2.0, 0, 0, 0]), [0.5, 0, 0, 0])
    assert np.allclose(qinv(I_), -I_)
    a = ONE - qmul(I_, J_)
    assert np.allclose(qmul(qinv(a), a), ONE, atol=1e-14)
    with pytest.raises(ZeroDivisorError):
        qinv([1e-13, 0, 0, 0])


def test_unit_mul_matches_hamilton(rng):
    u = random_units(rng, 20)
    b = rng.standard_normal((20, 4))
    full = qmul(np.concatenate([np.zeros((20, 1)), u], axis=1), b)
    assert np.allclose(unit_mul(u, b), full, atol=1e-15)


def test_units_square_to_minus_one(rng):
    u = random_units(rng, 100)
    sq = unit_mul(u, np.concatenate([np.zeros((100, 1)), u], axis=1))
    assert np.abs(sq + ONE).max() <= 1e-15


def test_real_part_of_unit_product_is_minus_dot(rng):
    a, b = random_units(rng, 2)
    prod = unit_mul(a, np.concatenate([[0.0], b]))
    assert math.isclose(prod[0], -a @ b, abs_tol=1e-15)


def test_exp_unit():
    assert np.allclose(exp_unit([1, 0, 0], 0.0), ONE)
    assert np.allclose(exp_unit([1, 0, 0], math.pi / 2), I_, atol=1e-16)


def test_exp_same_slice_adds_angles(rng):
    for axis in random_units(rng, 10):
        t, s = rng.uniform(-4, 4, 2)
        assert np.allclose(qmul(exp_unit(axis, t), exp_unit(axis, s)), exp_unit(axis, t + s), atol=1e-14)
        assert math.isclose(qabs(exp_unit(axis, t)), 1.0, rel_tol=1e-15)


def test_double_cover_identity(rng):
    for axis in random_units(rng, 10):
        t = rng.uniform(0, 2 * math.pi)
        assert np.array_equal(exp_unit(-axis, -t), exp_unit(axis, t))


def test_canonical_representative(rng):
    axis = random_units(rng, 1)[0]
    q = exp_unit(-axis, 2 * math.pi - 1.0)
    ax, angle, is_real = canonical_point(q)
    assert np.allclose(ax, axis) and math.isclose(angle, 1.0) and not is_real
    _, _, flag = canonical_point(ONE)
    assert flag
    bp = BoundaryPoint.from_quaternion(q)
    assert bp.quaternion.isclose(q)


def test_imaginary_unit_rejects_non_unit():
    with pytest.raises(ValueError):
        ImaginaryUnit(1.0, 1.0, 0.0)
    assert ImaginaryUnit.normalized([0, 3, 4]).vector @ [0, 3, 4] == pytest.approx(5.0)
