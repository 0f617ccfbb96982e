"""Test functions on the boundary grid."""
from __future__ import annotations

import itertools

import numpy as np

from .geometry import BoundaryGrid, SampledFunction
from .quaternion import exp_unit, qmul, unit_mul
from .slices import SliceFunction


def monomial_exponents(degree: int) -> list[tuple[int, int, int, int]]:
    return [e for e in itertools.product(range(degree + 1), repeat=4) if sum(e) <= degree]


def _ipow(x: np.ndarray, k: int) -> np.ndarray:
    out = np.ones_like(x)
    for _ in range(k):
        out = out * x
    return out


class PolynomialFunction:
    """``q -> sum_alpha q^alpha c_alpha`` in the real coordinates of ``q = e^{Jt}``.

    With ``q = cos t + J sin t`` every monomial splits into a polynomial in
    the components of ``J`` times a profile in ``t``; sampling on a grid is
    then one matrix product.
    """

    def __init__(self, coeffs: np.ndarray, degree: int):
        exps = monomial_exponents(degree)
        if coeffs.shape != (len(exps), 4):
            raise ValueError("one quaternion coefficient per monomial")
        self.degree = degree
        self.coeffs = coeffs
        self.sphere_exps = sorted({e[1:] for e in exps})
        index = {e: i for i, e in enumerate(self.sphere_exps)}
        # profile of sphere monomial a: sum over e0 of cos^e0 sin^|e'| c
        self._terms = [(index[e[1:]], e[0], sum(e[1:]), c) for e, c in zip(exps, coeffs)]

    def _sphere_part(self, axes: np.ndarray) -> np.ndarray:
        # powers by repeated multiplication, so (-x)^k = (-1)^k x^k holds exactly
        powers = [np.ones(axes.shape[:-1] + (3,))]
        for _ in range(self.degree):
            powers.append(powers[-1] * axes)
        return np.stack(
            [powers[e[0]][..., 0] * powers[e[1]][..., 1] * powers[e[2]][..., 2] for e in self.sphere_exps], axis=-1
        )

    def _profiles(self, t: np.ndarray, trig=None) -> np.ndarray:
        c, s = trig if trig is not None else (np.cos(t), np.sin(t))
        out = np.zeros(t.shape + (len(self.sphere_exps), 4))
        for a, e0, es, coeff in self._terms:
            out[..., a, :] += (_ipow(c, e0) * _ipow(s, es))[..., None] * coeff
        return out

    def __call__(self, axes, t) -> np.ndarray:
        axes = np.asarray(axes, dtype=float)
        t = np.asarray(t, dtype=float)
        S = self._sphere_part(axes)
        P = self._profiles(t)
        out = 0.0
        for a in range(len(self.sphere_exps)):
            out = out + S[..., a, None] * P[..., a, :]
        return np.broadcast_to(out, np.broadcast_shapes(axes.shape[:-1], t.shape) + (4,))

    def sample(self, grid: BoundaryGrid) -> SampledFunction:
        S = self._sphere_part(grid.sphere.nodes)
        # mirrored trig tables keep the samples exactly invariant under (J, t) -> (-J, 2 pi - t)
        P = self._profiles(grid.circle.nodes, grid.circle.trig())
        vals = np.einsum("ma,ak->mk", S, P.transpose(1, 0, 2).reshape(S.shape[1], -1)).reshape(grid.shape + (4,))
        return SampledFunction(grid, vals, self)


def random_polynomial_function(grid: BoundaryGrid, rng: np.random.Generator, degree: int = 3) -> SampledFunction:
    """Seeded polynomial in the coordinates of ``q``: smooth, band limited, well defined."""
    coeffs = rng.standard_normal((len(monomial_exponents(degree)), 4))
    return PolynomialFunction(coeffs, degree).sample(grid)


def random_slice_function(grid: BoundaryGrid, rng: np.random.Generator, band: int = 4) -> SliceFunction:
    """``sum_{|n| <= band} e^{Jnt} c_n`` with random quaternion coefficients."""
    t = grid.circle.nodes
    coeffs = rng.standard_normal((2 * band + 1, 4))
    modes = np.arange(-band, band + 1)
    a = np.einsum("nk,ni->ki", np.cos(np.outer(modes, t)), coeffs)
    b = np.einsum("nk,ni->ki", np.sin(np.outer(modes, t)), coeffs)
    return SliceFunction(grid.circle, a, b)


def coordinate_function(grid: BoundaryGrid, index: int) -> SampledFunction:
    """``q -> q_index`` as a real-valued quaternion function, index 0..3."""

    def source(axes, t):
        q = exp_unit(axes, t)
        out = np.zeros(q.shape)
        out[..., 0] = q[..., index]
        return out

    return SampledFunction.from_callable(grid, source)


def constant_function(grid: BoundaryGrid, q0) -> SampledFunction:
    q0 = np.asarray(q0, dtype=float)
    return SampledFunction.from_callable(grid, lambda axes, t: np.broadcast_to(q0, np.broadcast_shapes(axes.shape[:-1], np.shape(t)) + (4,)))


def axis_field(grid: BoundaryGrid) -> SampledFunction:
    """``(J, t) -> J``; violates the double cover, used to detect ill-defined input."""

    def source(axes, t):
        shape = np.broadcast_shapes(axes.shape[:-1], np.shape(t))
        out = np.zeros(shape + (4,))
        out[..., 1:] = axes
        return out

    return SampledFunction.from_callable(grid, source)


def signed_axis_field(grid: BoundaryGrid) -> SampledFunction:
    """``(J, t) -> J sgn(sin t)``; a slice function with ``a = 0``, ``b = sgn(sin t)``."""

    def source(axes, t):
        sgn = np.sign(np.round(np.sin(t), 14))
        out = np.zeros(np.broadcast_shapes(axes.shape[:-1], np.shape(t)) + (4,))
        out[..., 1:] = axes * sgn[..., None]
        return out

    return SampledFunction.from_callable(grid, source)


def slice_exponential(grid: BoundaryGrid, mode: int = 1, right=None) -> SampledFunction:
    """``e^{J mode t} c`` for a fixed quaternion ``c`` (default 1)."""
    c = np.array([1.0, 0, 0, 0]) if right is None else np.asarray(right, dtype=float)

    def source(axes, t):
        e = exp_unit(axes, mode * np.asarray(t))
        return qmul(e, np.broadcast_to(c, e.shape))

    return SampledFunction.from_callable(grid, source)


def left_axis_times(grid: BoundaryGrid, profile) -> SampledFunction:
    """``(J, t) -> J p(t)`` for a quaternion profile ``p`` given as a callable of t."""

    def source(axes, t):
        p = np.asarray(profile(np.asarray(t, dtype=float)), dtype=float)
        shape = np.broadcast_shapes(axes.shape[:-1], p.shape[:-1])
        return unit_mul(np.broadcast_to(axes, shape + (3,)), np.broadcast_to(p, shape + (4,)))

    return SampledFunction.from_callable(grid, source)
