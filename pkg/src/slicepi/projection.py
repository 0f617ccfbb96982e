"""Orthogonal projection onto slice functions, computed three ways.

* :func:`project_fourier` averages per-slice Fourier coefficients over the
  sphere of imaginary units.
* :func:`project_boundary` uses the boundary kernel ``(1 - I J)``.
* :func:`project_interior` integrates the slice Poisson kernel against the
  samples at an interior point ``r e^{It}``.

All products keep the kernel on the left of the function values.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .geometry import BoundaryGrid, SampledFunction, sphere_first_moment, wsum
from .quaternion import as_axis, as_quat, pure, qabs, qconj, qmul, random_versors, unit_mul
from .slices import SliceFunction, ext_representation, poisson_kernel

MAX_REFINED_NODES = 1 << 22


def sphere_moments(phi: SampledFunction) -> tuple[np.ndarray, np.ndarray]:
    """Imaginary mean ``int phi dsigma`` and first moment ``int J phi dsigma`` per t."""
    rule = phi.grid.sphere
    return wsum(rule.weights, phi.values), sphere_first_moment(rule, phi.values)


def project_boundary(phi: SampledFunction) -> SliceFunction:
    m0, m1 = sphere_moments(phi)
    return SliceFunction(phi.grid.circle, m0, -m1)


def project_fourier(phi: SampledFunction) -> SliceFunction:
    rule = phi.grid.sphere
    n = phi.grid.circle.n
    F = np.fft.rfft(phi.values, axis=1) / n
    # averaged coefficient of mode +m is P + Q, of mode -m is P - Q
    P = wsum(rule.weights, F.real)
    Q = sphere_first_moment(rule, F.imag)
    a = np.fft.irfft(P, n=n, axis=0) * n
    b = np.fft.irfft(-1j * Q, n=n, axis=0) * n
    return SliceFunction(phi.grid.circle, a, b)


def project(phi: SampledFunction) -> SampledFunction:
    """``Pi phi`` sampled back on the grid of ``phi``."""
    return project_boundary(phi).on_grid(phi.grid)


def slice_kernel(r, axis_i, t, axis_j, s) -> np.ndarray:
    """``K(r e^{It}, e^{Js})`` from two real Poisson values and the product ``IJ``."""
    p_plus = poisson_kernel(r, np.asarray(t) + np.asarray(s))
    p_minus = poisson_kernel(r, np.asarray(t) - np.asarray(s))
    ij = qmul(pure(as_axis(axis_i)), pure(as_axis(axis_j)))
    even = 0.5 * (p_plus + p_minus)
    odd = 0.5 * (p_plus - p_minus)
    out = ij * np.asarray(odd)[..., None]
    out[..., 0] += even
    return out


def refined_size(n: int, r: float, tol: float = 1e-18) -> int:
    """Smallest ``n * 2^k`` whose aliasing error ``r^(N' - n/2)`` is below ``tol``."""
    size = n
    if r == 0.0:
        return size
    while r ** (size - n // 2) > tol:
        size *= 2
        if size > MAX_REFINED_NODES:
            raise ValueError(f"r={r} too close to 1 for the kernel quadrature")
    return size


def kernel_weights(r: float, t: float, n: int) -> tuple[np.ndarray, np.ndarray]:
    """Quadrature weights for the even and odd Poisson combinations.

    Returns ``(wa, wb)`` on the ``n`` circle nodes such that for every trig
    polynomial ``g`` of degree ``< n/2``::

        sum_k wa_k g(s_k) = (1/2pi) int 1/2 [P_r(t+s) + P_r(t-s)] g(s) ds

    and likewise ``wb`` with the difference. The kernel is sampled on a
    refined grid and its spectrum folded back onto the band of ``n``.
    """
    if not 0.0 <= r < 1.0:
        raise ValueError("interior radius must satisfy 0 <= r < 1")
    fine = refined_size(n, r)
    s = 2.0 * np.pi * np.arange(fine) / fine
    p_plus = poisson_kernel(r, t + s)
    p_minus = poisson_kernel(r, t - s)
    out = []
    half = n // 2
    for kern in (0.5 * (p_plus + p_minus), 0.5 * (p_plus - p_minus)):
        spec = np.fft.fft(kern) / fine
        coarse = np.empty(n, dtype=complex)
        coarse[:half] = spec[:half]
        coarse[half + 1 :] = spec[fine - half + 1 :]
        coarse[half] = 0.5 * (spec[half] + spec[fine - half])
        out.append(np.fft.ifft(coarse).real)
    return out[0], out[1]


def project_interior(phi: SampledFunction, r: float, axis, t: float) -> np.ndarray:
    """``int K(r e^{It}, e^{Js}) phi(e^{Js}) dSigma`` over the product grid.

    ``axis`` may be one unit or an array (P, 3) of units sharing ``t``.
    """
    axis = as_axis(axis)
    single = axis.ndim == 1
    axis = np.atleast_2d(axis)
    wa, wb = kernel_weights(r, t, phi.grid.circle.n)
    rule = phi.grid.sphere
    # s-sums per sphere node J, then the J-dependent factor IJ on the left
    alpha = np.einsum("k,mki->mi", wa, phi.values)
    beta = np.einsum("k,mki->mi", wb, phi.values)
    ij = qmul(pure(axis)[:, None, :], pure(rule.nodes)[None, :, :])
    integrand = alpha[None] + qmul(ij, beta[None])
    out = np.einsum("m,pmi->pi", rule.weights, integrand)
    return out[0] if single else out


def corollary_ab(phi: SampledFunction, r: float, t: float) -> tuple[np.ndarray, np.ndarray]:
    """``(A, B)`` with ``Pi phi(r e^{It}) = A + I B`` for every unit ``I``."""
    wa, wb = kernel_weights(r, t, phi.grid.circle.n)
    m0, m1 = sphere_moments(phi)
    return wa @ m0, wb @ m1


def _t_index(phi: SampledFunction, t) -> int:
    if isinstance(t, (int, np.integer)):
        return int(t) % phi.grid.circle.n
    return phi.grid.circle.index_of(float(t))


def energy_identity(phi: SampledFunction, t) -> tuple[float, float]:
    """Sphere mean of ``|Pi phi|^2`` at ``t`` and ``|mean|^2 + |first moment|^2``.

    ``t`` is a circle node, given as an angle or as an integer index.
    """
    k = _t_index(phi, t)
    proj = project_boundary(phi)
    rule = phi.grid.sphere
    on_sphere = proj.a[k] + unit_mul(rule.nodes, proj.b[k])
    lhs = float(wsum(rule.weights, np.einsum("mi,mi->m", on_sphere, on_sphere)))
    m0, m1 = sphere_moments(phi)
    rhs = float(m0[k] @ m0[k] + m1[k] @ m1[k])
    return lhs, rhs


def project_sphere_mean(phi: SampledFunction) -> SampledFunction:
    """Projection onto functions of ``t`` alone; the sphere mean broadcast over nodes."""
    m0 = wsum(phi.grid.sphere.weights, phi.values)
    return SampledFunction(phi.grid, np.broadcast_to(m0, phi.values.shape).copy())


def rotate_units(u: np.ndarray, axes: np.ndarray) -> np.ndarray:
    """``u J u*`` as 3-vectors; ``u`` (..., 4) versors, ``axes`` (..., 3)."""
    return qmul(qmul(u, pure(axes)), qconj(u))[..., 1:]


def unrotate_values(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """The inverse rotation acting on quaternion values: ``u* v u``."""
    return qmul(qmul(qconj(u), v), u)


@dataclass(eq=False)
class CovariantAverage:
    """Monte Carlo estimate of the rotation-covariant projection.

    Averages ``u* phi(e^{(u I u*) t}) u`` over fixed Haar-distributed versors
    ``u``. Callable like a function source: ``avg(axes, t)``.
    """

    source: object
    versors: np.ndarray
    chunk: int = 256

    def terms(self, axes, t) -> np.ndarray:
        """Per-sample contributions, shape (n_samples, ..., 4)."""
        axes = np.asarray(axes, dtype=float)
        t = np.asarray(t, dtype=float)
        shape = np.broadcast_shapes(axes.shape[:-1], t.shape)
        out = np.empty((len(self.versors),) + shape + (4,))
        for start in range(0, len(self.versors), self.chunk):
            u = self.versors[start : start + self.chunk]
            ub = u.reshape(u.shape[:1] + (1,) * len(shape) + (4,))
            rotated = rotate_units(ub, axes[None])
            vals = np.broadcast_to(as_quat(self.source(rotated, t[None])), (len(u),) + shape + (4,))
            out[start : start + len(u)] = unrotate_values(ub, vals)
        return out

    def __call__(self, axes, t) -> np.ndarray:
        return self.terms(axes, t).mean(axis=0)

    def standard_error(self, axes, t) -> np.ndarray:
        """Root of the summed per-component variances of the mean."""
        x = self.terms(axes, t)
        var = x.var(axis=0, ddof=1).sum(axis=-1)
        return np.sqrt(var / len(self.versors))


def project_covariant(phi: SampledFunction, n_samples: int, seed: int, grid: BoundaryGrid | None = None) -> SampledFunction:
    """Haar Monte Carlo average ``int R^{-1} phi(e^{R(I) t}) dh(R)``.

    Needs values of ``phi`` off the grid nodes, so ``phi.source`` must be set
    (see :meth:`SampledFunction.from_callable`). The result carries its
    estimator as ``source`` for evaluation anywhere.
    """
    if n_samples < 1:
        raise ValueError("n_samples must be positive")
    if phi.source is None:
        raise ValueError("covariant projection needs a function with a callable source")
    rng = np.random.default_rng(seed)
    avg = CovariantAverage(phi.source, random_versors(rng, n_samples))
    return SampledFunction.from_callable(grid or phi.grid, avg)


def covariance_defect(f, rotation: np.ndarray, axes, t) -> np.ndarray:
    """``|f(e^{R(I)t}) - R f(e^{It})|`` for the rotation given by versor ``rotation``."""
    axes = np.asarray(axes, dtype=float)
    moved = f(rotate_units(rotation, axes), t)
    turned = qmul(qmul(rotation, f(axes, t)), qconj(rotation))
    return qabs(moved - turned)


def truncate_nonneg(phi: SampledFunction) -> SampledFunction:
    """Keep the modes ``n >= 0`` of every slice expansion."""
    n = phi.grid.circle.n
    F = np.fft.fft(phi.values, axis=1)
    F[:, n // 2 :, :] = 0.0
    g = np.fft.ifft(F, axis=1)
    nodes = phi.grid.sphere.nodes[:, None, :]
    return SampledFunction(phi.grid, g.real + unit_mul(nodes, g.imag))


def interior_slice(phi: SampledFunction, r: float, axis=(1.0, 0.0, 0.0)) -> SliceFunction:
    """The interior extension at radius ``r`` as a slice function of ``(I, t)``.

    The kernel integral is evaluated on the slice of ``axis`` at every circle
    node and extended to all slices by the representation formula.
    """
    axis = as_axis(axis)
    samples = np.stack([project_interior(phi, r, axis, t) for t in phi.grid.circle.nodes])
    return ext_representation(samples, axis, phi.grid.circle)
