"""Slice functions on the boundary and their per-slice Fourier analysis.

A slice function is stored by two circle profiles ``a, b`` with
``f(e^{Jt}) = a(t) + J b(t)``. Fourier coefficients sit to the right of the
exponentials: ``f(e^{It}) = sum_n e^{Int} c_n``.
"""
from __future__ import annotations

from dataclasses import dataclass

import math

import numpy as np

from .geometry import BoundaryGrid, CircleGrid, SampledFunction
from .quaternion import as_axis, as_quat, qconj, qmul, qnorm2, unit_mul


@dataclass(eq=False)
class SliceFunction:
    circle: CircleGrid
    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        self.a = as_quat(self.a)
        self.b = as_quat(self.b)
        if self.a.shape != (self.circle.n, 4) or self.b.shape != (self.circle.n, 4):
            raise ValueError("a and b need shape (N_t, 4)")

    def restrict(self, axis) -> np.ndarray:
        """Samples ``a(t_k) + I b(t_k)`` on the slice of ``I``; shape (..., N, 4)."""
        axis = as_axis(axis)
        # J b = sum_c J_c (e_c b): one small matrix product over the three components
        basis = np.stack([unit_mul(e, self.b) for e in np.eye(3)])
        prod = (axis.reshape(-1, 3) @ basis.reshape(3, -1)).reshape(axis.shape[:-1] + self.b.shape)
        return self.a + prod

    def on_grid(self, grid: BoundaryGrid) -> SampledFunction:
        if grid.circle.n != self.circle.n:
            raise ValueError("circle sizes differ")
        return SampledFunction(grid, self.restrict(grid.sphere.nodes))

    def well_defined_defect(self) -> float:
        """Violation of ``a(-t) = a(t)``, ``b(-t) = -b(t)``."""
        r = self.circle.reflect
        da = np.abs(self.a[r] - self.a).max()
        db = np.abs(self.b[r] + self.b).max()
        return float(max(da, db))

    def sup_modulus(self) -> np.ndarray:
        """``max_I |a(t) + I b(t)|`` at every circle node, exactly.

        ``|a + I b|^2 = |a|^2 + |b|^2 - 2 I . Im(b conj(a))`` is maximized by
        ``I`` antiparallel to ``Im(b conj(a))``.
        """
        c = qmul(self.b, qconj(self.a))
        cross = np.linalg.norm(c[:, 1:], axis=1)
        return np.sqrt(qnorm2(self.a) + qnorm2(self.b) + 2.0 * cross)

    def __sub__(self, other: "SliceFunction") -> "SliceFunction":
        return SliceFunction(self.circle, self.a - other.a, self.b - other.b)


@dataclass(eq=False)
class FourierTable:
    """Coefficients in numpy FFT order: ``n = 0, 1, ..., N/2 - 1, -N/2, ..., -1``.

    ``coeffs`` has shape (..., N, 4); ``axis`` the imaginary unit(s) whose
    exponentials the coefficients belong to.
    """

    coeffs: np.ndarray
    axis: np.ndarray

    @property
    def n(self) -> int:
        return self.coeffs.shape[-2]

    @property
    def modes(self) -> np.ndarray:
        return np.fft.fftfreq(self.n, 1.0 / self.n).astype(int)

    def __getitem__(self, mode: int) -> np.ndarray:
        return self.coeffs[..., mode % self.n, :]

    def evaluate(self, t) -> np.ndarray:
        """``sum_n e^{I n t} c_n`` at arbitrary angles ``t`` (1-d)."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        ang = np.outer(t, self.modes)
        ax = self.axis[..., None, None, :]
        c = self.coeffs[..., None, :, :]
        terms = np.cos(ang)[..., None] * c + np.sin(ang)[..., None] * unit_mul(ax, c)
        return terms.sum(axis=-2)


def _fft_quaternion(samples: np.ndarray, axis: np.ndarray) -> np.ndarray:
    # (1/N) sum_k e^{-n I t_k} f_k = Re F(n) + I Im F(n) with F the componentwise DFT
    F = np.fft.fft(samples, axis=-2) / samples.shape[-2]
    return F.real + unit_mul(axis[..., None, :], F.imag)


def fourier_coeffs_slice(samples, axis) -> FourierTable:
    """Fourier coefficients of circle samples on the slice of ``axis``."""
    samples = as_quat(samples)
    axis = as_axis(axis)
    return FourierTable(_fft_quaternion(samples, axis), axis)


def fourier_coeffs_nodes(phi: SampledFunction) -> FourierTable:
    """Per-node coefficient tables, shape (M, N, 4)."""
    nodes = phi.grid.sphere.nodes
    return FourierTable(_fft_quaternion(phi.values, nodes), nodes)


def ext_representation(samples, axis, circle: CircleGrid | None = None) -> SliceFunction:
    """The slice function whose restriction to the slice of ``axis`` is ``samples``."""
    samples = as_quat(samples)
    axis = as_axis(axis)
    circle = circle or CircleGrid(samples.shape[0])
    mirrored = samples[circle.reflect]
    a = 0.5 * (samples + mirrored)
    b = 0.5 * unit_mul(axis, mirrored - samples)
    return SliceFunction(circle, a, b)


def _default_references(m: int, count: int = 8) -> np.ndarray:
    if m <= count:
        return np.arange(m)
    return np.unique(np.linspace(0, m - 1, count).round().astype(int))


def slice_defect(phi: SampledFunction, references=None) -> float:
    """Largest failure of the representation formula.

    For each reference node ``I`` the function is rebuilt on every slice
    ``J`` from its values on the slice of ``I`` and compared with the
    samples. ``references`` selects the reference nodes (all when
    ``"all"``); by default 8 nodes spread over the rule.
    """
    nodes = phi.grid.sphere.nodes
    if references is None:
        refs = _default_references(len(nodes))
    elif isinstance(references, str) and references == "all":
        refs = np.arange(len(nodes))
    else:
        refs = np.asarray(references, dtype=int)
    m, n = phi.grid.shape
    # component-major layout (M, 4 N) so the squared modulus sums four contiguous blocks
    samples = np.ascontiguousarray(phi.values.transpose(0, 2, 1)).reshape(m, 4 * n)
    buf = np.empty_like(samples)
    worst = 0.0
    for i in refs:
        rebuilt = ext_representation(phi.values[i], nodes[i], phi.grid.circle)
        basis = np.stack([unit_mul(e, rebuilt.b).T for e in np.eye(3)]).reshape(3, 4 * n)
        np.matmul(nodes, basis, out=buf)
        buf += rebuilt.a.T.reshape(4 * n)
        buf -= samples
        buf *= buf
        sq = buf[:, :n] + buf[:, n : 2 * n] + buf[:, 2 * n : 3 * n] + buf[:, 3 * n :]
        worst = max(worst, float(sq.max()))
    return math.sqrt(worst)


def poisson_kernel(r, t) -> np.ndarray:
    """``(1 - r^2) / (1 - 2 r cos t + r^2)`` for ``0 <= r < 1``."""
    r = np.asarray(r, dtype=float)
    if np.any(r < 0) or np.any(r >= 1):
        raise ValueError("Poisson kernel needs 0 <= r < 1")
    return (1.0 - r * r) / (1.0 - 2.0 * r * np.cos(t) + r * r)


def poisson_extend(f: SliceFunction, r: float, axis, t) -> np.ndarray:
    """Value of the power-series extension of ``f`` at ``r e^{It}``.

    ``axis`` is one unit or an array (P, 3); ``t`` broadcasts against the
    leading shape. Coefficients are taken on the slice of each ``axis``; the
    series is summed in Horner form in ``r``.
    """
    if not 0.0 <= r < 1.0:
        raise ValueError("interior radius must satisfy 0 <= r < 1")
    axis = as_axis(axis)
    single = axis.ndim == 1
    axis = np.atleast_2d(axis)
    t = np.broadcast_to(np.asarray(t, dtype=float), axis.shape[:-1])
    n = f.circle.n
    half = n // 2
    c = _fft_quaternion(f.restrict(axis), axis)
    pos = np.concatenate([c[..., :half, :], np.zeros_like(c[..., :1, :])], axis=-2)
    neg = np.concatenate([np.zeros_like(c[..., :1, :]), c[..., : half - 1 : -1, :]], axis=-2)
    # g_m = e^{Imt} c_m + e^{-Imt} c_{-m} for m = 0 .. N/2
    ang = t[..., None] * np.arange(half + 1)
    g = np.cos(ang)[..., None] * (pos + neg) + np.sin(ang)[..., None] * unit_mul(axis[..., None, :], pos - neg)
    acc = np.zeros(axis.shape[:-1] + (4,))
    for m in range(half, -1, -1):
        acc = acc * r + g[..., m, :]
    return acc[0] if single else acc
