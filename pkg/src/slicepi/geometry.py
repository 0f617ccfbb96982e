"""Quadrature on the sphere of imaginary units and on the unit 3-sphere.

The boundary of the quaternionic unit ball is parametrized by pairs
``(J, t)`` with ``J`` a unit imaginary quaternion and ``t`` an angle; every
point is hit twice, by ``(J, t)`` and ``(-J, 2*pi - t)``. Functions are kept
on the full product grid and the double cover is checked explicitly by
:func:`validate_well_defined`.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np

from .quaternion import as_quat, qmul, unit_mul

RULE_KINDS = ("angle", "cos")


class GridSymmetryError(ValueError):
    """The grid is not closed under ``(J, t) -> (-J, 2*pi - t)``."""


def wsum(weights: np.ndarray, values: np.ndarray) -> np.ndarray:
    """Weighted sum over the leading axis in a fixed order.

    ``einsum`` runs numpy's own inner loop rather than a threaded BLAS
    kernel, so the result does not depend on the thread count.
    """
    return np.einsum("m,m...->...", weights, values)


@dataclass(frozen=True, eq=False)
class SphereRule:
    """Nodes and positive weights for the normalized measure on the 2-sphere."""

    nodes: np.ndarray
    weights: np.ndarray
    kind: str = "custom"
    n_polar: int = 0
    n_azimuth: int = 0
    degree: int = 0
    antipode: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.nodes.ndim != 2 or self.nodes.shape[1] != 3:
            raise ValueError("nodes must have shape (M, 3)")
        if self.weights.shape != (self.nodes.shape[0],):
            raise ValueError("one weight per node")
        if np.any(self.weights <= 0):
            raise ValueError("weights must be positive")

    def __len__(self):
        return self.nodes.shape[0]

    @property
    def polar_idx(self) -> np.ndarray:
        return np.arange(len(self)) // max(self.n_azimuth, 1)

    @property
    def azimuth_idx(self) -> np.ndarray:
        return np.arange(len(self)) % max(self.n_azimuth, 1)

    def rotated(self, rotation: np.ndarray) -> "SphereRule":
        """Same weights, nodes mapped by a 3x3 rotation matrix."""
        return SphereRule(
            self.nodes @ rotation.T,
            self.weights,
            self.kind,
            self.n_polar,
            self.n_azimuth,
            self.degree,
            self.antipode,
        )

    def describe(self) -> dict:
        return {"rule": self.kind, "n_polar": self.n_polar, "n_azimuth": self.n_azimuth}


def _polar_nodes(n_polar: int, kind: str) -> tuple[np.ndarray, np.ndarray]:
    """Cosines of the polar nodes, north to south, and their measure weights."""
    x, w = np.polynomial.legendre.leggauss(n_polar)
    if kind == "angle":
        theta = 0.5 * np.pi * (x + 1.0)
        mu = np.cos(theta)
        w = w * 0.25 * np.pi * np.sin(theta)
    else:
        mu = x[::-1]
        w = 0.5 * w[::-1]
    # mirrored nodes must be exact negatives with equal weights
    return 0.5 * (mu - mu[::-1]), 0.5 * (w + w[::-1])


def build_sphere_rule(n_polar: int, n_azimuth: int, kind: str = "angle") -> SphereRule:
    """Product rule: Gauss-Legendre in the polar coordinate, uniform azimuth.

    ``kind="angle"`` places the Gauss-Legendre nodes in the polar angle
    itself (weight ``sin(theta) dtheta / 2``); ``kind="cos"`` places them in
    ``cos(theta)``, which is exact for polynomials of degree ``< 2 n_polar``
    but converges slowly on integrands with a square-root zero at a pole.
    """
    if kind not in RULE_KINDS:
        raise ValueError(f"unknown sphere rule kind {kind!r}")
    if n_polar < 2:
        raise ValueError("n_polar must be at least 2")
    if n_azimuth < 2 or n_azimuth % 2:
        raise ValueError("n_azimuth must be an even integer >= 2")
    mu, wmu = _polar_nodes(n_polar, kind)
    sin_th = np.sqrt(np.clip(1.0 - mu * mu, 0.0, None))
    phi = 2.0 * np.pi * np.arange(n_azimuth) / n_azimuth
    nodes = np.empty((n_polar, n_azimuth, 3))
    nodes[..., 0] = sin_th[:, None] * np.cos(phi)[None, :]
    nodes[..., 1] = sin_th[:, None] * np.sin(phi)[None, :]
    nodes[..., 2] = mu[:, None]
    weights = np.repeat(wmu[:, None] / n_azimuth, n_azimuth, axis=1)

    p, a = np.meshgrid(np.arange(n_polar), np.arange(n_azimuth), indexing="ij")
    antipode = ((n_polar - 1 - p) * n_azimuth + (a + n_azimuth // 2) % n_azimuth).ravel()
    nodes = nodes.reshape(-1, 3)
    weights = weights.ravel()
    # exact antipodal closure of coordinates and weights
    first = np.arange(nodes.shape[0]) < antipode
    nodes[antipode[first]] = -nodes[first]
    weights[antipode[first]] = weights[first]
    weights = weights / np.sum(weights)

    if kind == "cos":
        degree = min(2 * n_polar - 1, n_azimuth - 1)
    else:
        degree = min((2 * n_polar) // 5, n_azimuth - 1)
    return SphereRule(nodes, weights, kind, n_polar, n_azimuth, degree, antipode)


@dataclass(frozen=True, eq=False)
class CircleGrid:
    """Uniform nodes ``t_k = 2 pi k / n`` with weight ``1/n`` each."""

    n: int

    def __post_init__(self):
        if self.n < 4 or self.n % 2:
            raise ValueError("circle grid size must be an even integer >= 4")

    @property
    def nodes(self) -> np.ndarray:
        return 2.0 * np.pi * np.arange(self.n) / self.n

    @property
    def weights(self) -> np.ndarray:
        return np.full(self.n, 1.0 / self.n)

    def trig(self) -> tuple[np.ndarray, np.ndarray]:
        """``cos t_k`` and ``sin t_k`` with the reflection symmetry exact in floating point."""
        t = self.nodes
        c, s = np.cos(t), np.sin(t)
        upper = np.arange(self.n // 2 + 1, self.n)
        c[upper] = c[self.n - upper]
        s[upper] = -s[self.n - upper]
        s[self.n // 2] = 0.0
        return c, s

    @property
    def reflect(self) -> np.ndarray:
        """Index of ``2 pi - t_k``."""
        return (-np.arange(self.n)) % self.n

    def index_of(self, t: float, tol: float = 1e-9) -> int:
        k = int(round((t % (2.0 * np.pi)) * self.n / (2.0 * np.pi))) % self.n
        d = abs(((t - self.nodes[k] + np.pi) % (2.0 * np.pi)) - np.pi)
        if d > tol:
            raise ValueError(f"t={t} is not a circle grid node")
        return k


def build_circle_grid(n_t: int) -> CircleGrid:
    return CircleGrid(n_t)


@dataclass(frozen=True, eq=False)
class BoundaryGrid:
    sphere: SphereRule
    circle: CircleGrid

    @classmethod
    def build(cls, n_polar: int = 48, n_azimuth: int = 96, n_t: int = 256, kind: str = "angle") -> "BoundaryGrid":
        return cls(build_sphere_rule(n_polar, n_azimuth, kind), build_circle_grid(n_t))

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.sphere), self.circle.n)

    @cached_property
    def weights(self) -> np.ndarray:
        w = self.sphere.weights[:, None] * self.circle.weights[None, :]
        w.flags.writeable = False
        return w

    def describe(self) -> dict:
        return {**self.sphere.describe(), "n_t": self.circle.n}

    def same_as(self, other: "BoundaryGrid") -> bool:
        return self is other or self.describe() == other.describe()


@dataclass(eq=False)
class SampledFunction:
    """Quaternion values on the product grid, shape ``(M, N, 4)``.

    ``source`` optionally keeps the callable ``f(axes, t)`` the samples came
    from, for operations that need values away from the nodes.
    """

    grid: BoundaryGrid
    values: np.ndarray
    source: Optional[Callable] = field(default=None, repr=False)

    def __post_init__(self):
        self.values = as_quat(self.values)
        if self.values.shape != self.grid.shape + (4,):
            raise ValueError(f"values shape {self.values.shape} does not match grid {self.grid.shape}")

    @classmethod
    def from_callable(cls, grid: BoundaryGrid, f: Callable) -> "SampledFunction":
        """Sample ``f(axes, t)``; ``axes`` has shape (M, 1, 3), ``t`` shape (1, N)."""
        vals = f(grid.sphere.nodes[:, None, :], grid.circle.nodes[None, :])
        vals = np.broadcast_to(as_quat(vals), grid.shape + (4,)).copy()
        return cls(grid, vals, f)

    @classmethod
    def from_point_function(cls, grid: BoundaryGrid, g: Callable) -> "SampledFunction":
        """Sample ``g(q)`` at ``q = e^{Jt}``; well defined on the boundary by construction."""
        from .quaternion import exp_unit

        return cls.from_callable(grid, lambda axes, t: g(exp_unit(axes, t)))

    def __add__(self, other: "SampledFunction") -> "SampledFunction":
        _check_same_grid(self, other)
        return SampledFunction(self.grid, self.values + other.values)

    def __sub__(self, other: "SampledFunction") -> "SampledFunction":
        _check_same_grid(self, other)
        return SampledFunction(self.grid, self.values - other.values)

    def scale(self, c: float) -> "SampledFunction":
        return SampledFunction(self.grid, self.values * c)

    def right_mul(self, q) -> "SampledFunction":
        return SampledFunction(self.grid, qmul(self.values, as_quat(q)))


def _check_same_grid(f: SampledFunction, g: SampledFunction):
    if not f.grid.same_as(g.grid):
        raise ValueError("functions live on different grids")


def integrate_sphere(f, rule: SphereRule) -> np.ndarray:
    """``sum_k w_k f(J_k)``; ``f`` is a callable on node arrays or precomputed values."""
    vals = f(rule.nodes) if callable(f) else f
    return wsum(rule.weights, np.asarray(vals, dtype=float))


def integrate_boundary(phi: SampledFunction) -> np.ndarray:
    over_sphere = wsum(phi.grid.sphere.weights, phi.values)
    return wsum(phi.grid.circle.weights, over_sphere)


def sphere_first_moment(rule: SphereRule, values: np.ndarray) -> np.ndarray:
    """``sum_k w_k J_k v_k`` with left multiplication by the node ``J_k``."""
    parts = [wsum(rule.weights * rule.nodes[:, c], values) for c in range(3)]
    out = np.zeros_like(parts[0])
    for c, part in enumerate(parts):
        e = np.zeros(3)
        e[c] = 1.0
        out = out + unit_mul(e, part)
    return out


def antipodal_partner(phi: SampledFunction) -> np.ndarray:
    """Values at ``(-J, 2 pi - t)`` rearranged onto the ``(J, t)`` slots."""
    anti = phi.grid.sphere.antipode
    if anti is None:
        raise GridSymmetryError("sphere rule carries no antipodal pairing")
    return phi.values[anti][:, phi.grid.circle.reflect]


def validate_well_defined(phi: SampledFunction) -> float:
    """Largest ``|phi(J, t) - phi(-J, 2 pi - t)|`` over the grid."""
    diff = phi.values - antipodal_partner(phi)
    return float(np.sqrt(np.max(np.einsum("...i,...i->...", diff, diff))))


def worst_antipodal_pair(phi: SampledFunction) -> tuple[int, int, float]:
    """``(sphere index, t index, defect)`` of the worst double-cover violation."""
    diff = phi.values - antipodal_partner(phi)
    d = np.einsum("...i,...i->...", diff, diff)
    m, k = np.unravel_index(int(np.argmax(d)), d.shape)
    return int(m), int(k), float(np.sqrt(d[m, k]))
