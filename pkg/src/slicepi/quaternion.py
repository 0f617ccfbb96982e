"""Quaternion arithmetic on numpy arrays.

A quaternion is stored as a float array whose last axis has length 4,
ordered ``(w, x, y, z)`` in the basis ``1, i, j, k``. Every function
broadcasts over the leading axes. :class:`Quaternion` is a thin scalar
wrapper for code that prefers operators.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

ZERO_DIVISOR_EPS = 1e-12


class ZeroDivisorError(ZeroDivisionError):
    """Raised when inverting a quaternion whose modulus is below epsilon."""


def as_quat(q) -> np.ndarray:
    if isinstance(q, Quaternion):
        return q.array
    arr = np.asarray(q, dtype=float)
    if arr.shape[-1:] != (4,):
        raise ValueError(f"quaternion arrays need a trailing axis of length 4, got {arr.shape}")
    return arr


def real(w) -> np.ndarray:
    """Embed real numbers as quaternions."""
    w = np.asarray(w, dtype=float)
    out = np.zeros(w.shape + (4,))
    out[..., 0] = w
    return out


def pure(v) -> np.ndarray:
    """Embed 3-vectors as purely imaginary quaternions."""
    v = np.asarray(v, dtype=float)
    out = np.zeros(v.shape[:-1] + (4,))
    out[..., 1:] = v
    return out


def qmul(a, b) -> np.ndarray:
    """Hamilton product ``a * b``."""
    a = as_quat(a)
    b = as_quat(b)
    aw, ax, ay, az = np.moveaxis(a, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            aw * bw - ax * bx - ay * by - az * bz,
            aw * bx + ax * bw + ay * bz - az * by,
            aw * by - ax * bz + ay * bw + az * bx,
            aw * bz + ax * by - ay * bx + az * bw,
        ],
        axis=-1,
    )


def unit_mul(u, b) -> np.ndarray:
    """Left product ``u * b`` for purely imaginary ``u`` given as 3-vectors.

    Cheaper than :func:`qmul` and used in the inner loops where ``u`` runs
    over sphere nodes.
    """
    u = np.asarray(u, dtype=float)
    b = as_quat(b)
    x, y, z = np.moveaxis(u, -1, 0)
    bw, bx, by, bz = np.moveaxis(b, -1, 0)
    return np.stack(
        [
            -x * bx - y * by - z * bz,
            x * bw + y * bz - z * by,
            -x * bz + y * bw + z * bx,
            x * by - y * bx + z * bw,
        ],
        axis=-1,
    )


def qconj(a) -> np.ndarray:
    a = as_quat(a)
    return a * np.array([1.0, -1.0, -1.0, -1.0])


def qnorm2(a) -> np.ndarray:
    a = as_quat(a)
    return np.sum(a * a, axis=-1)


def qabs(a) -> np.ndarray:
    return np.sqrt(qnorm2(a))


def qinv(a, eps: float = ZERO_DIVISOR_EPS) -> np.ndarray:
    a = as_quat(a)
    n2 = qnorm2(a)
    if np.any(np.sqrt(n2) < eps):
        raise ZeroDivisorError("quaternion modulus below zero-divisor epsilon")
    return qconj(a) / n2[..., None]


def exp_unit(axis, t) -> np.ndarray:
    """``cos t + I sin t`` for unit imaginary ``I`` given as a 3-vector."""
    axis = np.asarray(axis, dtype=float)
    t = np.asarray(t, dtype=float)
    c = np.cos(t)
    s = np.sin(t)
    out = np.empty(np.broadcast_shapes(axis.shape[:-1], t.shape) + (4,))
    out[..., 0] = c
    out[..., 1:] = axis * s[..., None]
    return out


def canonical_point(q) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Split unit quaternions into ``(axis, angle, is_real)``.

    The angle is ``arccos(Re q)`` in ``[0, pi]``; for real points the axis is
    ``i`` and ``is_real`` is set.
    """
    q = as_quat(q)
    angle = np.arccos(np.clip(q[..., 0], -1.0, 1.0))
    im = q[..., 1:]
    n = np.linalg.norm(im, axis=-1)
    is_real = n < ZERO_DIVISOR_EPS
    axis = np.where(is_real[..., None], np.array([1.0, 0.0, 0.0]), im / np.where(is_real, 1.0, n)[..., None])
    return axis, angle, is_real


def random_units(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` points uniformly distributed on the unit 2-sphere."""
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def random_versors(rng: np.random.Generator, n: int) -> np.ndarray:
    """``n`` unit quaternions uniform on the 3-sphere (Haar on SU(2))."""
    v = rng.standard_normal((n, 4))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


@dataclass(frozen=True)
class Quaternion:
    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    @classmethod
    def from_array(cls, arr) -> "Quaternion":
        w, x, y, z = (float(c) for c in as_quat(arr))
        return cls(w, x, y, z)

    @property
    def array(self) -> np.ndarray:
        return np.array([self.w, self.x, self.y, self.z])

    def __add__(self, other):
        return Quaternion.from_array(self.array + _coerce(other))

    __radd__ = __add__

    def __sub__(self, other):
        return Quaternion.from_array(self.array - _coerce(other))

    def __rsub__(self, other):
        return Quaternion.from_array(_coerce(other) - self.array)

    def __neg__(self):
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        return Quaternion.from_array(qmul(self.array, _coerce(other)))

    def __rmul__(self, other):
        return Quaternion.from_array(qmul(_coerce(other), self.array))

    def __abs__(self):
        return math.sqrt(self.w**2 + self.x**2 + self.y**2 + self.z**2)

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def inv(self) -> "Quaternion":
        return Quaternion.from_array(qinv(self.array))

    def isclose(self, other, tol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.array - _coerce(other))) <= tol)


def _coerce(v) -> np.ndarray:
    if isinstance(v, Quaternion):
        return v.array
    if np.isscalar(v):
        return real(float(v))
    return as_quat(v)


@dataclass(frozen=True)
class ImaginaryUnit:
    """A point of the sphere of imaginary units, ``I = x i + y j + z k``."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        n = math.sqrt(self.x**2 + self.y**2 + self.z**2)
        if abs(n - 1.0) > 1e-10:
            raise ValueError(f"imaginary unit must have modulus 1, got {n}")

    @classmethod
    def normalized(cls, v) -> "ImaginaryUnit":
        v = np.asarray(v, dtype=float)
        v = v / np.linalg.norm(v)
        return cls(*map(float, v))

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z])

    @property
    def quaternion(self) -> Quaternion:
        return Quaternion(0.0, self.x, self.y, self.z)

    def __neg__(self):
        return ImaginaryUnit(-self.x, -self.y, -self.z)


@dataclass(frozen=True)
class BoundaryPoint:
    """``e^{It}`` on the unit sphere of the quaternions."""

    axis: ImaginaryUnit
    angle: float

    @property
    def quaternion(self) -> Quaternion:
        return Quaternion.from_array(exp_unit(self.axis.vector, self.angle))

    @classmethod
    def from_quaternion(cls, q) -> "BoundaryPoint":
        axis, angle, _ = canonical_point(_coerce(q))
        return cls(ImaginaryUnit(*map(float, axis)), float(angle))


I = ImaginaryUnit(1.0, 0.0, 0.0)
J = ImaginaryUnit(0.0, 1.0, 0.0)
K = ImaginaryUnit(0.0, 0.0, 1.0)


def as_axis(v) -> np.ndarray:
    """Accept an :class:`ImaginaryUnit` or 3-vector(s), return a float array."""
    if isinstance(v, ImaginaryUnit):
        return v.vector
    return np.asarray(v, dtype=float)
