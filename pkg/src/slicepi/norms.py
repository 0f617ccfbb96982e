"""L^p norms of the slice projection: closed-form bounds and a lower-bound search."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .functions import random_polynomial_function
from .geometry import BoundaryGrid, SampledFunction, SphereRule, wsum
from .projection import project_boundary, sphere_moments
from .quaternion import as_axis, pure, qabs, qconj, qmul, unit_mul
from .slices import SliceFunction


def conjugate_exponent(p: float) -> float:
    if p < 1:
        raise ValueError("exponent must be >= 1")
    if p == 1:
        return math.inf
    if math.isinf(p):
        return 1.0
    return p / (p - 1.0)


def _weighted_lp(weights: np.ndarray, modulus: np.ndarray, p: float) -> float:
    if math.isinf(p):
        return float(modulus.max())
    top = float(modulus.max())
    if top == 0.0:
        return 0.0
    return top * float(np.sum(weights * (modulus / top) ** p)) ** (1.0 / p)


def lp_norm(phi: SampledFunction, p: float) -> float:
    if p < 1:
        raise ValueError("exponent must be >= 1")
    return _weighted_lp(phi.grid.weights, np.sqrt(np.einsum("...i,...i->...", phi.values, phi.values)), p)


# structure constants: (conj(g) f)_c = sum_ab _PAIRING[c, a, b] g_a f_b
_PAIRING = np.einsum("ai,bj,ijc->cab", np.diag([1.0, -1.0, -1.0, -1.0]), np.eye(4), qmul(np.eye(4)[:, None, :], np.eye(4)[None, :, :]))


def inner_product(f: SampledFunction, g: SampledFunction) -> np.ndarray:
    """``int conj(g) f dSigma``; right linear in ``f``."""
    if not f.grid.same_as(g.grid):
        raise ValueError("functions live on different grids")
    weighted = f.grid.weights[..., None] * g.values
    gram = np.einsum("mna,mnb->ab", weighted, f.values)
    return np.einsum("cab,ab->c", _PAIRING, gram)


def sphere_moment(q_exp: float) -> float:
    """``int |1 - I J|^q dsigma(J) = 2^(q+1) / (q+2)``."""
    if q_exp < 0:
        raise ValueError("moment exponent must be >= 0")
    return 2.0 ** (q_exp + 1.0) / (q_exp + 2.0)


def frame_with_pole(axis) -> np.ndarray:
    """Rotation matrix taking ``(0, 0, 1)`` to ``axis``."""
    z = as_axis(axis) / np.linalg.norm(as_axis(axis))
    helper = np.array([1.0, 0.0, 0.0]) if abs(z[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    x = np.cross(helper, z)
    x /= np.linalg.norm(x)
    y = np.cross(z, x)
    return np.column_stack([x, y, z])


def sphere_moment_quadrature(q_exp: float, axis, rule: SphereRule) -> float:
    """``int |1 - I J|^q dsigma(J)`` by the rule turned so its pole sits at ``I``."""
    turned = rule.rotated(frame_with_pole(axis))
    one_minus = -qmul(pure(as_axis(axis)), pure(turned.nodes))
    one_minus[..., 0] += 1.0
    return float(wsum(turned.weights, qabs(one_minus) ** q_exp))


def upper_bound_constant(p: float) -> float:
    """``2 ((2p-2)/(3p-2))^((p-1)/p)`` for ``p >= 2``; conjugate exponent below 2."""
    if p < 1:
        raise ValueError("exponent must be >= 1")
    if p < 2:
        p = conjugate_exponent(p)
    if math.isinf(p):
        return 4.0 / 3.0
    return 2.0 * ((2.0 * p - 2.0) / (3.0 * p - 2.0)) ** ((p - 1.0) / p)


def extremal_function(axis0, grid: BoundaryGrid) -> SampledFunction:
    """``|1 - I0 J| (1 - I0 J)^{-1}`` on the canonical representative of each point.

    Points with ``sin t < 0`` are read as ``e^{(-J)(2pi - t)}``; real points
    and the pole ``J = -I0`` get the value 1.
    """
    axis0 = as_axis(axis0)
    nodes = grid.sphere.nodes
    t = grid.circle.nodes

    def branch(units):
        w = -qmul(pure(axis0), pure(units))
        w[..., 0] += 1.0
        mod = qabs(w)
        safe = mod > 1e-12
        val = qconj(w) / np.where(safe, mod, 1.0)[..., None]
        val[~safe] = np.array([1.0, 0.0, 0.0, 0.0])
        return val

    upper = branch(nodes)
    lower = branch(-nodes)
    sin_t = np.round(np.sin(t), 14)
    values = np.empty(grid.shape + (4,))
    values[:, sin_t > 0] = upper[:, None, :]
    values[:, sin_t < 0] = lower[:, None, :]
    values[:, sin_t == 0] = np.array([1.0, 0.0, 0.0, 0.0])
    return SampledFunction(grid, values)


def slice_lp_norm(f: SliceFunction, grid: BoundaryGrid, p: float, exact_sup: bool = False) -> float:
    """L^p norm of a slice function on ``grid``.

    With ``exact_sup`` the sup norm is taken over every unit ``I``, not only
    the rule nodes.
    """
    if math.isinf(p) and exact_sup:
        return float(f.sup_modulus().max())
    return lp_norm(f.on_grid(grid), p)


def ratio(phi: SampledFunction, p: float) -> float:
    """``||Pi phi||_p / ||phi||_p`` with both norms on the grid of ``phi``."""
    den = lp_norm(phi, p)
    if den == 0.0:
        raise ValueError("ratio undefined for the zero function")
    return slice_lp_norm(project_boundary(phi), phi.grid, p) / den


@dataclass
class NormReport:
    p: float
    q: float
    upper_bound: float
    lower_bound: float
    witness: SampledFunction = field(repr=False)
    iterations: list[float] = field(default_factory=list)
    best_trace: list[float] = field(default_factory=list)
    restarts: int = 0
    seed: int = 0

    def to_json(self, witness_file: str | None = None) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "upper_bound": self.upper_bound,
            "lower_bound": self.lower_bound,
            "iterations": self.iterations,
            "best_trace": self.best_trace,
            "restarts": self.restarts,
            "seed": self.seed,
            "witness_file": witness_file,
        }


def _modulus_sq(c0: np.ndarray, c1: np.ndarray, nodes: np.ndarray) -> np.ndarray:
    """``|c0(t) - J c1(t)|^2`` on the grid, shape (M, N)."""
    cross = qmul(c1, qconj(c0))[:, 1:]
    sq = np.sum(c0 * c0, axis=1) + np.sum(c1 * c1, axis=1)
    out = nodes @ cross.T
    out *= 2.0
    out += sq[None, :]
    return np.maximum(out, 0.0, out=out)


def _project_weighted(c0, c1, h, rule: SphereRule):
    """Sphere moments of ``(c0 - J c1) h`` for a scalar field ``h``."""
    moments = np.einsum("mc,mn->cn", rule.weights[:, None] * np.column_stack([np.ones(len(rule.weights)), rule.nodes]), h)
    h0, h1 = moments[0], moments[1:].T
    m0 = h0[:, None] * c0 - unit_mul(h1, c1)
    m1 = unit_mul(h1, c0) + h0[:, None] * c1
    return m0, m1


def _power(x: np.ndarray, e: float) -> np.ndarray:
    """``x ** e`` for ``x >= 0`` with ``0 ** e = 0`` even when ``e < 0``."""
    out = np.zeros_like(x)
    np.power(x, e, out=out, where=x > 0)
    return out


def _materialize(c0, c1, h, grid: BoundaryGrid) -> SampledFunction:
    f = SliceFunction(grid.circle, c0, -c1)
    return SampledFunction(grid, f.on_grid(grid).values * h[..., None])


def norm_lower_bound_search(
    p: float,
    restarts: int = 2,
    iters: int = 30,
    seed: int = 0,
    grid: BoundaryGrid | None = None,
    degree: int = 3,
) -> NormReport:
    """Nonlinear power iteration for ``||Pi||_{p,p}`` from seeded random starts.

    Each step is ``u = Pi phi``, ``v = Pi(u |u|^(p-2))``,
    ``phi = v |v|^(q-2)`` normalized in L^p. Iterates are kept in the form
    ``(c0(t) - J c1(t)) h(J, t)`` with a scalar field ``h``, so the
    projection reduces to two scalar sphere sums per circle node.
    """
    if not 1.0 < p < math.inf:
        raise ValueError("search needs 1 < p < inf; use the extremal function for p = inf and duality for p = 1")
    grid = grid or BoundaryGrid.build()
    q = conjugate_exponent(p)
    rule = grid.sphere
    w = grid.weights
    iterations: list[float] = []
    best = -math.inf
    best_state = None
    for restart in range(restarts):
        rng = np.random.default_rng([seed, restart])
        for _ in range(16):
            phi0 = random_polynomial_function(grid, rng, degree)
            u0, u1 = sphere_moments(phi0)
            if np.abs(u0).max() + np.abs(u1).max() > 1e-12:
                break
        else:
            raise RuntimeError("could not draw a start with nonzero projection")
        r0 = ratio(phi0, p)
        iterations.append(r0)
        if r0 > best:
            best, best_state = r0, ("raw", phi0)
        # squared moduli throughout; x^e with x = |u|^2 / max|u|^2 gives |u|^(2e)
        usq = _modulus_sq(u0, u1, rule.nodes)
        state_pending = None
        for _ in range(iters):
            top = float(usq.max())
            if top == 0.0:
                break
            x = usq / top
            xp = _power(x, 0.5 * (p - 2.0))
            if state_pending is not None:
                # ||u||_p of the previous step from the power already needed here
                r = math.sqrt(top) * float(np.sum(w * (x * xp))) ** (1.0 / p)
                iterations.append(r)
                if r > best:
                    best, best_state = r, ("factored", state_pending)
            root = math.sqrt(top)
            v0, v1 = _project_weighted(u0 / root, u1 / root, xp, rule)
            vsq = _modulus_sq(v0, v1, rule.nodes)
            vtop = float(vsq.max())
            if vtop == 0.0:
                break
            y = vsq / vtop
            h = _power(y, 0.5 * (q - 2.0))
            # |phi|^p = y^(q/2) because p (q - 1) = q
            norm = float(np.sum(w * (y * h))) ** (1.0 / p)
            scale = math.sqrt(vtop) * norm
            c0, c1 = v0 / scale, v1 / scale
            u0, u1 = _project_weighted(c0, c1, h, rule)
            usq = _modulus_sq(u0, u1, rule.nodes)
            state_pending = (c0, c1, h)
        if state_pending is not None:
            r = _weighted_lp(w, np.sqrt(usq), p)
            iterations.append(r)
            if r > best:
                best, best_state = r, ("factored", state_pending)
    kind, state = best_state
    witness = state if kind == "raw" else _materialize(*state, grid)
    certified = ratio(witness, p)
    trace = list(np.maximum.accumulate(iterations))
    return NormReport(p, q, upper_bound_constant(p), certified, witness, iterations, trace, restarts, seed)


def duality_gap(p: float, report_p: NormReport, report_q: NormReport) -> float:
    if p in (1.0, math.inf) or not 1.0 < p < math.inf:
        raise ValueError("duality diagnostic needs 1 < p < inf")
    if not math.isclose(report_p.p, p) or not math.isclose(1.0 / report_p.p + 1.0 / report_q.p, 1.0, abs_tol=1e-12):
        raise ValueError("reports are not at conjugate exponents")
    return abs(report_p.lower_bound - report_q.lower_bound)
