"""Tensor quadrature rules for the weighted polydisc and the unit ball.

Radial integrals are taken in t = r^2 with a Gauss-Jacobi rule that absorbs
the weight (1-t)^alpha, so polynomial integrands are integrated exactly for
every alpha > -1.  Angular integrals use the trapezoid rule on equispaced
phases; each coordinate's phase grid is staggered by a distinct offset so
tensor nodes never collide with coordinate-difference branch loci.

All rules are normalized against the probability measures used throughout:
Lebesgue measure scaled so the disc (respectively ball) has volume one, with
the polydisc weight prod (alpha_i + 1)(1 - |z_i|^2)^{alpha_i} built into the
node weights.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi

from .errors import ConfigError

MAX_TOTAL_NODES = 2 * 10 ** 8


@lru_cache(maxsize=256)
def gauss_jacobi_01(n: int, alpha: float) -> tuple[np.ndarray, np.ndarray]:
    """Nodes/weights for integral_0^1 g(t) (1-t)^alpha dt."""
    x, w = roots_jacobi(n, alpha, 0.0)
    t = 0.5 * (x + 1.0)
    wt = w * 0.5 ** (alpha + 1.0)
    return t, wt


def disc_axis(alpha: float, n_radial: int, n_angular: int,
              phase: float = 0.0) -> tuple[np.ndarray, np.ndarray]:
    """Flattened nodes/weights with sum w f(z) ~ int_D f omega_alpha dV."""
    t, wt = gauss_jacobi_01(n_radial, float(alpha))
    theta = phase + 2.0 * np.pi * np.arange(n_angular) / n_angular
    r = np.sqrt(t)
    nodes = (r[:, None] * np.exp(1j * theta)[None, :]).ravel()
    weights = ((alpha + 1.0) / n_angular * wt)[:, None].repeat(n_angular, axis=1).ravel()
    return nodes, weights


@dataclass
class ProductRule:
    """Tensor-product rule on a polydisc: per-axis nodes and weights."""

    axes_nodes: list
    axes_weights: list

    @property
    def dimension(self) -> int:
        return len(self.axes_nodes)

    @property
    def node_count(self) -> int:
        return math.prod(len(n) for n in self.axes_nodes)

    def meshes(self) -> list[np.ndarray]:
        """Broadcastable coordinate arrays (axis j varies along dim j)."""
        d = self.dimension
        out = []
        for j, nodes in enumerate(self.axes_nodes):
            shape = [1] * d
            shape[j] = len(nodes)
            out.append(nodes.reshape(shape))
        return out

    def integrate_values(self, values: np.ndarray) -> complex:
        """Contract a full mesh of integrand values with the axis weights."""
        out = np.asarray(values, dtype=complex)
        out = np.broadcast_to(out, tuple(len(n) for n in self.axes_nodes))
        for w in reversed(self.axes_weights):
            out = out @ w
        return complex(out)

    def integrate(self, f) -> complex:
        """Integrate a vectorized function of stacked points (..., d)."""
        if hasattr(f, "evaluate"):
            return self.integrate_values(f.evaluate(self.meshes()))
        return self._integrate_callable(f)

    def _integrate_callable(self, f, block: int = 1 << 20) -> complex:
        sizes = [len(n) for n in self.axes_nodes]
        total = math.prod(sizes)
        if total > MAX_TOTAL_NODES:
            raise ConfigError(f"quadrature grid of {total} nodes is too large; lower the orders")
        acc = 0.0 + 0.0j
        for start in range(0, total, block):
            idx = np.arange(start, min(start + block, total))
            multi = np.unravel_index(idx, sizes)
            pts = np.stack([self.axes_nodes[j][multi[j]] for j in range(self.dimension)],
                           axis=-1)
            w = np.ones(len(idx))
            for j in range(self.dimension):
                w = w * self.axes_weights[j][multi[j]]
            acc += np.sum(w * np.asarray(f(pts), dtype=complex))
        return complex(acc)


@dataclass
class FlatRule:
    """Generic rule: explicit points (M, d) and weights (M,)."""

    points: np.ndarray
    weights: np.ndarray

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    @property
    def node_count(self) -> int:
        return self.points.shape[0]

    def coords(self) -> list[np.ndarray]:
        return [self.points[:, j] for j in range(self.dimension)]

    def integrate(self, f) -> complex:
        if hasattr(f, "evaluate"):
            vals = f.evaluate(self.coords())
        else:
            vals = f(self.points)
        return complex(np.sum(self.weights * np.asarray(vals, dtype=complex)))


def _axis_phase(j: int, n_angular: int, d: int) -> float:
    # distinct offsets per coordinate keep z_i != z_j at every tensor node
    return (j + 1) * 2.0 * np.pi / (n_angular * (d + 1))


def polydisc_rule(alphas, n_radial: int, n_angular: int) -> ProductRule:
    alphas = tuple(float(a) for a in alphas)
    d = len(alphas)
    nodes, weights = [], []
    for j, a in enumerate(alphas):
        nj, wj = disc_axis(a, n_radial, n_angular, phase=_axis_phase(j, n_angular, d))
        nodes.append(nj)
        weights.append(wj)
    return ProductRule(nodes, weights)


def ball_rule(d: int, n_radial: int, n_angular: int) -> FlatRule:
    """Rule for the unit ball of C^d under normalized volume measure.

    Uses the simplex substitution t_j = x_j prod_{l<j}(1 - x_l) for the
    radial profile; the factor (1 - x_j)^{d-1-j} is absorbed into per-axis
    Gauss-Jacobi rules, so radial-polynomial integrands are exact.
    """
    radial = [gauss_jacobi_01(n_radial, float(d - 1 - j)) for j in range(d)]
    thetas = [(_axis_phase(j, n_angular, d)
               + 2.0 * np.pi * np.arange(n_angular) / n_angular) for j in range(d)]

    sizes = [n_radial for _ in range(d)] + [n_angular for _ in range(d)]
    total = math.prod(sizes)
    if total > MAX_TOTAL_NODES:
        raise ConfigError(f"ball rule of {total} nodes is too large; lower the orders")
    idx = np.unravel_index(np.arange(total), sizes)
    xs = [radial[j][0][idx[j]] for j in range(d)]
    wx = np.ones(total)
    for j in range(d):
        wx = wx * radial[j][1][idx[j]]
    ts = []
    remaining = np.ones(total)
    for j in range(d):
        ts.append(xs[j] * remaining)
        remaining = remaining * (1.0 - xs[j])
    points = np.empty((total, d), dtype=complex)
    for j in range(d):
        ang = thetas[j][idx[d + j]]
        points[:, j] = np.sqrt(ts[j]) * np.exp(1j * ang)
    weights = wx * (math.factorial(d) / n_angular ** d)
    return FlatRule(points, weights)


@dataclass
class QuadResult:
    """Quadrature value with an order-comparison error estimate."""

    value: complex
    error: float
    warning: bool = False

    def __complex__(self) -> complex:
        return self.value
