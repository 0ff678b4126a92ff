"""Weighted Bergman spaces on the polydisc and the ball.

Monomial norms have closed forms (Beta ratios on the polydisc, factorial
ratios on the ball) and are computed as exact rationals whenever the weight
exponents are integers; the tensor quadrature of :mod:`.quadrature` serves
as the independent oracle for every such value.

Toeplitz matrices of mixed polynomial symbols are assembled entry by entry
from norm ratios (no quadrature), and products of banded truncations are
exact on interior index blocks, which is what makes operator identities
checkable without truncation tolerances.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import product as iproduct
from math import lgamma

import numpy as np

from .errors import (ConfigError, DimensionError, DomainError, MarginError,
                     TruncationError)
from .multipoly import MixedSymbol, MultiPoly
from .quadrature import FlatRule, ProductRule, QuadResult, ball_rule, polydisc_rule

INTERIOR_BOUNDARY_TOL = 1e-12
ACCURACY_WARNING_TOL = 1e-5


@dataclass(frozen=True)
class Weight:
    """Weight defining the space: polydisc with exponents alpha, or the
    unweighted ball (normalized volume)."""

    kind: str
    dimension: int
    alpha: tuple | None = None

    @classmethod
    def polydisc(cls, alpha) -> "Weight":
        alpha = tuple(float(a) for a in np.atleast_1d(alpha))
        if any(a <= -1 for a in alpha):
            raise DomainError("polydisc weight needs alpha > -1 in every coordinate")
        return cls("polydisc", len(alpha), alpha)

    @classmethod
    def ball(cls, dimension: int) -> "Weight":
        if dimension < 1:
            raise DomainError("ball dimension must be positive")
        return cls("ball", int(dimension))

    def integer_alpha(self) -> bool:
        return self.kind == "polydisc" and all(float(a).is_integer() for a in self.alpha)

    def omega(self, points: np.ndarray) -> np.ndarray:
        """Weight density at stacked points (..., d)."""
        pts = np.asarray(points, dtype=complex)
        if self.kind == "ball":
            return np.ones(pts.shape[:-1])
        out = np.ones(pts.shape[:-1])
        for i, a in enumerate(self.alpha):
            out = out * (a + 1.0) * (1.0 - np.abs(pts[..., i]) ** 2) ** a
        return out

    def contains(self, point) -> bool:
        z = np.asarray(point, dtype=complex).ravel()
        if z.size != self.dimension:
            raise DimensionError("point dimension does not match the domain")
        if self.kind == "polydisc":
            return bool(np.all(np.abs(z) < 1.0))
        return bool(np.linalg.norm(z) < 1.0)


# ---------------------------------------------------------------------------
# Monomial norms and kernels
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def _disc_norm_sq_fraction(n: int, alpha_int: int) -> Fraction:
    # (alpha+1) * Beta(n+1, alpha+1) = n! (alpha+1)! / (n+alpha+1)!
    return Fraction(math.factorial(n) * math.factorial(alpha_int + 1),
                    math.factorial(n + alpha_int + 1))


def monomial_norm_sq_fraction(exps, w: Weight) -> Fraction:
    """Exact squared norm of z^exps; integer polydisc alpha or ball only."""
    exps = tuple(int(e) for e in exps)
    if w.kind == "ball":
        afact = math.prod(math.factorial(e) for e in exps)
        return Fraction(math.factorial(w.dimension) * afact,
                        math.factorial(w.dimension + sum(exps)))
    if not w.integer_alpha():
        raise DomainError("exact norms need integer alpha")
    out = Fraction(1)
    for n, a in zip(exps, w.alpha):
        out *= _disc_norm_sq_fraction(n, int(a))
    return out


def monomial_norm_sq(exps, w: Weight) -> float:
    """Squared norm of the monomial z^exps in the weighted space."""
    exps = tuple(int(e) for e in exps)
    if len(exps) != w.dimension:
        raise DimensionError("exponent tuple does not match the domain dimension")
    if w.kind == "ball" or w.integer_alpha():
        return float(monomial_norm_sq_fraction(exps, w))
    out = 0.0
    for n, a in zip(exps, w.alpha):
        out += math.log(a + 1.0) + lgamma(n + 1) + lgamma(a + 1) - lgamma(n + a + 2)
    return math.exp(out)


def kernel_eval(w: Weight, z, y) -> complex:
    """Reproducing kernel K(z, y); both points strictly interior."""
    z = np.asarray(z, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    if not (w.contains(z) and w.contains(y)):
        raise DomainError("kernel evaluation requires interior points")
    if w.kind == "polydisc":
        out = 1.0 + 0j
        for zi, yi, a in zip(z, y, w.alpha):
            out *= (1.0 - zi * np.conj(yi)) ** (-(a + 2.0))
        return complex(out)
    return complex((1.0 - np.dot(z, np.conj(y))) ** (-(w.dimension + 1.0)))


def kernel_series(w: Weight, z, y, per_coordinate_cap: int) -> complex:
    """Truncated kernel series sum z^n conj(y)^n / ||z^n||^2."""
    z = np.asarray(z, dtype=complex).ravel()
    y = np.asarray(y, dtype=complex).ravel()
    total = 0.0 + 0j
    for exps in iproduct(range(per_coordinate_cap + 1), repeat=w.dimension):
        num = np.prod(z ** np.array(exps)) * np.conj(np.prod(y ** np.array(exps)))
        total += num / monomial_norm_sq(exps, w)
    return complex(total)


def poly_inner(f: MultiPoly, g: MultiPoly, w: Weight) -> complex:
    """Exact inner product <f, g> from monomial norms."""
    if f.dimension != w.dimension or g.dimension != w.dimension:
        raise DimensionError("polynomial dimension does not match the domain")
    out = 0.0 + 0j
    small, big = (f, g) if len(f.terms) <= len(g.terms) else (g, f)
    for e, c in small.terms.items():
        other = big.terms.get(e)
        if other is None:
            continue
        pair = c * np.conj(other) if small is f else other * np.conj(c)
        out += pair * monomial_norm_sq(e, w)
    return complex(out)


def poly_norm(f: MultiPoly, w: Weight) -> float:
    return math.sqrt(max(poly_inner(f, f, w).real, 0.0))


def mixed_poly_inner(u: MixedSymbol, g: MultiPoly, w: Weight) -> complex:
    """Exact <u, g> for a mixed symbol u against a holomorphic polynomial g."""
    out = 0.0 + 0j
    for (a, b), c in u.terms.items():
        k = tuple(ai - bi for ai, bi in zip(a, b))
        if any(x < 0 for x in k):
            continue
        gc = g.terms.get(k)
        if gc is None:
            continue
        out += c * np.conj(gc) * monomial_norm_sq(a, w)
    return complex(out)


def bergman_project(u: MixedSymbol, w: Weight) -> MultiPoly:
    """Orthogonal projection of a mixed symbol onto the holomorphic span."""
    terms: dict = {}
    for (a, b), c in u.terms.items():
        k = tuple(ai - bi for ai, bi in zip(a, b))
        if any(x < 0 for x in k):
            continue
        coef = c * monomial_norm_sq(a, w) / monomial_norm_sq(k, w)
        terms[k] = terms.get(k, 0.0) + coef
    return MultiPoly(u.dimension, terms)


# ---------------------------------------------------------------------------
# Truncated Toeplitz operators
# ---------------------------------------------------------------------------

def box_indices(dimension: int, truncation: int) -> list[tuple]:
    """Lexicographically ordered multi-indices with every exponent <= N."""
    return list(iproduct(range(truncation + 1), repeat=dimension))


@dataclass
class TruncatedOperator:
    """Finite section of an operator in an indexed orthonormal basis."""

    matrix: np.ndarray
    index_map: list[tuple]
    truncation: int
    band_margin: int = 0

    def __post_init__(self):
        if self.matrix.shape != (len(self.index_map), len(self.index_map)):
            raise DimensionError("matrix shape does not match the index map")

    def interior_positions(self, margins: int) -> list[int]:
        cap = self.truncation - margins
        return [i for i, e in enumerate(self.index_map) if max(e) <= cap]

    def restrict(self, positions: list[int]) -> "TruncatedOperator":
        sub = self.matrix[np.ix_(positions, positions)]
        return TruncatedOperator(sub, [self.index_map[i] for i in positions],
                                 self.truncation, self.band_margin)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.matrix))) if self.matrix.size else 0.0

    def frobenius(self) -> float:
        return float(np.linalg.norm(self.matrix))

    def to_csv(self) -> str:
        lines = ["row,col,re,im"]
        for i in range(self.matrix.shape[0]):
            for j in range(self.matrix.shape[1]):
                v = self.matrix[i, j]
                if v != 0:
                    lines.append(f"{i},{j},{v.real!r},{v.imag!r}")
        return "\n".join(lines) + "\n"

    def to_json_obj(self) -> dict:
        return {
            "truncation": self.truncation,
            "band_margin": self.band_margin,
            "index_map": [list(e) for e in self.index_map],
            "entries": [
                {"row": i, "col": j,
                 "re": float(self.matrix[i, j].real),
                 "im": float(self.matrix[i, j].imag)}
                for i in range(self.matrix.shape[0])
                for j in range(self.matrix.shape[1])
                if self.matrix[i, j] != 0],
        }


def toeplitz_matrix(u: MixedSymbol, w: Weight, truncation: int) -> TruncatedOperator:
    """Exact truncated Toeplitz matrix of a mixed polynomial symbol.

    Entry (n, m) collects c_{a,b} ||z^{m+a}||^2 / (||z^m|| ||z^n||) over
    the terms with n = m + a - b; entries follow from the closed-form norms,
    so the finite section carries no quadrature error.
    """
    if u.dimension != w.dimension:
        raise DimensionError("symbol dimension does not match the domain")
    if u.max_exponent() > truncation:
        raise TruncationError("symbol exponents exceed the truncation order")
    idx = box_indices(w.dimension, truncation)
    pos = {e: i for i, e in enumerate(idx)}
    exact = w.kind == "ball" or w.integer_alpha()
    mat = np.zeros((len(idx), len(idx)), dtype=complex)
    for j, m in enumerate(idx):
        for (a, b), c in u.terms.items():
            n = tuple(mi + ai - bi for mi, ai, bi in zip(m, a, b))
            i = pos.get(n)
            if i is None or any(x < 0 for x in n):
                continue
            ma = tuple(mi + ai for mi, ai in zip(m, a))
            if exact:
                ratio = (monomial_norm_sq_fraction(ma, w) ** 2
                         / (monomial_norm_sq_fraction(m, w) * monomial_norm_sq_fraction(n, w)))
                mat[i, j] += c * math.sqrt(float(ratio))
            else:
                mat[i, j] += c * monomial_norm_sq(ma, w) / math.sqrt(
                    monomial_norm_sq(m, w) * monomial_norm_sq(n, w))
    return TruncatedOperator(mat, idx, truncation, band_margin=u.band())


def op_product_interior(a: TruncatedOperator, b: TruncatedOperator,
                        margins: int) -> TruncatedOperator:
    """Matrix product restricted to the interior block, where it equals the
    true operator composition exactly.

    Requires margins >= band_margin(a) + band_margin(b); a smaller margin is
    refused rather than silently truncated.
    """
    if a.truncation != b.truncation or a.index_map != b.index_map:
        raise DimensionError("operands live on different truncated bases")
    need = a.band_margin + b.band_margin
    if margins < need:
        raise MarginError(f"margin {margins} below required {need}")
    full = a.matrix @ b.matrix
    positions = a.interior_positions(margins)
    sub = full[np.ix_(positions, positions)]
    return TruncatedOperator(sub, [a.index_map[i] for i in positions],
                             a.truncation, band_margin=need)


def interior_residual(a: TruncatedOperator, b: TruncatedOperator, margins: int) -> float:
    """Max-abs difference of two operators on the common interior block."""
    pa = a.interior_positions(margins)
    pb = b.interior_positions(margins)
    if [a.index_map[i] for i in pa] != [b.index_map[i] for i in pb]:
        raise DimensionError("interior blocks do not align")
    diff = a.matrix[np.ix_(pa, pa)] - b.matrix[np.ix_(pb, pb)]
    return float(np.max(np.abs(diff))) if diff.size else 0.0


# ---------------------------------------------------------------------------
# Quadrature oracle, Berezin operator, Moebius maps
# ---------------------------------------------------------------------------

def default_orders(w: Weight) -> tuple[int, int]:
    if w.kind == "polydisc":
        return (64, 128) if w.dimension == 1 else (32, 64)
    return (24, 48)


def rule_for(w: Weight, orders: tuple[int, int]) -> ProductRule | FlatRule:
    n_r, n_a = orders
    if w.kind == "polydisc":
        return polydisc_rule(w.alpha, n_r, n_a)
    return ball_rule(w.dimension, n_r, n_a)


def quadrature_integral(f, w: Weight, orders: tuple[int, int] | None = None) -> QuadResult:
    """Integral of f against the weight measure, with an error estimate from
    comparing the requested orders against the halved ones.

    ``f`` is a MultiPoly/MixedSymbol or a vectorized callable on stacked
    points of shape (..., d).
    """
    orders = orders or default_orders(w)
    lo_orders = (max(orders[0] // 2, 4), max(orders[1] // 2, 8))
    hi = rule_for(w, orders).integrate(f)
    lo = rule_for(w, lo_orders).integrate(f)
    err = abs(hi - lo)
    return QuadResult(hi, err, warning=err > ACCURACY_WARNING_TOL)


def berezin(w: Weight, f, z, orders: tuple[int, int] | None = None) -> QuadResult:
    """Berezin-type transform at an interior point of the polydisc.

    Evaluates prod_i (1-|z_i|^2)^{alpha_i+2} int f(w) prod_i
    |1 - z_i conj(w_i)|^{-(4+2 alpha_i)} omega_alpha(w) dV(w) by tensor
    quadrature; the result carries an accuracy warning when halving the
    orders moves the value by more than 1e-5.
    """
    if w.kind != "polydisc":
        raise DomainError("berezin transform is defined on the polydisc")
    z = np.asarray(z, dtype=complex).ravel()
    if not w.contains(z):
        raise DomainError("berezin transform requires an interior point")
    pref = float(np.prod([(1.0 - abs(zi) ** 2) ** (a + 2.0)
                          for zi, a in zip(z, w.alpha)]))

    f_eval = f.evaluate if hasattr(f, "evaluate") else None

    def integrand(pts: np.ndarray) -> np.ndarray:
        cols = [pts[..., i] for i in range(w.dimension)]
        vals = f_eval(cols) if f_eval is not None else f(pts)
        kern = np.ones(pts.shape[:-1])
        for i, a in enumerate(w.alpha):
            kern = kern * np.abs(1.0 - z[i] * np.conj(cols[i])) ** (-(4.0 + 2.0 * a))
        return vals * kern

    orders = orders or default_orders(w)
    lo_orders = (max(orders[0] // 2, 4), max(orders[1] // 2, 8))
    hi = rule_for(w, orders).integrate(integrand)
    lo = rule_for(w, lo_orders).integrate(integrand)
    err = abs(hi - lo) * pref
    return QuadResult(pref * hi, err, warning=err > ACCURACY_WARNING_TOL)


def moebius_map(a):
    """The involutive automorphism phi_a(w)_j = (a_j - w_j)/(1 - conj(a_j) w_j)."""
    a = np.asarray(a, dtype=complex).ravel()

    def phi(pts: np.ndarray) -> np.ndarray:
        pts = np.asarray(pts, dtype=complex)
        return (a - pts) / (1.0 - np.conj(a) * pts)

    return phi


def moebius_conjugate(u, a):
    """Compose a symbol with phi_a; returns a sampled function on stacked points."""
    phi = moebius_map(a)
    if hasattr(u, "evaluate"):
        dim = u.dimension

        def sampled(pts: np.ndarray) -> np.ndarray:
            moved = phi(pts)
            return u.evaluate([moved[..., i] for i in range(dim)])

        return sampled

    def sampled(pts: np.ndarray) -> np.ndarray:
        return u(phi(pts))

    return sampled


def moebius_weighted_composition(a, beta):
    """Weighted composition f -> (f o phi_a) * prod_j (phi_a'(w_j))^{beta_j/2+1}.

    The derivative factor phi_a'(w) = (|a|^2 - 1)/(1 - conj(a) w)^2 is taken
    with principal branches; unitarity on the weighted space is a numerical
    check, not an assumption.
    """
    a = np.asarray(a, dtype=complex).ravel()
    beta = np.asarray(beta, dtype=float).ravel()
    phi = moebius_map(a)

    def apply(f):
        def out(pts: np.ndarray) -> np.ndarray:
            pts = np.asarray(pts, dtype=complex)
            moved = phi(pts)
            if hasattr(f, "evaluate"):
                vals = f.evaluate([moved[..., i] for i in range(len(a))])
            else:
                vals = f(moved)
            for j in range(len(a)):
                deriv = (np.abs(a[j]) ** 2 - 1.0) / (1.0 - np.conj(a[j]) * pts[..., j]) ** 2
                vals = vals * deriv ** (beta[j] / 2.0 + 1.0)
            return vals

        return out

    return apply


def toeplitz_matrix_quadrature(f, w: Weight, truncation: int,
                               orders: tuple[int, int] | None = None) -> TruncatedOperator:
    """Toeplitz matrix of a sampled symbol via quadrature (oracle path).

    ``f`` is a vectorized callable on stacked points (..., d) or a symbol
    with an ``evaluate`` method.
    """
    orders = orders or default_orders(w)
    rule = rule_for(w, orders)
    idx = box_indices(w.dimension, truncation)
    if isinstance(rule, ProductRule):
        full = np.broadcast_arrays(*rule.meshes())
        coords = [c.ravel() for c in full]
        wfull = None
        for j, wgt in enumerate(rule.axes_weights):
            shape = [1] * rule.dimension
            shape[j] = len(wgt)
            piece = np.asarray(wgt).reshape(shape)
            wfull = piece if wfull is None else wfull * piece
        wts = np.broadcast_to(wfull, full[0].shape).ravel()
        pts = np.stack(coords, axis=-1)
    else:
        pts = rule.points
        wts = rule.weights
        coords = rule.coords()
    if len(idx) * len(wts) > 5 * 10 ** 7:
        raise ConfigError("quadrature Toeplitz grid too large; lower the orders")
    basis = np.empty((len(idx), len(wts)), dtype=complex)
    for r, e in enumerate(idx):
        vals = np.ones(len(wts), dtype=complex)
        for i, ei in enumerate(e):
            if ei:
                vals = vals * coords[i] ** ei
        basis[r] = vals / math.sqrt(monomial_norm_sq(e, w))
    fvals = f.evaluate(coords) if hasattr(f, "evaluate") else f(pts)
    weighted = wts * np.asarray(fvals, dtype=complex)
    mat = (basis.conj() * weighted) @ basis.T
    band = truncation  # sampled symbols are not banded; entire box is boundary-affected
    return TruncatedOperator(mat, idx, truncation, band_margin=band)
