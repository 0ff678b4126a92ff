"""Transfer between a domain and its quotient under a reflection group.

Everything on the quotient side is represented through its pullback: the
unitary Gamma maps a function phi on the quotient to
(1/sqrt|G|) (phi o theta) ell on the source domain, quotient weights are
evaluated as |ell|^2/|J|^2 * omega, and quotient integrals are computed by
pullback quadrature with the |J|^2 change-of-variables factor.  The quotient
domain itself is never meshed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bergman import (TruncatedOperator, Weight, default_orders, interior_residual,
                      mixed_poly_inner, op_product_interior, poly_inner, poly_norm,
                      toeplitz_matrix, berezin)
from .errors import (DimensionError, DomainError, InvarianceError, QbError,
                     SingularPointError, UnsupportedGroupError)
from .groups import Character, ReflectionGroup, generating_polynomial, one_dim_characters
from .isotypic import invariance_residual, relative_invariance_residual
from .multipoly import (MixedSymbol, MultiPoly, PolyMap, basic_map, compose_map,
                        grlex_key, jacobian_det, lift_symbol, theta_degrees)
from .quadrature import polydisc_rule

BRANCH_LOCUS_TOL = 1e-12
WEIGHT_INVARIANCE_TOL = 1e-10
GRAM_TOL = 1e-10
REORTH_THRESHOLD = 1e-8


@dataclass
class QuotientDescriptor:
    """Bundle defining the weighted Bergman space on the quotient domain."""

    group: ReflectionGroup
    theta: PolyMap
    character: Character
    weight: Weight
    ell: MultiPoly
    jacobian: MultiPoly


def quotient_descriptor(group: ReflectionGroup, chi: Character,
                        weight: Weight) -> QuotientDescriptor:
    """Build and validate the descriptor for one one-dimensional character.

    For the sign character the generating polynomial is pinned to the exact
    Jacobian determinant (they agree up to a constant), which normalizes the
    transferred sign weight to one.
    """
    if chi.degree != 1:
        raise UnsupportedGroupError("quotient transfer needs a one-dimensional character")
    if weight.dimension != group.dimension:
        raise DimensionError("weight dimension does not match the group")
    theta = basic_map(group)
    jac = jacobian_det(theta)
    ell = jac if chi.label == "sign" else generating_polynomial(group, chi)

    scale = max(1.0, ell.max_abs_coeff())
    if relative_invariance_residual(group, chi, ell) > WEIGHT_INVARIANCE_TOL * scale:
        raise InvarianceError("generating polynomial fails the relative-invariance check")
    _check_weight_invariance(group, weight)
    return QuotientDescriptor(group, theta, chi, weight, ell, jac)


def _check_weight_invariance(group: ReflectionGroup, weight: Weight,
                             n_points: int = 20) -> None:
    rng = np.random.default_rng(0)
    d = group.dimension
    pts = 0.9 * rng.uniform(0.1, 1.0, (n_points, d)) * np.exp(
        2j * np.pi * rng.uniform(size=(n_points, d)))
    base = weight.omega(pts)
    for g in group.generators:
        moved = pts @ g.matrix.T
        if np.max(np.abs(weight.omega(moved) - base)) > WEIGHT_INVARIANCE_TOL * max(
                1.0, float(np.max(np.abs(base)))):
            raise InvarianceError("weight is not invariant under the group")


def omega_rho_eval(q: QuotientDescriptor, z) -> float:
    """Transferred weight |ell(z)|^2 / |J(z)|^2 * omega(z) at theta(z)."""
    z = np.asarray(z, dtype=complex).ravel()
    jval = complex(q.jacobian.evaluate(list(z)))
    if abs(jval) <= BRANCH_LOCUS_TOL:
        raise SingularPointError("point lies on the branch locus")
    lval = complex(q.ell.evaluate(list(z)))
    return float(abs(lval) ** 2 / abs(jval) ** 2 * q.weight.omega(z[None, :])[0])


def _omega_rho_values(q: QuotientDescriptor, coords: list[np.ndarray]) -> np.ndarray:
    jvals = q.jacobian.evaluate(coords)
    if np.min(np.abs(jvals)) <= BRANCH_LOCUS_TOL:
        raise SingularPointError("quadrature node on the branch locus")
    lvals = q.ell.evaluate(coords)
    pts = np.stack(np.broadcast_arrays(*coords), axis=-1)
    return np.abs(lvals) ** 2 / np.abs(jvals) ** 2 * q.weight.omega(pts)


def gamma_apply(q: QuotientDescriptor, phi: MultiPoly) -> MultiPoly:
    """The unitary Gamma: phi -> (1/sqrt|G|) (phi o theta) ell."""
    if phi.dimension != len(q.theta):
        raise DimensionError("argument dimension does not match the quotient coordinates")
    return compose_map(phi, q.theta) * q.ell * (1.0 / math.sqrt(q.group.order))


# ---------------------------------------------------------------------------
# Orthonormal bases of isotypic components
# ---------------------------------------------------------------------------

@dataclass
class QuotientBasis:
    """Orthonormal basis of one isotypic component up to a truncation box.

    ``vectors`` live on the source domain; ``quotient_polys`` are their
    Gamma-preimages, polynomials in the quotient coordinates.
    """

    labels: list[tuple]
    vectors: list[MultiPoly]
    quotient_polys: list[MultiPoly]
    character: Character
    truncation: int

    def __len__(self) -> int:
        return len(self.labels)


def _invariant_monomial_labels(q: QuotientDescriptor, truncation: int) -> list[tuple[tuple, tuple]]:
    """(label, beta) pairs: beta indexes the invariant monomial in quotient
    coordinates, label its leading exponent tuple on the source domain."""
    group = q.group
    d = group.dimension
    ell_lead, _ = (q.ell.leading_term() if not q.ell.is_zero()
                   else ((0,) * d, 1.0))
    out = []
    if group.kind == "symmetric":
        from itertools import combinations_with_replacement
        delta = tuple(ell_lead)  # (d-1, ..., 0) for sign, zeros for trivial
        for comb in combinations_with_replacement(range(truncation + 1), d):
            lam = tuple(sorted(comb, reverse=True))
            label = tuple(l + dl for l, dl in zip(lam, delta))
            if max(label) > truncation:
                continue
            beta = tuple(lam[i] - (lam[i + 1] if i + 1 < d else 0) for i in range(d))
            out.append((label, beta))
    elif group.kind == "abelian_diagonal":
        from itertools import product as iproduct
        orders = group.orders
        ranges = [range((truncation - ell_lead[i]) // orders[i] + 1)
                  if truncation >= ell_lead[i] else range(0) for i in range(d)]
        for k in iproduct(*ranges):
            label = tuple(ell_lead[i] + k[i] * orders[i] for i in range(d))
            out.append((label, tuple(k)))
    else:
        raise UnsupportedGroupError(f"no basis construction for kind {group.kind!r}")
    out.sort(key=lambda lb: grlex_key(lb[0]))
    seen = set()
    uniq = []
    for label, beta in out:
        if label not in seen:
            seen.add(label)
            uniq.append((label, beta))
    return uniq


def isotypic_basis(q: QuotientDescriptor, truncation: int) -> QuotientBasis:
    """Orthonormal basis {ell * (m o theta)} of the isotypic component.

    Invariant monomials m up to the truncation box are multiplied by the
    generating polynomial and orthonormalized by modified Gram-Schmidt with
    exact monomial inner products (reorthogonalization kicks in if a norm
    collapses).  For the symmetric group these come out as normalized
    antisymmetrized (sign) or symmetrized (trivial) monomials.
    """
    if q.weight.kind != "polydisc":
        raise DomainError("isotypic bases are built over polydisc weights")
    pairs = _invariant_monomial_labels(q, truncation)
    theta = q.theta
    k = len(theta)
    power_memo: dict[tuple, MultiPoly] = {(0,) * k: MultiPoly.constant(1.0, q.group.dimension)}

    def theta_power(beta: tuple) -> MultiPoly:
        if beta in power_memo:
            return power_memo[beta]
        i = next(j for j, b in enumerate(beta) if b)
        prev = tuple(b - int(j == i) for j, b in enumerate(beta))
        power_memo[beta] = theta_power(prev) * theta[i]
        return power_memo[beta]

    labels: list[tuple] = []
    vectors: list[MultiPoly] = []
    qpolys: list[MultiPoly] = []
    sqrt_g = math.sqrt(q.group.order)
    for label, beta in pairs:
        v = q.ell * theta_power(beta)
        qp = MultiPoly(k, {beta: 1.0 + 0j})
        orig = poly_norm(v, q.weight)
        for b, phi in zip(vectors, qpolys):
            r = poly_inner(v, b, q.weight)
            if abs(r) == 0.0:
                continue
            v = v - b * r
            qp = qp - phi * (r / sqrt_g)
        nrm = poly_norm(v, q.weight)
        if nrm < REORTH_THRESHOLD * orig:
            for b, phi in zip(vectors, qpolys):
                r = poly_inner(v, b, q.weight)
                v = v - b * r
                qp = qp - phi * (r / sqrt_g)
            nrm = poly_norm(v, q.weight)
        if nrm <= 1e-14:
            raise QbError(f"basis vector for label {label} collapsed")
        labels.append(label)
        vectors.append(v * (1.0 / nrm))
        qpolys.append(qp * (sqrt_g / nrm))
    return QuotientBasis(labels, vectors, qpolys, q.character, truncation)


# ---------------------------------------------------------------------------
# Compressed Toeplitz matrices: exact and quadrature paths
# ---------------------------------------------------------------------------

def compressed_toeplitz(q: QuotientDescriptor, u_tilde: MixedSymbol,
                        truncation: int, basis: QuotientBasis | None = None) -> TruncatedOperator:
    """Matrix of the Toeplitz operator restricted to the isotypic component.

    Entries <u_tilde b_j, b_i> are exact monomial computations; by the
    intertwining identity this is the matrix of the quotient-side operator
    in the Gamma-pushed basis.
    """
    scale = max(1.0, u_tilde.max_abs_coeff())
    if invariance_residual(q.group, u_tilde) > WEIGHT_INVARIANCE_TOL * scale:
        raise InvarianceError("symbol is not invariant under the group")
    basis = basis or isotypic_basis(q, truncation)
    n = len(basis)
    mat = np.zeros((n, n), dtype=complex)
    for j in range(n):
        s = u_tilde * MixedSymbol.from_poly(basis.vectors[j])
        for i in range(n):
            mat[i, j] = mixed_poly_inner(s, basis.vectors[i], q.weight)
    return TruncatedOperator(mat, list(basis.labels), truncation,
                             band_margin=u_tilde.band())


def quotient_toeplitz_quadrature(q: QuotientDescriptor, u, truncation: int,
                                 orders: tuple[int, int] = (12, 24),
                                 basis: QuotientBasis | None = None,
                                 band_margin: int | None = None) -> TruncatedOperator:
    """Quadrature oracle for :func:`compressed_toeplitz`.

    Integrates <(u o theta) b_j, b_i> over the source domain with the base
    weight; ``u`` is a sampled function on the quotient domain (callable on
    stacked points (..., d)) or a mixed symbol in quotient coordinates.
    """
    basis = basis or isotypic_basis(q, truncation)
    rule = polydisc_rule(q.weight.alpha, *orders)
    meshes = rule.meshes()
    full = np.broadcast_arrays(*meshes)
    coords = [c.ravel() for c in full]
    wfull = None
    for j, wgt in enumerate(rule.axes_weights):
        shape = [1] * rule.dimension
        shape[j] = len(wgt)
        piece = np.asarray(wgt).reshape(shape)
        wfull = piece if wfull is None else wfull * piece
    wts = np.broadcast_to(wfull, full[0].shape).ravel()

    theta_vals = [comp.evaluate(coords) for comp in q.theta.components]
    if hasattr(u, "evaluate"):
        uvals = u.evaluate(theta_vals)
    else:
        uvals = u(np.stack(theta_vals, axis=-1))
    uvals = np.broadcast_to(np.asarray(uvals, dtype=complex), coords[0].shape)

    n = len(basis)
    emat = np.empty((n, len(wts)), dtype=complex)
    for i, vec in enumerate(basis.vectors):
        emat[i] = vec.evaluate(coords)
    weighted = wts * uvals
    mat = (emat.conj() * weighted) @ emat.T
    margin = band_margin if band_margin is not None else (
        u.band() if hasattr(u, "band") else truncation)
    return TruncatedOperator(mat, list(basis.labels), truncation, band_margin=margin)


def kernel_identity_residual(q: QuotientDescriptor, z, y, truncation: int,
                             basis: QuotientBasis | None = None) -> float:
    """Deviation between the component kernel sum_j b_j(z) conj(b_j(y)) and
    (1/|G|) ell(z) K(theta z, theta y) conj(ell(y)) built from the
    Gamma-preimages at the same truncation."""
    z = [complex(c) for c in np.asarray(z, dtype=complex).ravel()]
    y = [complex(c) for c in np.asarray(y, dtype=complex).ravel()]
    for pt in (z, y):
        if abs(complex(q.jacobian.evaluate(pt))) <= BRANCH_LOCUS_TOL:
            raise SingularPointError("kernel evaluation on the branch locus")
    basis = basis or isotypic_basis(q, truncation)
    lhs = sum(complex(b.evaluate(z)) * np.conj(complex(b.evaluate(y)))
              for b in basis.vectors)
    tz = [complex(c.evaluate(z)) for c in q.theta.components]
    ty = [complex(c.evaluate(y)) for c in q.theta.components]
    kq = sum(complex(p.evaluate(tz)) * np.conj(complex(p.evaluate(ty)))
             for p in basis.quotient_polys)
    rhs = (complex(q.ell.evaluate(z)) * kq * np.conj(complex(q.ell.evaluate(y)))
           / q.group.order)
    return float(abs(lhs - rhs))


# ---------------------------------------------------------------------------
# Pullback integration on the quotient domain
# ---------------------------------------------------------------------------

def pushforward_integral(group: ReflectionGroup, weight: Weight, func,
                         orders: tuple[int, int] | None = None) -> complex:
    """Integral over the quotient domain of ``func`` against the transported
    measure: (1/|G|) int (func o theta) |J|^2 omega dV on the source."""
    theta = basic_map(group)
    jac = jacobian_det(theta)
    orders = orders or default_orders(weight)
    rule = polydisc_rule(weight.alpha, *orders)
    meshes = rule.meshes()
    jvals = jac.evaluate(meshes)
    if callable(func) and not hasattr(func, "evaluate"):
        tvals = [c.evaluate(meshes) for c in theta.components]
        fvals = func(np.stack(np.broadcast_arrays(*tvals), axis=-1))
    elif hasattr(func, "evaluate"):
        tvals = [c.evaluate(meshes) for c in theta.components]
        fvals = func.evaluate(tvals)
    else:
        fvals = complex(func)
    vals = fvals * np.abs(jvals) ** 2
    return rule.integrate_values(vals) / group.order


def quotient_volume(group: ReflectionGroup, weight: Weight,
                    orders: tuple[int, int] | None = None) -> float:
    """Pullback volume of the quotient domain under the transported measure."""
    return float(np.real(pushforward_integral(group, weight, 1.0, orders)))


def gamma_isometry_residual(q: QuotientDescriptor, phi: MultiPoly, psi: MultiPoly,
                            orders: tuple[int, int] = (16, 32)) -> float:
    """|<Gamma phi, Gamma psi>_exact - <phi, psi>_quadrature| where the
    quadrature side integrates against the transferred weight omega_rho
    (evaluated off the branch locus) with the |J|^2 pullback factor."""
    exact = poly_inner(gamma_apply(q, phi), gamma_apply(q, psi), q.weight)
    zero_rule = polydisc_rule((0.0,) * q.weight.dimension, *orders)
    meshes = zero_rule.meshes()
    coords = [np.broadcast_to(m, tuple(len(n) for n in zero_rule.axes_nodes))
              for m in meshes]
    fvals = compose_map(phi, q.theta).evaluate(meshes)
    gvals = compose_map(psi, q.theta).evaluate(meshes)
    wvals = _omega_rho_values(q, list(meshes))
    jvals = q.jacobian.evaluate(meshes)
    integrand = fvals * np.conj(gvals) * wvals * np.abs(jvals) ** 2
    quad = zero_rule.integrate_values(integrand) / q.group.order
    return float(abs(exact - quad))


# ---------------------------------------------------------------------------
# Transfer reports
# ---------------------------------------------------------------------------

@dataclass
class CharacterResidual:
    label: str
    residual: float
    passed: bool

    def to_obj(self) -> dict:
        return {"label": self.label, "residual": self.residual, "pass": self.passed}


@dataclass
class TransferReport:
    experiment: str
    group: dict
    characters: list[CharacterResidual]
    full_space: CharacterResidual
    joint_consistent: bool
    tolerance: float

    def all_pass(self) -> bool:
        return all(c.passed for c in self.characters) and self.full_space.passed

    def all_fail(self) -> bool:
        return all(not c.passed for c in self.characters) and not self.full_space.passed

    def to_obj(self) -> dict:
        return {
            "experiment": self.experiment,
            "group": self.group,
            "characters": [c.to_obj() for c in self.characters],
            "full_space": {"residual": self.full_space.residual,
                           "pass": self.full_space.passed},
            "joint_consistent": self.joint_consistent,
            "tolerance": self.tolerance,
        }


def transfer_check(group: ReflectionGroup, weight: Weight, u: MixedSymbol,
                   v: MixedSymbol, qsym: MixedSymbol | None = None,
                   mode: str = "product", truncation: int = 8,
                   tolerance: float = 1e-9) -> TransferReport:
    """Compare T_u T_v against T_q (or T_v T_u) on every one-dimensional
    isotypic component and on the full space, on exact interior blocks.

    The report asserts the joint structure: the identity holds on all
    components and the full space, or fails on all of them.
    """
    if mode not in ("product", "commutator"):
        raise DomainError(f"unknown transfer mode {mode!r}")
    if mode == "product" and qsym is None:
        raise DomainError("product mode needs the target symbol")
    theta = basic_map(group)
    u_t = lift_symbol(u, theta)
    v_t = lift_symbol(v, theta)
    q_t = lift_symbol(qsym, theta) if qsym is not None else None
    margins = u_t.band() + v_t.band()

    def block_residual(t_u: TruncatedOperator, t_v: TruncatedOperator,
                       t_q: TruncatedOperator | None) -> float:
        prod = op_product_interior(t_u, t_v, margins)
        if mode == "product":
            target = t_q.restrict(t_q.interior_positions(margins))
        else:
            target = op_product_interior(t_v, t_u, margins)
        diff = prod.matrix - target.matrix
        return float(np.max(np.abs(diff))) if diff.size else 0.0

    chars = one_dim_characters(group)
    char_rows: list[CharacterResidual] = []
    for chi in chars:
        qd = quotient_descriptor(group, chi, weight)
        basis = isotypic_basis(qd, truncation)
        t_u = compressed_toeplitz(qd, u_t, truncation, basis)
        t_v = compressed_toeplitz(qd, v_t, truncation, basis)
        t_q = compressed_toeplitz(qd, q_t, truncation, basis) if q_t is not None else None
        res = block_residual(t_u, t_v, t_q)
        char_rows.append(CharacterResidual(chi.label, res, res < tolerance))

    t_u = toeplitz_matrix(u_t, weight, truncation)
    t_v = toeplitz_matrix(v_t, weight, truncation)
    t_q = toeplitz_matrix(q_t, weight, truncation) if q_t is not None else None
    res_full = block_residual(t_u, t_v, t_q)
    full = CharacterResidual("full", res_full, res_full < tolerance)

    flags = [c.passed for c in char_rows] + [full.passed]
    joint = all(flags) or not any(flags)
    return TransferReport(
        experiment=f"transfer-{mode}", group=group.to_obj(),
        characters=char_rows, full_space=full, joint_consistent=joint,
        tolerance=tolerance)


# ---------------------------------------------------------------------------
# Harmonic-symbol identities
# ---------------------------------------------------------------------------

@dataclass
class LemmaPrResult:
    point_residuals: list[float]
    operator_residual: float
    berezin_warning: bool

    def berezin_indicator(self, tol: float) -> bool:
        return max(self.point_residuals) < tol

    def operator_indicator(self, tol: float) -> bool:
        return self.operator_residual < tol


def lemma_pr_residual(f1: MultiPoly, f2: MultiPoly, g1: MultiPoly, g2: MultiPoly,
                      h: MixedSymbol, alpha, points,
                      truncation: int = 10,
                      orders: tuple[int, int] | None = None) -> LemmaPrResult:
    """Residuals of the pointwise Berezin identity for T_f T_g = T_h with
    f = f1 + conj(f2), g = g1 + conj(g2).

    Per sample point z the Berezin side evaluates
    |f1 g1 + conj(f2 g2) + f1 conj(g2) - B_alpha(h - conj(f2) g1)(z)|;
    the operator side reports the interior-block residual of T_f T_g - T_h.
    """
    w = Weight.polydisc(alpha)
    arg = h - MixedSymbol.from_conjugate(f2) * MixedSymbol.from_poly(g1)
    residuals = []
    warning = False
    for z in points:
        zz = [complex(c) for c in np.asarray(z, dtype=complex).ravel()]
        lhs = (complex(f1.evaluate(zz)) * complex(g1.evaluate(zz))
               + np.conj(complex(f2.evaluate(zz))) * np.conj(complex(g2.evaluate(zz)))
               + complex(f1.evaluate(zz)) * np.conj(complex(g2.evaluate(zz))))
        rhs = berezin(w, arg, zz, orders=orders)
        warning = warning or rhs.warning
        residuals.append(float(abs(lhs - rhs.value)))

    f_sym = MixedSymbol.from_poly(f1) + MixedSymbol.from_conjugate(f2)
    g_sym = MixedSymbol.from_poly(g1) + MixedSymbol.from_conjugate(g2)
    t_f = toeplitz_matrix(f_sym, w, truncation)
    t_g = toeplitz_matrix(g_sym, w, truncation)
    t_h = toeplitz_matrix(h, w, truncation)
    margins = f_sym.band() + g_sym.band()
    prod = op_product_interior(t_f, t_g, margins)
    target = t_h.restrict(t_h.interior_positions(margins))
    op_res = float(np.max(np.abs(prod.matrix - target.matrix)))
    return LemmaPrResult(residuals, op_res, warning)


def pluriharmonic_lift(u: MixedSymbol, q: QuotientDescriptor) -> MixedSymbol:
    """Pull a quotient-coordinate pluriharmonic symbol back to the source.

    ``u`` must split into a holomorphic and an anti-holomorphic part in the
    quotient coordinates; mixed terms are rejected.  The lift
    p o theta + conj(r o theta) is checked to be pluriharmonic and invariant.
    """
    if not u.is_pluriharmonic():
        raise DomainError("symbol has mixed terms; not pluriharmonic in quotient coordinates")
    p = u.holomorphic_part()
    r = u.antiholomorphic_generator()
    lifted = (MixedSymbol.from_poly(compose_map(p, q.theta))
              + MixedSymbol.from_conjugate(compose_map(r, q.theta)))
    d = q.group.dimension
    for i in range(d):
        for j in range(d):
            if not lifted.mixed_diff(i, j).is_zero():
                raise QbError("lift unexpectedly fails pluriharmonicity")
    scale = max(1.0, lifted.max_abs_coeff())
    if invariance_residual(q.group, lifted) > WEIGHT_INVARIANCE_TOL * scale:
        raise QbError("lift unexpectedly fails invariance")
    return lifted


def adapted_full_toeplitz(group: ReflectionGroup, weight: Weight,
                          u_tilde: MixedSymbol, truncation: int
                          ) -> tuple[np.ndarray, list[tuple[str, int]]]:
    """Full-space Toeplitz matrix in the isotypic-adapted orthonormal basis.

    Returns the matrix over the concatenated component bases (one block per
    one-dimensional character) plus (label, block size) bookkeeping; for S_2
    the two components exhaust the space, so off-diagonal blocks of an
    invariant symbol must vanish.
    """
    bases = []
    blocks = []
    for chi in one_dim_characters(group):
        qd = quotient_descriptor(group, chi, weight)
        basis = isotypic_basis(qd, truncation)
        bases.append(basis)
        blocks.append((chi.label, len(basis)))
    vectors = [v for b in bases for v in b.vectors]
    n = len(vectors)
    mat = np.zeros((n, n), dtype=complex)
    for j in range(n):
        s = u_tilde * MixedSymbol.from_poly(vectors[j])
        for i in range(n):
            mat[i, j] = mixed_poly_inner(s, vectors[i], weight)
    return mat, blocks
