"""Isotypic projections, relative invariants, and rewriting in map coordinates.

The projection onto the component of an irreducible character chi is the
group average (deg chi / |G|) sum_sigma chi(sigma^{-1}) f o sigma^{-1}.
Functions fixed by that projection satisfy f o sigma = chi(sigma) f; the
residual check below uses exactly this form so that projection image and
relative-invariance test agree for every character, real or complex.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DivisibilityError, DomainError, QbError, UnsupportedGroupError
from .groups import Character, ReflectionGroup, full_character_table, generating_polynomial
from .multipoly import (MixedSymbol, MultiPoly, basic_map, compose_map, group_act,
                        grlex_key, monomials_up_to_degree, theta_degrees)

REL_INVARIANCE_TOL = 1e-10
DIVISION_TOL = 1e-10
THETA_SOLVE_TOL = 1e-9


def project(group: ReflectionGroup, chi: Character, f):
    """Orthogonal projection of f onto the chi-isotypic component."""
    acc = None
    scale = chi.degree / group.order
    for i, sigma in enumerate(group.elements):
        weight = chi.value(group.inverse_index[i]) * scale
        term = group_act(sigma, f) * weight
        acc = term if acc is None else acc + term
    return acc


@dataclass
class IsotypicComponent:
    """A character together with an orthonormal basis of its component."""

    character: Character
    basis: list[MultiPoly]
    degree_cap: int


def relative_invariance_residual(group: ReflectionGroup, chi: Character, f) -> float:
    """Max deviation of f o sigma = chi(sigma) f over the group generators."""
    if chi.degree != 1:
        raise UnsupportedGroupError("relative invariance is defined for one-dimensional characters")
    res = 0.0
    for gi in group.generator_indices:
        inv = group.elements[group.inverse_index[gi]]
        lhs = group_act(inv, f)  # f o sigma
        res = max(res, (lhs - f * chi.value(gi)).max_abs_coeff())
    return res


def is_relative_invariant(group, chi, f, tol: float = REL_INVARIANCE_TOL) -> bool:
    scale = max(1.0, f.max_abs_coeff())
    return relative_invariance_residual(group, chi, f) <= tol * scale


def invariance_residual(group: ReflectionGroup, f) -> float:
    """Max deviation of f o sigma = f over the group generators."""
    res = 0.0
    for gi in group.generator_indices:
        inv = group.elements[group.inverse_index[gi]]
        res = max(res, (group_act(inv, f) - f).max_abs_coeff())
    return res


def is_invariant(group, f, tol: float = REL_INVARIANCE_TOL) -> bool:
    scale = max(1.0, f.max_abs_coeff())
    return invariance_residual(group, f) <= tol * scale


def completeness_defect(group: ReflectionGroup, degree_cap: int) -> float:
    """Max coefficient deviation of sum_chi P_chi m - m over monomials of
    total degree <= degree_cap; zero when the character table is complete."""
    table = full_character_table(group)
    defect = 0.0
    for exps in monomials_up_to_degree(group.dimension, degree_cap):
        m = MultiPoly(group.dimension, {exps: 1.0 + 0j})
        total = None
        for chi in table:
            p = project(group, chi, m)
            total = p if total is None else total + p
        defect = max(defect, (total - m).max_abs_coeff())
    return defect


def divide_by_generator(group: ReflectionGroup, chi: Character, f: MultiPoly) -> MultiPoly:
    """Exact quotient f / ell_chi for f in the chi-isotypic component.

    Polynomial long division in graded lexicographic order; a nonzero
    remainder (or a failed relative-invariance check) raises
    DivisibilityError.
    """
    scale = max(1.0, f.max_abs_coeff())
    if relative_invariance_residual(group, chi, f) > REL_INVARIANCE_TOL * scale:
        raise DivisibilityError("polynomial is not relative-invariant for this character")
    ell = generating_polynomial(group, chi)
    quotient, remainder = poly_divmod(f, ell)
    if remainder.max_abs_coeff() > DIVISION_TOL * scale:
        raise DivisibilityError(
            f"remainder of size {remainder.max_abs_coeff():.3e} after division")
    return quotient


def poly_divmod(f: MultiPoly, g: MultiPoly) -> tuple[MultiPoly, MultiPoly]:
    """Single-divisor multivariate division in graded lexicographic order."""
    if g.is_zero():
        raise DomainError("division by the zero polynomial")
    le, lc = g.leading_term()
    q_terms: dict = {}
    r_terms: dict = {}
    work = dict(f.terms)
    while work:
        e = max(work, key=grlex_key)
        c = work.pop(e)
        if all(ei >= gi for ei, gi in zip(e, le)):
            t_e = tuple(ei - gi for ei, gi in zip(e, le))
            t_c = c / lc
            q_terms[t_e] = q_terms.get(t_e, 0.0) + t_c
            for ge, gc in g.terms.items():
                if ge == le:
                    continue
                ne = tuple(a + b for a, b in zip(t_e, ge))
                val = work.get(ne, 0.0) - t_c * gc
                if abs(val) > 1e-15:
                    work[ne] = val
                elif ne in work:
                    del work[ne]
        else:
            r_terms[e] = r_terms.get(e, 0.0) + c
    return MultiPoly(f.dimension, q_terms), MultiPoly(f.dimension, r_terms)


def invariant_to_theta(group: ReflectionGroup, f: MultiPoly) -> MultiPoly:
    """Rewrite an invariant polynomial as a polynomial in the basic map.

    Solves, per homogeneous degree, the linear system expressing f in the
    span of products theta^beta of matching weighted degree; the weighted
    grading (deg theta_i fixed per group) keeps candidate sets small.
    """
    scale = max(1.0, f.max_abs_coeff())
    if invariance_residual(group, f) > REL_INVARIANCE_TOL * scale:
        raise DomainError("polynomial is not invariant under the group")
    theta = basic_map(group)
    degs = theta_degrees(group)
    k = len(theta)

    by_degree: dict[int, dict] = {}
    for e, c in f.terms.items():
        by_degree.setdefault(sum(e), {})[e] = c

    power_memo: dict[tuple, MultiPoly] = {(0,) * k: MultiPoly.constant(1.0, group.dimension)}

    def theta_power(beta: tuple) -> MultiPoly:
        if beta in power_memo:
            return power_memo[beta]
        i = next(j for j, b in enumerate(beta) if b)
        prev = tuple(b - int(j == i) for j, b in enumerate(beta))
        power_memo[beta] = theta_power(prev) * theta[i]
        return power_memo[beta]

    hat_terms: dict = {}
    for degree, part_terms in sorted(by_degree.items()):
        part = MultiPoly(group.dimension, part_terms)
        betas = sorted(_weighted_compositions(degs, degree), key=grlex_key)
        if not betas:
            raise QbError(f"no candidate monomials at weighted degree {degree}")
        cols = [theta_power(b) for b in betas]
        support = sorted({e for p in cols for e in p.terms} | set(part.terms), key=grlex_key)
        pos = {e: i for i, e in enumerate(support)}
        mat = np.zeros((len(support), len(betas)), dtype=complex)
        for j, p in enumerate(cols):
            for e, c in p.terms.items():
                mat[pos[e], j] = c
        rhs = np.zeros(len(support), dtype=complex)
        for e, c in part.terms.items():
            rhs[pos[e]] = c
        x, *_ = np.linalg.lstsq(mat, rhs, rcond=None)
        for beta, coef in zip(betas, x):
            if abs(coef) > 1e-13:
                hat_terms[beta] = hat_terms.get(beta, 0.0) + coef

    hat = MultiPoly(k, hat_terms)
    residual = (compose_map(hat, theta) - f).max_abs_coeff()
    if residual > THETA_SOLVE_TOL * scale:
        raise QbError(f"invariant rewrite residual {residual:.3e} exceeds tolerance")
    return hat


def _weighted_compositions(degs: tuple, total: int) -> list[tuple]:
    """All beta >= 0 with sum beta_i * degs_i = total."""
    if not degs:
        return [()] if total == 0 else []
    out = []
    head = degs[0]
    for b in range(total // head + 1):
        for rest in _weighted_compositions(degs[1:], total - b * head):
            out.append((b,) + rest)
    return out
