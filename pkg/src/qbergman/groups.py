"""Finite pseudoreflection groups: enumeration, hyperplanes, characters.

Two group families are constructed explicitly: the permutation groups S_d
acting by coordinate permutation, and products of cyclic groups acting by
diagonal root-of-unity matrices.  Both keep exact fast-path data (the
permutation or the root-of-unity exponents) alongside the complex matrix.

Also provides the Smith normal form of integer matrices and the cyclic
quotient group attached to a monomial polyhedron.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations, permutations, product

import numpy as np

from .errors import (DomainError, QbError, RankError, SizeError,
                     UnsupportedGroupError)
from .multipoly import MultiPoly, basic_map, group_act, jacobian_det

MATCH_TOL = 1e-12  # entrywise tolerance for element equality
GROUP_ORDER_BOUND = 10 ** 5


@dataclass(frozen=True)
class GroupElement:
    """One group element: a d x d complex matrix plus exact fast-path data.

    ``perm`` maps source coordinate j to target slot perm[j], so the matrix
    has M[perm[j], j] = 1.  ``diag`` holds the diagonal phases.  At most one
    of the two is set; generic elements carry only the matrix.
    """

    matrix: np.ndarray
    perm: tuple | None = None
    diag: tuple | None = None
    order_hint: int | None = None

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def det(self) -> complex:
        if self.perm is not None:
            return complex(_perm_parity(self.perm))
        if self.diag is not None:
            return complex(np.prod(np.asarray(self.diag, dtype=complex)))
        return complex(np.linalg.det(self.matrix))

    def inverse(self) -> "GroupElement":
        if self.perm is not None:
            inv = [0] * len(self.perm)
            for j, pj in enumerate(self.perm):
                inv[pj] = j
            return GroupElement(self.matrix.conj().T, perm=tuple(inv),
                                order_hint=self.order_hint)
        if self.diag is not None:
            inv_d = tuple(1.0 / complex(x) for x in self.diag)
            return GroupElement(np.diag(inv_d), diag=inv_d, order_hint=self.order_hint)
        return GroupElement(np.linalg.inv(self.matrix), order_hint=self.order_hint)

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        if self.perm is not None and other.perm is not None:
            comp = tuple(self.perm[other.perm[j]] for j in range(len(self.perm)))
            return GroupElement(self.matrix @ other.matrix, perm=comp)
        if self.diag is not None and other.diag is not None:
            d = tuple(complex(a) * complex(b) for a, b in zip(self.diag, other.diag))
            return GroupElement(np.diag(d), diag=d)
        return GroupElement(self.matrix @ other.matrix)

    def __eq__(self, other) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return (self.matrix.shape == other.matrix.shape
                and bool(np.all(np.abs(self.matrix - other.matrix) <= MATCH_TOL)))

    def __hash__(self) -> int:
        return hash(np.round(self.matrix, 9).tobytes())

    def __repr__(self) -> str:
        if self.perm is not None:
            return f"GroupElement(perm={self.perm})"
        if self.diag is not None:
            return f"GroupElement(diag={tuple(np.round(np.asarray(self.diag), 6))})"
        return f"GroupElement(matrix={np.round(self.matrix, 6).tolist()})"


def _perm_parity(perm) -> int:
    seen = [False] * len(perm)
    sign = 1
    for i in range(len(perm)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


@dataclass(frozen=True)
class Hyperplane:
    """Reflecting hyperplane: zero set of a linear form, with its cyclic fixer.

    The form is normalized so its first nonzero coefficient is 1, which pins
    the scalar ambiguity and makes deduplication deterministic.
    """

    linear_form: tuple
    cyclic_order: int
    generator_index: int

    def form_poly(self, dimension: int) -> MultiPoly:
        return MultiPoly(dimension, {
            tuple(int(i == j) for j in range(dimension)): complex(c)
            for i, c in enumerate(self.linear_form) if abs(c) > 1e-14})


@dataclass
class Character:
    """A character of the group, stored as values aligned with ``elements``.

    ``exponents_c`` holds, per reflecting hyperplane, the least c_i >= 0 with
    chi(a_i) = det(a_i)^{c_i}; it is defined for one-dimensional characters
    only (None otherwise).
    """

    label: str
    values: tuple
    degree: int = 1
    exponents_c: tuple | None = None

    def value(self, index: int) -> complex:
        return self.values[index]

    def is_trivial(self) -> bool:
        return all(abs(v - 1.0) < 1e-12 for v in self.values)


class ReflectionGroup:
    """Enumerated finite pseudoreflection group with hyperplane data."""

    def __init__(self, dimension: int, elements: list[GroupElement],
                 generator_indices: list[int], kind: str,
                 orders: tuple | None = None):
        self.dimension = int(dimension)
        self.elements = elements
        self.generator_indices = list(generator_indices)
        self.kind = kind
        self.orders = tuple(int(n) for n in orders) if orders is not None else None
        self._index = {e: i for i, e in enumerate(elements)}
        self.inverse_index = [self.element_index(e.inverse()) for e in elements]
        self.hyperplanes: list[Hyperplane] = _reflecting_hyperplanes(self)

    @property
    def order(self) -> int:
        return len(self.elements)

    @property
    def generators(self) -> list[GroupElement]:
        return [self.elements[i] for i in self.generator_indices]

    def element_index(self, e: GroupElement) -> int:
        i = self._index.get(e)
        if i is not None:
            return i
        # hash collision fallback: linear scan with tolerant equality
        for j, other in enumerate(self.elements):
            if other == e:
                return j
        raise QbError("element does not belong to the group")

    def identity_index(self) -> int:
        eye = GroupElement(np.eye(self.dimension, dtype=complex))
        return self.element_index(eye)

    def to_obj(self) -> dict:
        desc: dict = {"kind": self.kind, "dimension": self.dimension,
                      "order": self.order}
        if self.kind == "symmetric":
            desc["degree"] = self.dimension
        if self.orders is not None:
            desc["orders"] = list(self.orders)
        desc["generators"] = [
            [[float(x.real), float(x.imag)] for x in g.matrix.ravel()]
            for g in self.generators]
        return desc

    def __repr__(self) -> str:
        return f"ReflectionGroup(kind={self.kind!r}, d={self.dimension}, order={self.order})"


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------

def symmetric_group(d: int) -> ReflectionGroup:
    """S_d acting on C^d by permuting coordinates; 2 <= d <= 6."""
    if not 2 <= d <= 6:
        raise SizeError(f"symmetric group supported for 2 <= d <= 6, got {d}")
    elements = []
    for p in permutations(range(d)):
        m = np.zeros((d, d), dtype=complex)
        for j in range(d):
            m[p[j], j] = 1.0
        elements.append(GroupElement(m, perm=p))
    gen_idx = []
    for i, e in enumerate(elements):
        p = e.perm
        swapped = [j for j in range(d) if p[j] != j]
        if len(swapped) == 2 and abs(swapped[0] - swapped[1]) == 1:
            gen_idx.append(i)
    return ReflectionGroup(d, elements, gen_idx, kind="symmetric")


def cyclic_diagonal_group(orders) -> ReflectionGroup:
    """Product of cyclic groups Z/n_1 x ... x Z/n_d acting diagonally."""
    orders = tuple(int(n) for n in orders)
    if not orders or any(n < 1 for n in orders):
        raise DomainError(f"orders must be positive integers, got {orders}")
    total = math.prod(orders)
    if total > GROUP_ORDER_BOUND:
        raise SizeError(f"group order {total} above the enumeration bound {GROUP_ORDER_BOUND}")
    d = len(orders)
    elements = []
    for ks in product(*(range(n) for n in orders)):
        diag = tuple(np.exp(2j * np.pi * k / n) if n > 1 else 1.0 + 0j
                     for k, n in zip(ks, orders))
        elements.append(GroupElement(np.diag(diag), diag=diag))
    gen_idx = []
    for i, ks in enumerate(product(*(range(n) for n in orders))):
        if sum(ks) == 1:  # one coordinate generator at a time
            gen_idx.append(i)
    if not gen_idx:  # trivial group
        gen_idx = [0]
    return ReflectionGroup(d, elements, gen_idx, kind="abelian_diagonal", orders=orders)


# ---------------------------------------------------------------------------
# Reflecting hyperplanes
# ---------------------------------------------------------------------------

def _normalize_form(row: np.ndarray) -> tuple:
    idx = next(i for i in range(len(row)) if abs(row[i]) > 1e-10)
    form = row / row[idx]
    form[np.abs(form) < 1e-12] = 0.0
    return tuple(complex(x) for x in form)


def _reflecting_hyperplanes(group: ReflectionGroup) -> list[Hyperplane]:
    d = group.dimension
    eye = np.eye(d, dtype=complex)
    buckets: dict[tuple, list[int]] = {}
    order: list[tuple] = []
    for i, e in enumerate(group.elements):
        diff = eye - e.matrix
        s = np.linalg.svd(diff, compute_uv=False)
        rank = int(np.sum(s > 1e-10))
        if rank != 1:
            continue
        row = diff[int(np.argmax(np.linalg.norm(diff, axis=1)))]
        form = _normalize_form(row)
        key = tuple(np.round(np.asarray(form), 9).tolist())
        if key not in buckets:
            buckets[key] = []
            order.append(key)
        buckets[key].append(i)
    out = []
    for key in order:
        fixers = buckets[key]
        m = len(fixers) + 1
        gen = _pick_cyclic_generator(group, fixers, m)
        diff = eye - group.elements[fixers[0]].matrix
        row = diff[int(np.argmax(np.linalg.norm(diff, axis=1)))]
        out.append(Hyperplane(_normalize_form(row), m, gen))
    return out


def _pick_cyclic_generator(group: ReflectionGroup, fixers: list[int], m: int) -> int:
    """Prefer the fixer whose determinant is exp(2 pi i / m)."""
    target = np.exp(2j * np.pi / m)
    best, best_err = fixers[0], np.inf
    for i in fixers:
        err = abs(group.elements[i].det() - target)
        if err < best_err:
            best, best_err = i, err
    return best


def reflecting_hyperplanes(group: ReflectionGroup) -> list[Hyperplane]:
    """Distinct reflecting hyperplanes with their cyclic orders."""
    return list(group.hyperplanes)


# ---------------------------------------------------------------------------
# Characters
# ---------------------------------------------------------------------------

def _exponents_c(group: ReflectionGroup, values) -> tuple:
    """Least c_i >= 0 with chi(a_i) = det(a_i)^{c_i} per hyperplane."""
    out = []
    for h in group.hyperplanes:
        a = group.elements[h.generator_index]
        det = a.det()
        chi = values[h.generator_index]
        for c in range(h.cyclic_order):
            if abs(det ** c - chi) < 1e-9:
                out.append(c)
                break
        else:
            raise QbError("character value is not a power of the generator determinant")
    return tuple(out)


def one_dim_characters(group: ReflectionGroup) -> list[Character]:
    """All one-dimensional characters, with hyperplane exponents attached."""
    if group.kind == "symmetric":
        trivial = tuple(1.0 + 0j for _ in group.elements)
        sign = tuple(1.0 / e.det() for e in group.elements)
        chars = [Character("trivial", trivial), Character("sign", sign)]
    elif group.kind == "abelian_diagonal":
        orders = group.orders
        ks = list(product(*(range(n) for n in orders)))
        chars = []
        for cs in ks:
            values = tuple(
                complex(np.prod([np.exp(2j * np.pi * k * c / n) if n > 1 else 1.0
                                 for k, c, n in zip(kt, cs, orders)]))
                for kt in ks)
            if all(c == 0 for c in cs):
                label = "trivial"
            elif all(c == (n - 1) % n for c, n in zip(cs, orders)) and any(n > 1 for n in orders):
                label = "sign"
            else:
                label = "chi_" + "_".join(str(c) for c in cs)
            chars.append(Character(label, values))
    else:
        raise UnsupportedGroupError(
            f"characters must be supplied for group kind {group.kind!r}")
    for ch in chars:
        ch.exponents_c = _exponents_c(group, ch.values)
    return chars


def character_by_label(group: ReflectionGroup, label: str) -> Character:
    for ch in one_dim_characters(group):
        if ch.label == label:
            return ch
    raise QbError(f"no one-dimensional character labelled {label!r}")


def full_character_table(group: ReflectionGroup) -> list[Character]:
    """Complete irreducible character table; available for S_2, S_3 and
    abelian diagonal groups."""
    if group.kind == "abelian_diagonal":
        return one_dim_characters(group)
    if group.kind == "symmetric" and group.dimension == 2:
        return one_dim_characters(group)
    if group.kind == "symmetric" and group.dimension == 3:
        chars = one_dim_characters(group)
        std = tuple(complex(sum(1 for j, pj in enumerate(e.perm) if pj == j) - 1)
                    for e in group.elements)
        chars.append(Character("standard", std, degree=2))
        return chars
    raise UnsupportedGroupError(
        f"complete character table not available for {group!r}")


def generating_polynomial(group: ReflectionGroup, chi: Character) -> MultiPoly:
    """Product of hyperplane forms to the character exponents.

    For the sign character this equals the Jacobian determinant of the basic
    map up to a nonzero constant.
    """
    if chi.degree != 1:
        raise UnsupportedGroupError("generating polynomials exist for one-dimensional characters only")
    exps = chi.exponents_c if chi.exponents_c is not None else _exponents_c(group, chi.values)
    out = MultiPoly.constant(1.0, group.dimension)
    for h, c in zip(group.hyperplanes, exps):
        if c:
            out = out * h.form_poly(group.dimension) ** c
    return out


def sign_jacobian_scale(group: ReflectionGroup) -> complex:
    """Constant c with jacobian_det(basic_map) = c * generating_polynomial(sign)."""
    jac = jacobian_det(basic_map(group))
    ell = generating_polynomial(group, character_by_label(group, "sign"))
    e, c = ell.leading_term()
    return jac.coeff(e) / c


# ---------------------------------------------------------------------------
# Smith normal form and monomial polyhedra
# ---------------------------------------------------------------------------

def _int_det(a: list[list[int]]) -> int:
    n = len(a)
    if n == 1:
        return a[0][0]
    det = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in a[1:]]
        det += (-1) ** j * a[0][j] * _int_det(minor)
    return det


def _adjugate(a: list[list[int]]) -> list[list[int]]:
    n = len(a)
    if n == 1:
        return [[1]]
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1:] for k, row in enumerate(a) if k != i]
            adj[j][i] = (-1) ** (i + j) * _int_det(minor)
    return adj


def smith_normal_form(a) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Decompose an integer matrix as A = P D Q with P, Q unimodular and
    D = diag(d_1, ..., d_n), d_i > 0, d_i | d_{i+1}."""
    b = [[int(x) for x in row] for row in np.asarray(a).tolist()]
    n = len(b)
    if any(len(row) != n for row in b):
        raise DomainError("matrix must be square")
    if _int_det(b) == 0:
        raise RankError("matrix is singular")
    p = [[int(i == j) for j in range(n)] for i in range(n)]
    q = [[int(i == j) for j in range(n)] for i in range(n)]

    # Row op on b (left E) updates p <- p E^{-1}; column op (right F)
    # updates q <- F^{-1} q; the invariant b0 = p b q is preserved.
    def row_swap(i, j):
        b[i], b[j] = b[j], b[i]
        for r in p:
            r[i], r[j] = r[j], r[i]

    def col_swap(i, j):
        for r in b:
            r[i], r[j] = r[j], r[i]
        q[i], q[j] = q[j], q[i]

    def row_add(dst, src, k):  # b[dst] += k*b[src]
        for c in range(n):
            b[dst][c] += k * b[src][c]
        for r in p:
            r[src] -= k * r[dst]

    def col_add(dst, src, k):  # b[:,dst] += k*b[:,src]
        for r in b:
            r[dst] += k * r[src]
        for c in range(n):
            q[src][c] -= k * q[dst][c]

    def row_negate(i):
        for c in range(n):
            b[i][c] = -b[i][c]
        for r in p:
            r[i] = -r[i]

    for t in range(n):
        while True:
            pivot = None
            for i in range(t, n):
                for j in range(t, n):
                    if b[i][j] != 0 and (pivot is None or abs(b[i][j]) < abs(b[pivot[0]][pivot[1]])):
                        pivot = (i, j)
            if pivot is None:
                raise RankError("matrix is singular")
            if pivot != (t, t):
                if pivot[0] != t:
                    row_swap(t, pivot[0])
                if pivot[1] != t:
                    col_swap(t, pivot[1])
            dirty = False
            for i in range(t + 1, n):
                if b[i][t] != 0:
                    row_add(i, t, -(b[i][t] // b[t][t]))
                    dirty = dirty or b[i][t] != 0
            for j in range(t + 1, n):
                if b[t][j] != 0:
                    col_add(j, t, -(b[t][j] // b[t][t]))
                    dirty = dirty or b[t][j] != 0
            if dirty:
                continue
            # pivot must divide the rest of the submatrix
            offender = None
            for i in range(t + 1, n):
                for j in range(t + 1, n):
                    if b[i][j] % b[t][t] != 0:
                        offender = i
                        break
                if offender is not None:
                    break
            if offender is None:
                break
            row_add(t, offender, 1)
        if b[t][t] < 0:
            row_negate(t)

    P = np.array(p, dtype=int)
    D = np.array(b, dtype=int)
    Q = np.array(q, dtype=int)
    return P, D, Q


def monomial_polyhedron_group(b) -> tuple[ReflectionGroup, list[int]]:
    """Cyclic quotient data of the monomial polyhedron |z^{b^k}| < 1.

    Requires det(B) > 0 and B^{-1} >= 0 entrywise (checked exactly via the
    adjugate).  Returns the diagonal cyclic group built from the Smith
    normal form diagonal of adj(B); unit factors are kept for index
    stability.
    """
    mat = [[int(x) for x in row] for row in np.asarray(b).tolist()]
    n = len(mat)
    if any(len(row) != n for row in mat):
        raise DomainError("matrix must be square")
    det = _int_det(mat)
    if det <= 0:
        raise DomainError(f"det(B) = {det} must be positive")
    adj = _adjugate(mat)
    if any(x < 0 for row in adj for x in row):
        raise DomainError("B^{-1} has negative entries; not a monomial polyhedron matrix")
    _, d, _ = smith_normal_form(adj)
    deltas = [int(d[i][i]) for i in range(n)]
    return cyclic_diagonal_group(deltas), deltas
