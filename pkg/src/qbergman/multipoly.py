"""Sparse multivariate polynomial and mixed-symbol arithmetic.

``MultiPoly`` models holomorphic polynomials in z_1..z_d with complex
coefficients, stored as a map from exponent multi-indices to coefficients.
``MixedSymbol`` models finite sums c * z^a * conj(z)^b, the symbol class for
Toeplitz operators.  ``PolyMap`` is a tuple of polynomials used as a
coordinate map.

The linear group action on functions is (sigma f)(z) = f(sigma^{-1} z);
``group_act`` implements it exactly for permutation and diagonal matrices
and by linear-form expansion otherwise.
"""

from __future__ import annotations

from itertools import permutations, product
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError, DomainError, SizeError, UnsupportedGroupError

# Single source of symbolic tolerance: coefficients below this modulus are
# dropped by every arithmetic operation.
COEFF_TOL = 1e-15
# Per-variable exponent cap; truncation degrees in practice stay tiny.
MAX_EXPONENT = 64


def _pruned(terms: dict) -> dict:
    return {e: c for e, c in terms.items() if abs(c) > COEFF_TOL}


def _check_exponents(exps: Iterable[int]) -> tuple:
    t = tuple(int(e) for e in exps)
    if any(e < 0 for e in t):
        raise DomainError(f"negative exponent in {t}")
    if any(e > MAX_EXPONENT for e in t):
        raise DomainError(f"exponent above cap {MAX_EXPONENT}: {t}")
    return t


def grlex_key(exps: tuple) -> tuple:
    """Graded lexicographic sort key (total degree first, then lex)."""
    return (sum(exps), exps)


class MultiPoly:
    """Sparse polynomial sum(c_a * z^a) in ``dimension`` complex variables."""

    __slots__ = ("dimension", "terms")

    def __init__(self, dimension: int, terms: dict | None = None):
        self.dimension = int(dimension)
        self.terms = _pruned(terms) if terms else {}

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dimension: int) -> "MultiPoly":
        return cls(dimension)

    @classmethod
    def constant(cls, value: complex, dimension: int) -> "MultiPoly":
        return cls(dimension, {(0,) * dimension: complex(value)})

    @classmethod
    def variable(cls, index: int, dimension: int) -> "MultiPoly":
        exps = [0] * dimension
        exps[index] = 1
        return cls(dimension, {tuple(exps): 1.0 + 0.0j})

    @classmethod
    def monomial(cls, exps: Iterable[int], coeff: complex, dimension: int | None = None) -> "MultiPoly":
        t = _check_exponents(exps)
        d = len(t) if dimension is None else int(dimension)
        if len(t) != d:
            raise DimensionError(f"exponent tuple {t} does not match dimension {d}")
        return cls(d, {t: complex(coeff)})

    # -- queries -------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        return max((sum(e) for e in self.terms), default=-1)

    def max_exponent(self) -> int:
        return max((max(e) for e in self.terms), default=0)

    def coeff(self, exps: Iterable[int]) -> complex:
        return self.terms.get(tuple(int(e) for e in exps), 0.0 + 0.0j)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def leading_term(self) -> tuple[tuple, complex]:
        """Largest term in graded lexicographic order."""
        exps = max(self.terms, key=grlex_key)
        return exps, self.terms[exps]

    def allclose(self, other: "MultiPoly", tol: float = 1e-12) -> bool:
        return (self - other).max_abs_coeff() <= tol

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "MultiPoly":
        if isinstance(other, MultiPoly):
            if other.dimension != self.dimension:
                raise DimensionError("polynomial dimensions differ")
            return other
        return MultiPoly.constant(other, self.dimension)

    def __add__(self, other) -> "MultiPoly":
        other = self._coerce(other)
        out = dict(self.terms)
        for e, c in other.terms.items():
            out[e] = out.get(e, 0.0) + c
        return MultiPoly(self.dimension, out)

    __radd__ = __add__

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.dimension, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "MultiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "MultiPoly":
        return (-self) + other

    def __mul__(self, other) -> "MultiPoly":
        if not isinstance(other, MultiPoly):
            c = complex(other)
            return MultiPoly(self.dimension, {e: c * v for e, v in self.terms.items()})
        if other.dimension != self.dimension:
            raise DimensionError("polynomial dimensions differ")
        out: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, 0.0) + c1 * c2
        if out and any(max(e) > MAX_EXPONENT for e in out):
            raise DomainError(f"product exceeds exponent cap {MAX_EXPONENT}")
        return MultiPoly(self.dimension, out)

    __rmul__ = __mul__

    def __truediv__(self, scalar) -> "MultiPoly":
        return self * (1.0 / complex(scalar))

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise DomainError("negative polynomial power")
        out = MultiPoly.constant(1.0, self.dimension)
        base = self
        while k:
            if k & 1:
                out = out * base
            base_needed = k >> 1
            if base_needed:
                base = base * base
            k >>= 1
        return out

    def diff(self, index: int) -> "MultiPoly":
        out: dict = {}
        for e, c in self.terms.items():
            if e[index] == 0:
                continue
            ne = list(e)
            ne[index] -= 1
            out[tuple(ne)] = out.get(tuple(ne), 0.0) + c * e[index]
        return MultiPoly(self.dimension, out)

    # -- evaluation / composition ---------------------------------------

    def evaluate(self, coords: Sequence):
        """Evaluate at coords = (z_1, ..., z_d); entries may be arrays.

        Array arguments are broadcast against each other, so factorized
        tensor grids (z1[:, None], z2[None, :]) evaluate without building
        the full mesh.
        """
        if len(coords) != self.dimension:
            raise DimensionError("coordinate count does not match dimension")
        coords = [np.asarray(c, dtype=complex) for c in coords]
        pows = [_power_table(c, max((e[i] for e in self.terms), default=0))
                for i, c in enumerate(coords)]
        out = None
        for e, c in self.terms.items():
            term = np.asarray(c, dtype=complex)
            for i, ei in enumerate(e):
                if ei:
                    term = term * pows[i][ei]
            out = term if out is None else out + term
        if out is None:
            shape = np.broadcast_shapes(*(c.shape for c in coords))
            return np.zeros(shape, dtype=complex) if shape else 0.0 + 0.0j
        return out

    def __call__(self, coords: Sequence):
        return self.evaluate(coords)

    def compose(self, polys: Sequence["MultiPoly"]) -> "MultiPoly":
        """Substitute polys[i] for variable i; exact polynomial composition."""
        if len(polys) != self.dimension:
            raise DimensionError("substitution count does not match dimension")
        if not polys:
            raise DimensionError("empty substitution")
        d = polys[0].dimension
        if any(p.dimension != d for p in polys):
            raise DimensionError("substituted polynomials disagree in dimension")
        one = MultiPoly.constant(1.0, d)
        pow_memo: list[dict[int, MultiPoly]] = [{0: one} for _ in polys]

        def ppow(i: int, k: int) -> MultiPoly:
            memo = pow_memo[i]
            if k not in memo:
                memo[k] = ppow(i, k - 1) * polys[i]
            return memo[k]

        out = MultiPoly.zero(d)
        for e, c in self.terms.items():
            term = MultiPoly.constant(c, d)
            for i, ei in enumerate(e):
                if ei:
                    term = term * ppow(i, ei)
            out = out + term
        return out

    # -- serialization ---------------------------------------------------

    def to_obj(self) -> list[dict]:
        items = sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))
        return [{"exponents": list(e), "re": float(c.real), "im": float(c.imag)}
                for e, c in items]

    @classmethod
    def from_obj(cls, obj: Iterable[dict], dimension: int) -> "MultiPoly":
        terms = {}
        for t in obj:
            e = _check_exponents(t["exponents"])
            if len(e) != dimension:
                raise DimensionError("exponent length does not match dimension")
            terms[e] = terms.get(e, 0.0) + complex(t.get("re", 0.0), t.get("im", 0.0))
        return cls(dimension, terms)

    def __repr__(self) -> str:
        items = sorted(self.terms.items(), key=lambda kv: grlex_key(kv[0]))
        body = " + ".join(f"({c:.4g})*z^{e}" for e, c in items[:6])
        more = f" +{len(items) - 6} terms" if len(items) > 6 else ""
        return f"MultiPoly[{self.dimension}]({body or '0'}{more})"


def _power_table(arr: np.ndarray, max_exp: int) -> list:
    pows = [np.ones_like(arr)]
    for _ in range(max_exp):
        pows.append(pows[-1] * arr)
    return pows


class MixedSymbol:
    """Finite sum of terms c * z^a * conj(z)^b on C^d.

    Keys are pairs (a, b) of exponent tuples; holomorphic symbols have all
    b = 0, anti-holomorphic all a = 0.
    """

    __slots__ = ("dimension", "terms")

    def __init__(self, dimension: int, terms: dict | None = None):
        self.dimension = int(dimension)
        self.terms = _pruned(terms) if terms else {}

    @classmethod
    def from_poly(cls, p: MultiPoly) -> "MixedSymbol":
        zero = (0,) * p.dimension
        return cls(p.dimension, {(e, zero): c for e, c in p.terms.items()})

    @classmethod
    def from_conjugate(cls, p: MultiPoly) -> "MixedSymbol":
        """The symbol conj(p(z)) with anti-holomorphic exponents from p."""
        zero = (0,) * p.dimension
        return cls(p.dimension, {(zero, e): np.conj(c) for e, c in p.terms.items()})

    @classmethod
    def monomial(cls, exps: Iterable[int], conj_exps: Iterable[int], coeff: complex) -> "MixedSymbol":
        a = _check_exponents(exps)
        b = _check_exponents(conj_exps)
        if len(a) != len(b):
            raise DimensionError("exponent tuples differ in length")
        return cls(len(a), {(a, b): complex(coeff)})

    # -- queries --------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_holomorphic(self) -> bool:
        return all(not any(b) for _, b in self.terms)

    def is_antiholomorphic(self) -> bool:
        return all(not any(a) for a, _ in self.terms)

    def is_pluriharmonic(self) -> bool:
        """True iff no term mixes z and conj(z) exponents."""
        return all(not any(a) or not any(b) for a, b in self.terms)

    def holomorphic_part(self) -> MultiPoly:
        return MultiPoly(self.dimension,
                         {a: c for (a, b), c in self.terms.items() if not any(b)})

    def antiholomorphic_generator(self) -> MultiPoly:
        """Polynomial r with conj(r) equal to the strictly anti-holomorphic part."""
        return MultiPoly(self.dimension,
                         {b: np.conj(c) for (a, b), c in self.terms.items()
                          if not any(a) and any(b)})

    def conjugate(self) -> "MixedSymbol":
        return MixedSymbol(self.dimension,
                           {(b, a): np.conj(c) for (a, b), c in self.terms.items()})

    def band(self) -> int:
        """Max exponent shift max_i |a_i - b_i| over all terms."""
        return max((max(abs(ai - bi) for ai, bi in zip(a, b))
                    for a, b in self.terms), default=0)

    def max_exponent(self) -> int:
        return max((max(max(a), max(b)) for a, b in self.terms), default=0)

    def max_abs_coeff(self) -> float:
        return max((abs(c) for c in self.terms.values()), default=0.0)

    def allclose(self, other: "MixedSymbol", tol: float = 1e-12) -> bool:
        return (self - other).max_abs_coeff() <= tol

    # -- arithmetic ------------------------------------------------------

    def _coerce(self, other) -> "MixedSymbol":
        if isinstance(other, MixedSymbol):
            if other.dimension != self.dimension:
                raise DimensionError("symbol dimensions differ")
            return other
        if isinstance(other, MultiPoly):
            return MixedSymbol.from_poly(self._coerce_dim(other))
        zero = (0,) * self.dimension
        return MixedSymbol(self.dimension, {(zero, zero): complex(other)})

    def _coerce_dim(self, p: MultiPoly) -> MultiPoly:
        if p.dimension != self.dimension:
            raise DimensionError("symbol dimensions differ")
        return p

    def __add__(self, other) -> "MixedSymbol":
        other = self._coerce(other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, 0.0) + c
        return MixedSymbol(self.dimension, out)

    __radd__ = __add__

    def __neg__(self) -> "MixedSymbol":
        return MixedSymbol(self.dimension, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other) -> "MixedSymbol":
        return self + (-self._coerce(other))

    def __mul__(self, other) -> "MixedSymbol":
        if isinstance(other, (int, float, complex)):
            c = complex(other)
            return MixedSymbol(self.dimension, {k: c * v for k, v in self.terms.items()})
        other = self._coerce(other)
        out: dict = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                k = (tuple(x + y for x, y in zip(a1, a2)),
                     tuple(x + y for x, y in zip(b1, b2)))
                out[k] = out.get(k, 0.0) + c1 * c2
        return MixedSymbol(self.dimension, out)

    __rmul__ = __mul__

    def mixed_diff(self, i: int, j: int) -> "MixedSymbol":
        """Second derivative d^2 / (dz_i d conj(z)_j), term by term."""
        out: dict = {}
        for (a, b), c in self.terms.items():
            if a[i] == 0 or b[j] == 0:
                continue
            na, nb = list(a), list(b)
            na[i] -= 1
            nb[j] -= 1
            k = (tuple(na), tuple(nb))
            out[k] = out.get(k, 0.0) + c * a[i] * b[j]
        return MixedSymbol(self.dimension, out)

    def evaluate(self, coords: Sequence):
        if len(coords) != self.dimension:
            raise DimensionError("coordinate count does not match dimension")
        coords = [np.asarray(c, dtype=complex) for c in coords]
        conj = [np.conj(c) for c in coords]
        max_a = [max((a[i] for a, _ in self.terms), default=0) for i in range(self.dimension)]
        max_b = [max((b[i] for _, b in self.terms), default=0) for i in range(self.dimension)]
        pa = [_power_table(c, m) for c, m in zip(coords, max_a)]
        pb = [_power_table(c, m) for c, m in zip(conj, max_b)]
        out = None
        for (a, b), c in self.terms.items():
            term = np.asarray(c, dtype=complex)
            for i in range(self.dimension):
                if a[i]:
                    term = term * pa[i][a[i]]
                if b[i]:
                    term = term * pb[i][b[i]]
            out = term if out is None else out + term
        if out is None:
            shape = np.broadcast_shapes(*(c.shape for c in coords))
            return np.zeros(shape, dtype=complex) if shape else 0.0 + 0.0j
        return out

    def __call__(self, coords: Sequence):
        return self.evaluate(coords)

    # -- serialization ----------------------------------------------------

    def to_obj(self) -> list[dict]:
        items = sorted(self.terms.items(),
                       key=lambda kv: (grlex_key(kv[0][0]), grlex_key(kv[0][1])))
        return [{"exponents": list(a), "conj_exponents": list(b),
                 "re": float(c.real), "im": float(c.imag)}
                for (a, b), c in items]

    @classmethod
    def from_obj(cls, obj: Iterable[dict], dimension: int) -> "MixedSymbol":
        terms = {}
        for t in obj:
            a = _check_exponents(t["exponents"])
            b = _check_exponents(t.get("conj_exponents", [0] * dimension))
            if len(a) != dimension or len(b) != dimension:
                raise DimensionError("exponent length does not match dimension")
            terms[(a, b)] = terms.get((a, b), 0.0) + complex(t.get("re", 0.0), t.get("im", 0.0))
        return cls(dimension, terms)

    def __repr__(self) -> str:
        items = sorted(self.terms.items(),
                       key=lambda kv: (grlex_key(kv[0][0]), grlex_key(kv[0][1])))
        body = " + ".join(f"({c:.4g})*z^{a}*zbar^{b}" for (a, b), c in items[:4])
        more = f" +{len(items) - 4} terms" if len(items) > 4 else ""
        return f"MixedSymbol[{self.dimension}]({body or '0'}{more})"


class PolyMap:
    """Polynomial coordinate map theta = (theta_1, ..., theta_k)."""

    __slots__ = ("components",)

    def __init__(self, components: Sequence[MultiPoly]):
        components = list(components)
        if not components:
            raise DimensionError("empty polynomial map")
        d = components[0].dimension
        if any(p.dimension != d for p in components):
            raise DimensionError("map components disagree in source dimension")
        self.components = components

    @property
    def source_dimension(self) -> int:
        return self.components[0].dimension

    def __len__(self) -> int:
        return len(self.components)

    def __getitem__(self, i: int) -> MultiPoly:
        return self.components[i]

    def evaluate(self, coords: Sequence):
        return [p.evaluate(coords) for p in self.components]

    def to_obj(self) -> dict:
        return {"components": [p.to_obj() for p in self.components],
                "source_dimension": self.source_dimension}


# ---------------------------------------------------------------------------
# Group action on polynomials and symbols
# ---------------------------------------------------------------------------

def group_act(sigma, f):
    """Apply (sigma f)(z) = f(sigma^{-1} z) to a MultiPoly or MixedSymbol.

    ``sigma`` is any object exposing ``matrix`` (d x d complex) and, when
    available, exact fast-path data ``perm`` (coordinate permutation) or
    ``diag`` (diagonal phases).
    """
    d = f.dimension
    perm = getattr(sigma, "perm", None)
    diag = getattr(sigma, "diag", None)
    if perm is not None:
        if len(perm) != d:
            raise DimensionError("group element dimension does not match function")
        return _act_perm(perm, f)
    if diag is not None:
        if len(diag) != d:
            raise DimensionError("group element dimension does not match function")
        return _act_diag(diag, f)
    matrix = np.asarray(sigma.matrix, dtype=complex)
    if matrix.shape != (d, d):
        raise DimensionError("group element dimension does not match function")
    return _act_matrix(matrix, f)


def _permute(exps: tuple, perm: Sequence[int]) -> tuple:
    out = [0] * len(exps)
    for i, e in enumerate(exps):
        out[perm[i]] = e
    return tuple(out)


def _act_perm(perm, f):
    if isinstance(f, MultiPoly):
        return MultiPoly(f.dimension, {_permute(e, perm): c for e, c in f.terms.items()})
    if isinstance(f, MixedSymbol):
        return MixedSymbol(f.dimension,
                           {(_permute(a, perm), _permute(b, perm)): c
                            for (a, b), c in f.terms.items()})
    raise TypeError(f"cannot act on {type(f).__name__}")


def _act_diag(diag, f):
    inv = [1.0 / complex(x) for x in diag]
    if isinstance(f, MultiPoly):
        out = {}
        for e, c in f.terms.items():
            factor = 1.0 + 0j
            for i, ei in enumerate(e):
                if ei:
                    factor *= inv[i] ** ei
            out[e] = out.get(e, 0.0) + c * factor
        return MultiPoly(f.dimension, out)
    if isinstance(f, MixedSymbol):
        out = {}
        for (a, b), c in f.terms.items():
            factor = 1.0 + 0j
            for i, ai in enumerate(a):
                if ai:
                    factor *= inv[i] ** ai
            for i, bi in enumerate(b):
                if bi:
                    factor *= inv[i].conjugate() ** bi
            out[(a, b)] = out.get((a, b), 0.0) + c * factor
        return MixedSymbol(f.dimension, out)
    raise TypeError(f"cannot act on {type(f).__name__}")


def _act_matrix(matrix: np.ndarray, f):
    d = matrix.shape[0]
    inv = np.linalg.inv(matrix)
    rows = [MultiPoly(d, {tuple(int(i == j) for j in range(d)): inv[i, j]
                          for j in range(d) if abs(inv[i, j]) > COEFF_TOL})
            for i in range(d)]
    if isinstance(f, MultiPoly):
        return f.compose(rows)
    if isinstance(f, MixedSymbol):
        conj_rows = [MultiPoly(d, {e: np.conj(c) for e, c in r.terms.items()}) for r in rows]
        out = MixedSymbol(f.dimension)
        for (a, b), c in f.terms.items():
            hol = MultiPoly.constant(c, d)
            for i, ai in enumerate(a):
                if ai:
                    hol = hol * rows[i] ** ai
            anti = MultiPoly.constant(1.0, d)
            for i, bi in enumerate(b):
                if bi:
                    anti = anti * conj_rows[i] ** bi
            term = MixedSymbol(d)
            for ea, ca in hol.terms.items():
                for eb, cb in anti.terms.items():
                    term = term + MixedSymbol(d, {(ea, eb): ca * cb})
            out = out + term
        return out
    raise TypeError(f"cannot act on {type(f).__name__}")


# ---------------------------------------------------------------------------
# Basic polynomial maps and invariants
# ---------------------------------------------------------------------------

def elementary_symmetric(d: int, k: int) -> MultiPoly:
    terms = {}
    for subset in _combinations(range(d), k):
        e = [0] * d
        for i in subset:
            e[i] = 1
        terms[tuple(e)] = 1.0 + 0j
    return MultiPoly(d, terms)


def _combinations(seq, k):
    from itertools import combinations
    return combinations(seq, k)


def basic_map(group) -> PolyMap:
    """Generators of the invariant ring as a coordinate map.

    Symmetric groups get the elementary symmetric polynomials; diagonal
    cyclic groups get the coordinate powers (z_1^{n_1}, ..., z_d^{n_d}).
    """
    d = group.dimension
    if group.kind == "symmetric":
        return PolyMap([elementary_symmetric(d, k) for k in range(1, d + 1)])
    if group.kind == "abelian_diagonal":
        comps = []
        for i, n in enumerate(group.orders):
            e = [0] * d
            e[i] = int(n)
            comps.append(MultiPoly(d, {tuple(e): 1.0 + 0j}))
        return PolyMap(comps)
    raise UnsupportedGroupError(f"no basic map for group kind {group.kind!r}")


def theta_degrees(group) -> tuple[int, ...]:
    """Homogeneous degrees of the basic map components."""
    if group.kind == "symmetric":
        return tuple(range(1, group.dimension + 1))
    if group.kind == "abelian_diagonal":
        return tuple(int(n) for n in group.orders)
    raise UnsupportedGroupError(f"no basic map for group kind {group.kind!r}")


def jacobian_det(theta: PolyMap) -> MultiPoly:
    """Symbolic determinant of the complex Jacobian [d theta_i / d z_j]."""
    d = theta.source_dimension
    if len(theta) != d:
        raise DimensionError("jacobian requires a square map")
    partials = [[theta[i].diff(j) for j in range(d)] for i in range(d)]
    out = MultiPoly.zero(d)
    for perm in permutations(range(d)):
        sign = _perm_sign(perm)
        term = MultiPoly.constant(sign, d)
        for i in range(d):
            term = term * partials[i][perm[i]]
        out = out + term
    return out


def _perm_sign(perm) -> int:
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


def compose_map(f: MultiPoly, theta: PolyMap) -> MultiPoly:
    """Exact composition f(theta_1, ..., theta_k)."""
    if f.dimension != len(theta):
        raise DimensionError("polynomial dimension does not match map component count")
    return f.compose(theta.components)


def lift_symbol(u: MixedSymbol, theta: PolyMap) -> MixedSymbol:
    """Pull a mixed symbol back through theta: sum c (theta^a) conj(theta^b)."""
    if u.dimension != len(theta):
        raise DimensionError("symbol dimension does not match map component count")
    d = theta.source_dimension
    out = MixedSymbol(d)
    for (a, b), c in u.terms.items():
        hol = MultiPoly.constant(1.0, d)
        for i, ai in enumerate(a):
            if ai:
                hol = hol * theta[i] ** ai
        anti = MultiPoly.constant(1.0, d)
        for i, bi in enumerate(b):
            if bi:
                anti = anti * theta[i] ** bi
        out = out + (MixedSymbol.from_poly(hol) * MixedSymbol.from_conjugate(anti)) * c
    return out


def monomials_of_degree(d: int, n: int) -> list[tuple]:
    """All exponent tuples in d variables of total degree exactly n."""
    if d == 1:
        return [(n,)]
    out = []
    for first in range(n + 1):
        for rest in monomials_of_degree(d - 1, n - first):
            out.append((first,) + rest)
    return out


def monomials_up_to_degree(d: int, n: int) -> list[tuple]:
    out = []
    for k in range(n + 1):
        out.extend(monomials_of_degree(d, k))
    return sorted(out, key=grlex_key)


def invariant_dimension(group, n: int) -> int:
    """Dimension of the degree-n homogeneous invariants, by projecting monomials.

    Averages every degree-n monomial over the group and returns the rank of
    the resulting coefficient matrix.
    """
    if n > 20:
        raise SizeError(f"degree {n} above the enumeration bound 20")
    d = group.dimension
    monos = monomials_of_degree(d, n)
    projected = []
    for e in monos:
        f = MultiPoly(d, {e: 1.0 + 0j})
        acc = MultiPoly.zero(d)
        for sigma in group.elements:
            acc = acc + group_act(sigma, f)
        projected.append(acc * (1.0 / group.order))
    support = sorted({e for p in projected for e in p.terms}, key=grlex_key)
    if not support:
        return 0
    pos = {e: i for i, e in enumerate(support)}
    mat = np.zeros((len(projected), len(support)), dtype=complex)
    for r, p in enumerate(projected):
        for e, c in p.terms.items():
            mat[r, pos[e]] = c
    s = np.linalg.svd(mat, compute_uv=False)
    if s.size == 0:
        return 0
    return int(np.sum(s > 1e-8 * max(s[0], 1.0)))
