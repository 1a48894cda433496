"""Subspaces of F_q^n in canonical RREF, and exact predicates for forms."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product
from typing import Callable, Iterator

from ..exterior import DUAL, PRIMAL, ExteriorError, Multivector, contract
from ..field import Field, _is_prime


class UnsupportedField(ValueError):
    pass


def check_q(q: int) -> None:
    if q < 3 or q % 2 == 0 or not _is_prime(q):
        raise UnsupportedField(f"q = {q} is not an odd prime")


def gaussian_binomial(n: int, k: int, q: int) -> int:
    if k < 0 or k > n:
        return 0
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


# ---------------------------------------------------------------------------
# integer linear algebra mod p


def rref_mod(rows, p):
    """Reduced row echelon form of integer rows mod p; returns (rows, pivots)."""
    m = [[x % p for x in r] for r in rows]
    ncols = len(m[0]) if m else 0
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        s = pow(m[r][c], p - 2, p)
        m[r] = [(x * s) % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(x) for x in m[:r]], pivots


def rank_mod(rows, p) -> int:
    return len(rref_mod(rows, p)[1]) if rows else 0


def nullspace_mod(rows, p, ncols):
    """Basis of {v : r·v = 0 for all rows}."""
    if not rows:
        return [tuple(int(i == j) for j in range(ncols)) for i in range(ncols)]
    red, piv = rref_mod(rows, p)
    out = []
    for f in (c for c in range(ncols) if c not in piv):
        v = [0] * ncols
        v[f] = 1
        for r, c in zip(red, piv):
            v[c] = (-r[f]) % p
        out.append(tuple(v))
    return out


def projective_points(dim: int, p: int):
    """Normalized representatives of the points of P^{dim-1}(F_p)."""
    for lead in range(dim):
        for tail in product(range(p), repeat=dim - lead - 1):
            yield (0,) * lead + (1,) + tail


# ---------------------------------------------------------------------------
# subspaces


@dataclass(frozen=True)
class Subspace:
    k: int
    n: int
    q: int
    basis: tuple  # k rows of length n, canonical RREF

    @classmethod
    def from_rows(cls, rows, q: int, n: int | None = None) -> "Subspace":
        rows = [list(r) for r in rows]
        if n is None:
            if not rows:
                raise ValueError("need n for the zero subspace")
            n = len(rows[0])
        red, _ = rref_mod(rows, q) if rows else ([], [])
        return cls(len(red), n, q, tuple(red))

    @property
    def pivots(self):
        return tuple(next(j for j, x in enumerate(r) if x) for r in self.basis)

    def vectors(self, field: Field | None = None, variance=PRIMAL):
        field = field or Field(self.q)
        return [Multivector.vector(field, r, variance) for r in self.basis]

    def contains(self, v) -> bool:
        return rank_mod(list(self.basis) + [list(v)], self.q) == self.k

    def __le__(self, other: "Subspace") -> bool:
        return all(other.contains(r) for r in self.basis)

    def is_canonical(self) -> bool:
        red, piv = rref_mod(list(self.basis), self.q) if self.basis else ([], [])
        return tuple(red) == self.basis and len(piv) == self.k


def _free_columns(pattern, n):
    """Free positions of each RREF row for a pivot pattern."""
    return [[j for j in range(c + 1, n) if j not in pattern] for c in pattern]


def enum_subspaces(
    k: int, n: int, q: int, prune: Callable[[list], bool] | None = None
) -> Iterator[Subspace]:
    """Every k-subspace of F_q^n exactly once, in RREF.

    ``prune(rows)`` is called on each completed prefix of rows; returning
    False skips every subspace extending that prefix. It must be monotone,
    i.e. a prefix that fails can never be completed to an accepted subspace.
    """
    check_q(q)
    if not 0 <= k <= n:
        raise ValueError(f"need 0 <= k <= n, got k={k}, n={n}")
    if k == 0:
        yield Subspace(0, n, q, ())
        return
    for pattern in combinations(range(n), k):
        frees = _free_columns(pattern, n)

        def rows_for(r):
            for vals in product(range(q), repeat=len(frees[r])):
                row = [0] * n
                row[pattern[r]] = 1
                for j, v in zip(frees[r], vals):
                    row[j] = v
                yield tuple(row)

        def dfs(prefix):
            r = len(prefix)
            if r == k:
                yield Subspace(k, n, q, tuple(prefix))
                return
            for row in rows_for(r):
                nxt = prefix + [row]
                if prune is None or prune(nxt):
                    yield from dfs(nxt)

        yield from dfs([])


# ---------------------------------------------------------------------------
# predicates on forms


def _as_vectors(U, field):
    if isinstance(U, Subspace):
        return U.vectors(field)
    return [v if isinstance(v, Multivector) else Multivector.vector(field, v) for v in U]


def _contract_all(form: Multivector, vecs):
    out = form
    for v in vecs:
        if v.variance == out.variance:
            v = Multivector(v.dim, v.grade, out.variance.opposite, v.coeffs, v.field)
        out = contract(out, v)
    return out


def annihilated_by(form: Multivector, U) -> bool:
    """True iff form ⌟ (u_1 ∧ ... ∧ u_k) = 0."""
    vecs = _as_vectors(U, form.field)
    if len(vecs) > form.grade:
        raise ExteriorError(f"cannot annihilate a {len(vecs)}-space by a {form.grade}-form")
    return _contract_all(form, vecs).is_zero()


def isotropic_for(form: Multivector, U) -> bool:
    """True iff the form vanishes on every form.grade-tuple of vectors of U."""
    vecs = _as_vectors(U, form.field)
    if len(vecs) < form.grade:
        raise ExteriorError(f"a {len(vecs)}-space cannot be isotropic for a {form.grade}-form")
    for sub in combinations(vecs, form.grade):
        if not _contract_all(form, sub).is_zero():
            return False
    return True


def dense(form: Multivector, p: int):
    """Coefficients as a list indexed by bitmask, reduced mod p."""
    out = [0] * (1 << form.dim)
    for idx, c in form.terms():
        m = sum(1 << i for i in idx)
        out[m] = int(c) % p if not hasattr(c, "numerator") else _frac_mod(c, p)
    return out


def _frac_mod(c, p):
    num, den = c.numerator, c.denominator
    if den % p == 0:
        raise ValueError(f"coefficient {c} is not defined mod {p}")
    return num * pow(den, p - 2, p) % p


__all__ = [
    "DUAL", "PRIMAL", "Subspace", "UnsupportedField", "annihilated_by", "check_q", "dense",
    "enum_subspaces", "gaussian_binomial", "isotropic_for", "nullspace_mod", "projective_points",
    "rank_mod", "rref_mod",
]
