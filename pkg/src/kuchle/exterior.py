"""Graded multivectors and forms on spaces of dimension at most 8.

Basis elements are index subsets stored as bitmasks. A multivector of grade p
on an n-space keeps its C(n, p) coefficients in the order of
``itertools.combinations(range(n), p)``.

Conventions:

* ``x_I(e_J) = det`` of the Kronecker block, so ``x_{0123}(e_0, e_1, e_2, e_3) = 1``;
* contraction puts the small factor in the *leading* slots,
  ``(xi ⌟ v)(v_1, ...) = xi(v, v_1, ...)``;
* the ε-dual of a form is ``ε ⌟ xi``; the dual of a polyvector ω contracts
  ε^{-1} with ω in its trailing slots, so dualizing twice is the identity;
* with these choices ``ω ⌟ xi = ± (xi^∨) ⌟ (ω^∨)`` with the sign given by
  :func:`duality_sign`.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

from . import linalg
from .field import Field

MAX_DIM = 8


class Variance(enum.Enum):
    PRIMAL = "primal"  # element of ∧^p V
    DUAL = "dual"  # element of ∧^p V^∨

    @property
    def opposite(self) -> "Variance":
        return Variance.DUAL if self is Variance.PRIMAL else Variance.PRIMAL


PRIMAL = Variance.PRIMAL
DUAL = Variance.DUAL


class ExteriorError(ValueError):
    pass


@lru_cache(maxsize=None)
def basis(n: int, p: int) -> tuple[tuple[int, ...], ...]:
    return tuple(combinations(range(n), p))


@lru_cache(maxsize=None)
def _masks(n: int, p: int) -> tuple[int, ...]:
    return tuple(sum(1 << i for i in idx) for idx in basis(n, p))


@lru_cache(maxsize=None)
def _index(n: int, p: int) -> dict[int, int]:
    return {m: k for k, m in enumerate(_masks(n, p))}


def merge_sign(a: int, b: int) -> int:
    """Sign of sorting the concatenation (indices of a) + (indices of b).

    Returns 0 when a and b overlap.
    """
    if a & b:
        return 0
    inversions = 0
    while b:
        low = b & -b
        # elements of a above this element of b must hop over it
        inversions += bin(a & ~((low << 1) - 1)).count("1")
        b ^= low
    return -1 if inversions & 1 else 1


def _mask_of(indices) -> int:
    m = 0
    for i in indices:
        if m >> i & 1:
            return -1
        m |= 1 << i
    return m


def _perm_sign(seq) -> int:
    seq = list(seq)
    inv = sum(1 for i in range(len(seq)) for j in range(i + 1, len(seq)) if seq[i] > seq[j])
    return -1 if inv & 1 else 1


@dataclass(frozen=True)
class Multivector:
    dim: int
    grade: int
    variance: Variance
    coeffs: tuple
    field: Field

    def __post_init__(self):
        if not 0 <= self.dim <= MAX_DIM:
            raise ExteriorError(f"dimension {self.dim} outside 0..{MAX_DIM}")
        if not 0 <= self.grade <= self.dim:
            raise ExteriorError(f"grade {self.grade} outside 0..{self.dim}")
        if len(self.coeffs) != comb(self.dim, self.grade):
            raise ExteriorError("coefficient array has the wrong length")

    # construction ---------------------------------------------------------

    @classmethod
    def zero(cls, field, dim, grade, variance=DUAL):
        return cls(dim, grade, variance, (field.zero,) * comb(dim, grade), field)

    @classmethod
    def from_terms(cls, field, dim, grade, terms, variance=DUAL):
        """Build from ``{(i, j, ...): coeff}``; unsorted index tuples are sorted with sign."""
        c = [field.zero] * comb(dim, grade)
        idx = _index(dim, grade)
        items = terms.items() if isinstance(terms, dict) else terms
        for key, val in items:
            key = tuple(key)
            if len(key) != grade:
                raise ExteriorError(f"monomial {key} does not have grade {grade}")
            if any(not 0 <= i < dim for i in key):
                raise ExteriorError(f"monomial {key} has an index outside 0..{dim - 1}")
            m = _mask_of(key)
            if m < 0:
                continue
            s = _perm_sign(key)
            c[idx[m]] = c[idx[m]] + s * field(val)
        return cls(dim, grade, variance, tuple(c), field)

    @classmethod
    def monomial(cls, field, dim, indices, variance=DUAL, coeff=1):
        return cls.from_terms(field, dim, len(indices), {tuple(indices): coeff}, variance)

    @classmethod
    def vector(cls, field, coords, variance=PRIMAL):
        coords = tuple(field(x) for x in coords)
        return cls(len(coords), 1, variance, coords, field)

    @classmethod
    def scalar(cls, field, dim, value, variance=DUAL):
        return cls(dim, 0, variance, (field(value),), field)

    @classmethod
    def from_skew(cls, matrix: "SkewMatrix", variance=DUAL):
        n = matrix.n
        terms = {(i, j): matrix.entries[i][j] for i in range(n) for j in range(i + 1, n)}
        return cls.from_terms(matrix.field, n, 2, terms, variance)

    # access ----------------------------------------------------------------

    def terms(self):
        """Nonzero ``(index_tuple, coeff)`` pairs in basis order."""
        return [(b, c) for b, c in zip(basis(self.dim, self.grade), self.coeffs) if c != 0]

    def _mask_terms(self):
        return [(m, c) for m, c in zip(_masks(self.dim, self.grade), self.coeffs) if c != 0]

    def coeff(self, indices):
        m = _mask_of(indices)
        if m < 0:
            return self.field.zero
        return _perm_sign(indices) * self.coeffs[_index(self.dim, self.grade)[m]]

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def _same_space(self, other):
        if self.dim != other.dim:
            raise ExteriorError(f"dimension mismatch {self.dim} vs {other.dim}")
        if self.field != other.field:
            raise ExteriorError("field mismatch")

    # vector-space structure ----------------------------------------------------

    def __add__(self, other):
        self._same_space(other)
        if self.grade != other.grade or self.variance != other.variance:
            raise ExteriorError("cannot add multivectors of different grade/variance")
        return Multivector(
            self.dim, self.grade, self.variance,
            tuple(a + b for a, b in zip(self.coeffs, other.coeffs)), self.field,
        )

    def __neg__(self):
        return self.scale(-1)

    def __sub__(self, other):
        return self + (-other)

    def scale(self, s):
        s = self.field(s)
        return Multivector(
            self.dim, self.grade, self.variance, tuple(s * c for c in self.coeffs), self.field
        )

    def __rmul__(self, s):
        return self.scale(s)

    def __xor__(self, other):
        return wedge(self, other)

    def __eq__(self, other):
        if not isinstance(other, Multivector):
            return NotImplemented
        return (
            self.dim == other.dim
            and self.grade == other.grade
            and self.variance == other.variance
            and self.field == other.field
            and all(a == b for a, b in zip(self.coeffs, other.coeffs))
        )

    def __hash__(self):
        return hash((self.dim, self.grade, self.variance, tuple(map(hash, self.coeffs))))

    def __repr__(self):
        sym = "x" if self.variance is DUAL else "e"
        parts = [f"{c}*{sym}{''.join(map(str, b))}" for b, c in self.terms()]
        return " + ".join(parts) if parts else f"0[{self.grade}]"

    def restrict(self, keep):
        """Drop basis directions not in ``keep`` and reindex (coordinate restriction)."""
        keep = list(keep)
        pos = {old: new for new, old in enumerate(keep)}
        terms = {}
        for b, c in self.terms():
            if all(i in pos for i in b):
                terms[tuple(pos[i] for i in b)] = c
        return Multivector.from_terms(self.field, len(keep), self.grade, terms, self.variance)

    def extend(self, dim, positions):
        """Inverse of :meth:`restrict`: place coordinates at ``positions`` of a dim-space."""
        terms = {tuple(positions[i] for i in b): c for b, c in self.terms()}
        return Multivector.from_terms(self.field, dim, self.grade, terms, self.variance)

    def change_basis(self, vectors):
        """Pull back a form along the basis ``vectors`` (rows, in current coordinates).

        For a DUAL element returns the form expressed in the new basis
        ``f_k = vectors[k]``. Only forms are supported.
        """
        if self.variance is not DUAL:
            raise ExteriorError("change_basis is implemented for forms only")
        n = len(vectors)
        terms = {}
        for b in basis(n, self.grade):
            terms[b] = evaluate(self, [Multivector.vector(self.field, vectors[i]) for i in b])
        return Multivector.from_terms(self.field, n, self.grade, terms, DUAL)


def wedge(a: Multivector, b: Multivector) -> Multivector:
    a._same_space(b)
    if a.variance != b.variance:
        raise ExteriorError("wedge of a form with a polyvector")
    g = a.grade + b.grade
    if g > a.dim:
        raise ExteriorError(f"grade overflow {a.grade}+{b.grade} > {a.dim}")
    out = [a.field.zero] * comb(a.dim, g)
    idx = _index(a.dim, g)
    bt = b._mask_terms()
    for ma, ca in a._mask_terms():
        for mb, cb in bt:
            s = merge_sign(ma, mb)
            if s:
                k = idx[ma | mb]
                out[k] = out[k] + (ca * cb if s > 0 else -(ca * cb))
    return Multivector(a.dim, g, a.variance, tuple(out), a.field)


def contract(big: Multivector, small: Multivector, trailing: bool = False) -> Multivector:
    """``big ⌟ small``: small occupies the leading argument slots of big.

    ``trailing=True`` puts it in the trailing slots instead (only used for the
    polyvector half of ε-duality).
    """
    big._same_space(small)
    if big.variance == small.variance:
        raise ExteriorError("contraction needs opposite variances")
    if small.grade > big.grade:
        raise ExteriorError(f"cannot contract grade {big.grade} by grade {small.grade}")
    g = big.grade - small.grade
    out = [big.field.zero] * comb(big.dim, g)
    idx = _index(big.dim, g)
    st = small._mask_terms()
    for mb, cb in big._mask_terms():
        for ms, cs in st:
            if ms & ~mb:
                continue
            rest = mb ^ ms
            s = merge_sign(rest, ms) if trailing else merge_sign(ms, rest)
            k = idx[rest]
            out[k] = out[k] + (cb * cs if s > 0 else -(cb * cs))
    return Multivector(big.dim, g, big.variance, tuple(out), big.field)


def determinant_element(field, dim, variance=PRIMAL, coeff=1) -> Multivector:
    return Multivector.monomial(field, dim, tuple(range(dim)), variance, coeff)


def eps_inverse(eps: Multivector) -> Multivector:
    """The top-degree element of opposite variance pairing with ``eps`` to 1."""
    if eps.grade != eps.dim or eps.is_zero():
        raise ExteriorError("ε must be a nonzero top-degree element")
    return determinant_element(eps.field, eps.dim, eps.variance.opposite, 1 / eps.coeffs[0])


def eps_dual(xi: Multivector, eps: Multivector) -> Multivector:
    """ε-duality ∧^q V^∨ ≅ ∧^{n-q} V (and its inverse for polyvectors).

    For a form ``xi`` and ``eps`` in det V this is ``eps ⌟ xi``. For a polyvector
    ``xi`` and ``eps`` in det V^∨ the polyvector fills the trailing slots of eps,
    which makes ``eps_dual(eps_dual(xi, ε), ε^{-1}) == xi`` in all degrees.
    """
    if eps.grade != eps.dim or eps.is_zero():
        raise ExteriorError("ε must be a nonzero element of top degree")
    if eps.variance == xi.variance:
        raise ExteriorError("ε must have the opposite variance")
    xi._same_space(eps)
    return contract(eps, xi, trailing=xi.variance is PRIMAL)


def duality_sign(n: int, k: int, p: int) -> int:
    """Sign in ``ω ⌟ ξ = sign · (ξ^∨ ⌟ ω^∨)`` for ω of grade k, ξ of grade p.

    Forced by the slot conventions above; it is +1 whenever p(n - k) is even,
    e.g. for 4-vectors against 2-forms in dimensions 6 and 7.
    """
    return -1 if p * (n - k) % 2 else 1


def evaluate(form: Multivector, vectors) -> object:
    """Full alternating evaluation ``form(v_1, ..., v_p)``."""
    if len(vectors) != form.grade:
        raise ExteriorError(f"form of grade {form.grade} given {len(vectors)} vectors")
    out = form
    for v in vectors:
        if v.variance == form.variance or v.grade != 1:
            raise ExteriorError("arguments must be vectors of opposite variance")
        out = contract(out, v)
    return out.coeffs[0]


eval_form = evaluate


def decomposable(field, vectors, variance=PRIMAL) -> Multivector:
    """``v_1 ∧ ... ∧ v_k`` from coordinate rows."""
    vs = [Multivector.vector(field, v, variance) for v in vectors]
    out = vs[0]
    for v in vs[1:]:
        out = wedge(out, v)
    return out


# ---------------------------------------------------------------------------
# skew matrices

@dataclass(frozen=True)
class SkewMatrix:
    entries: tuple
    field: Field

    def __post_init__(self):
        n = len(self.entries)
        for i in range(n):
            if len(self.entries[i]) != n:
                raise ExteriorError("skew matrix must be square")
            for j in range(n):
                if self.entries[i][j] != -self.entries[j][i]:
                    raise ExteriorError(f"not antisymmetric at ({i}, {j})")

    @property
    def n(self):
        return len(self.entries)

    @classmethod
    def from_rows(cls, field, rows):
        return cls(tuple(tuple(field(x) for x in r) for r in rows), field)

    @classmethod
    def from_upper(cls, field, n, upper):
        """From ``{(i, j): a_ij}`` with i < j."""
        m = [[field.zero] * n for _ in range(n)]
        for (i, j), v in upper.items():
            m[i][j] = field(v)
            m[j][i] = -field(v)
        return cls(tuple(map(tuple, m)), field)

    @classmethod
    def from_form(cls, form: Multivector):
        if form.grade != 2:
            raise ExteriorError("need a 2-form")
        n = form.dim
        m = [[form.field.zero] * n for _ in range(n)]
        for (i, j), c in form.terms():
            m[i][j] = c
            m[j][i] = -c
        return cls(tuple(map(tuple, m)), form.field)

    def rows(self):
        return [list(r) for r in self.entries]


def rank_2form(mu) -> int:
    if isinstance(mu, Multivector):
        mu = SkewMatrix.from_form(mu)
    return linalg.rank(mu.rows(), mu.field)


def pfaffian(mu):
    """Exact Pfaffian by expansion along the first row (sizes up to 8)."""
    if isinstance(mu, Multivector):
        mu = SkewMatrix.from_form(mu)
    if mu.n % 2:
        raise ExteriorError("Pfaffian of an odd-size matrix")
    return _pf(mu.entries, tuple(range(mu.n)), mu.field)


def _pf(a, idx, field):
    if not idx:
        return field.one
    i = idx[0]
    total = field.zero
    for k in range(1, len(idx)):
        j = idx[k]
        if a[i][j] == 0:
            continue
        rest = idx[1:k] + idx[k + 1:]
        term = a[i][j] * _pf(a, rest, field)
        total = total + (term if k % 2 == 1 else -term)
    return total
