"""Invariants of 3- and 4-forms, the odd splitting of a (4-form, 2-form) pair,
the standard form of the data, instance construction and certification.

Coordinates: W has basis e_0..e_6, and the 6-space Wbar is indexed 0..5 with
index i standing for e_{i+1}. After :func:`split_odd` every instance carries a
*frame* (w_0, f_1, ..., f_6) of W in which w_0 = e_0 and Wbar = <e_1..e_6>.
"""

from __future__ import annotations

import random as _random
from collections import Counter
from dataclasses import dataclass, field as dc_field
from itertools import combinations

from . import linalg
from .exterior import (
    DUAL,
    PRIMAL,
    Multivector,
    SkewMatrix,
    contract,
    determinant_element,
    eps_dual,
    evaluate,
    rank_2form,
    wedge,
)
from .field import Field


class StructureError(ValueError):
    code = "StructureError"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class NotGeneral(StructureError):
    code = "NotGeneral"


class NonSplit(StructureError):
    code = "NonSplit"


class RepeatedRoots(StructureError):
    code = "RepeatedRoots"


class ParameterError(StructureError):
    """Invalid (M, K); ``problems`` lists ``(field_name, code, message)``."""

    code = "ParameterError"

    def __init__(self, problems):
        self.problems = list(problems)
        codes = sorted({c for _, c, _ in self.problems})
        super().__init__("; ".join(f"{c}: {m}" for _, c, m in self.problems), ",".join(codes))


# ---------------------------------------------------------------------------
# small helpers


def _vec(field, coords, variance=PRIMAL):
    return Multivector.vector(field, coords, variance)


def _unit(field, n, i, variance=PRIMAL):
    return _vec(field, [1 if j == i else 0 for j in range(n)], variance)


def standard_lambda(field) -> Multivector:
    """x_0123 + x_0456 + x_1256 + x_1346 + x_2345 on a 7-space."""
    terms = {(0, 1, 2, 3): 1, (0, 4, 5, 6): 1, (1, 2, 5, 6): 1, (1, 3, 4, 6): 1, (2, 3, 4, 5): 1}
    return Multivector.from_terms(field, 7, 4, terms, DUAL)


def standard_lambda_bar(field) -> Multivector:
    """x_123 + x_456 on Wbar (0-based indices 0..5)."""
    return Multivector.from_terms(field, 6, 3, {(0, 1, 2): 1, (3, 4, 5): 1}, DUAL)


def standard_lambda_prime(field) -> Multivector:
    """x_1256 + x_1346 + x_2345 on Wbar."""
    terms = {(0, 1, 4, 5): 1, (0, 2, 3, 5): 1, (1, 2, 3, 4): 1}
    return Multivector.from_terms(field, 6, 4, terms, DUAL)


# coefficient positions of M_1..M_6 and K_1..K_3 inside mu^2 (0-based on Wbar)
M_MONOMIALS = ((0, 3, 4, 5), (1, 3, 4, 5), (2, 3, 4, 5), (0, 1, 2, 3), (0, 1, 2, 4), (0, 1, 2, 5))
K_MONOMIALS = ((1, 2, 3, 4), (0, 2, 3, 5), (0, 1, 4, 5))


def mu_square_expression(field, M, K) -> Multivector:
    """The 4-form sum M_i x_(...) + sum K_i x_(...) of the standard presentation."""
    terms = {m: v for m, v in zip(M_MONOMIALS, M)}
    terms.update({m: v for m, v in zip(K_MONOMIALS, K)})
    return Multivector.from_terms(field, 6, 4, terms, DUAL)


def mu_matrix(field, M, K) -> SkewMatrix:
    """The 6x6 skew matrix whose square is proportional to :func:`mu_square_expression`."""
    M1, M2, M3, M4, M5, M6 = (field(x) for x in M)
    K1, K2, K3 = (field(x) for x in K)
    upper = {
        (0, 1): M4 * K3, (0, 2): -M5 * K2, (0, 3): M1 * M4, (0, 4): M1 * M5, (0, 5): K2 * K3 + M1 * M6,
        (1, 2): M6 * K1, (1, 3): M2 * M4, (1, 4): K1 * K3 + M2 * M5, (1, 5): M2 * M6,
        (2, 3): K1 * K2 + M3 * M4, (2, 4): M3 * M5, (2, 5): M3 * M6,
        (3, 4): M1 * K1, (3, 5): -M2 * K2,
        (4, 5): M3 * K3,
    }
    return SkewMatrix.from_upper(field, 6, upper)


def mmk(field, M, K):
    """M1 M6 K1 + M2 M5 K2 + M3 M4 K3 + K1 K2 K3."""
    M = [field(x) for x in M]
    K = [field(x) for x in K]
    return M[0] * M[5] * K[0] + M[1] * M[4] * K[1] + M[2] * M[3] * K[2] + K[0] * K[1] * K[2]


def skew_of(form: Multivector):
    return SkewMatrix.from_form(form).rows()


# ---------------------------------------------------------------------------
# quadratic invariants


def quadratic_invariant(t: Multivector, eps: Multivector | None = None):
    """Symmetric matrix B with ``B(a, b) eps = (a ⌟ t) ∧ (b ⌟ t) ∧ t``.

    ``t`` is a 3-form or 3-vector on a 7-space; a, b range over the basis of
    the space of opposite variance. ``eps`` defaults to the unit top element of
    the same variance as ``t``.
    """
    if t.dim != 7 or t.grade != 3:
        raise StructureError("quadratic invariant needs a grade-3 element on a 7-space")
    F = t.field
    if eps is None:
        eps = determinant_element(F, 7, t.variance)
    scale = 1 / eps.coeffs[0]
    other = t.variance.opposite
    c = [contract(t, _unit(F, 7, i, other)) for i in range(7)]
    B = linalg.zeros(F, 7, 7)
    for i in range(7):
        ci_t = wedge(c[i], t)
        for j in range(i, 7):
            top = wedge(c[j], ci_t)
            B[i][j] = B[j][i] = top.coeffs[0] * scale
    return B


def dual_trivector(lam: Multivector) -> Multivector:
    """λ^∨ = ε ⌟ λ for the unit ε = e_0...e_6."""
    return eps_dual(lam, determinant_element(lam.field, lam.dim, PRIMAL))


def lambda_quadric(lam: Multivector):
    """``(B, det B)`` where B is the invariant of λ^∨, a quadratic form on W^∨."""
    if lam.dim != 7 or lam.grade != 4:
        raise StructureError("expected a 4-form on a 7-space")
    B = quadratic_invariant(dual_trivector(lam))
    return B, linalg.det(B, lam.field)


def is_general_4form(lam: Multivector) -> bool:
    return lambda_quadric(lam)[1] != 0


def is_general_3form7(xi: Multivector) -> bool:
    B = quadratic_invariant(xi)
    return linalg.det(B, xi.field) != 0


# ---------------------------------------------------------------------------
# odd splitting


@dataclass(frozen=True)
class OddSplit:
    w0: list
    w0v: list
    frame: list  # rows: w0, then a basis of Wbar = ker w0v
    lam_bar: Multivector  # on Wbar, frame coordinates
    lam_prime: Multivector
    mu_bar: Multivector
    q_inv_w0: object  # 𝐪_λ^{-1}(w0, w0)


def split_odd(lam: Multivector, mu: Multivector) -> OddSplit:
    F = lam.field
    if lam.dim != 7 or mu.dim != 7:
        raise StructureError("split_odd works on a 7-space")
    r = rank_2form(mu)
    if r != 6:
        raise StructureError(f"rank(mu) = {r}, expected 6", "RankMu")
    B, d = lambda_quadric(lam)
    if d == 0:
        raise NotGeneral("lambda is not a general 4-form")
    w0 = linalg.nullspace(skew_of(mu), F)[0]
    Binv = linalg.inverse(B, F)
    polar = linalg.matvec(Binv, w0)
    qw = sum((a * b for a, b in zip(polar, w0)), F.zero)
    if qw == 0:
        raise StructureError("w0 lies on the quadric of lambda", "W0OnQuadric")
    w0v = [x / qw for x in polar]
    wbar = linalg.nullspace([w0v], F)
    frame = [w0] + wbar
    lam_f = lam.change_basis(frame)
    mu_f = mu.change_basis(frame)
    lam_bar = contract(lam_f, _unit(F, 7, 0, PRIMAL)).restrict(range(1, 7))
    lam_prime = lam_f.restrict(range(1, 7))
    mu_bar = mu_f.restrict(range(1, 7))
    return OddSplit(w0, w0v, frame, lam_bar, lam_prime, mu_bar, qw)


# ---------------------------------------------------------------------------
# 3-forms on a 6-space


@dataclass(frozen=True)
class HitchinSplit:
    A1: list
    A2: list
    c: object
    root: object
    operator: list  # K as a matrix acting on column vectors


def hitchin_operator(lam_bar: Multivector, eps: Multivector | None = None):
    """Matrix of K(w) = ε ⌟ ((w ⌟ λbar) ∧ λbar) (columns are images of e_i)."""
    F = lam_bar.field
    n = lam_bar.dim
    if eps is None:
        eps = determinant_element(F, n, PRIMAL)
    cols = []
    for i in range(n):
        five = wedge(contract(lam_bar, _unit(F, n, i, PRIMAL)), lam_bar)
        cols.append(list(eps_dual(five, eps).coeffs))
    return linalg.transpose(cols)


def hitchin_split(lam_bar: Multivector, eps: Multivector | None = None) -> HitchinSplit:
    if lam_bar.dim != 6 or lam_bar.grade != 3:
        raise StructureError("hitchin_split needs a 3-form on a 6-space")
    F = lam_bar.field
    K = hitchin_operator(lam_bar, eps)
    K2 = linalg.matmul(K, K)
    c = K2[0][0]
    for i in range(6):
        for j in range(6):
            if K2[i][j] != (c if i == j else 0):
                raise NotGeneral("K^2 is not scalar")
    if c == 0:
        raise NotGeneral("K^2 = 0: the 3-form is not general")
    root = F.sqrt(c)
    if root is None:
        raise NonSplit("K^2 = c with c not a square: eigenspaces are not defined over the field")
    spaces = []
    for s in (root, -root):
        shifted = [[K[i][j] - (s if i == j else 0) for j in range(6)] for i in range(6)]
        spaces.append(linalg.nullspace(shifted, F))
    if len(spaces[0]) != 3 or len(spaces[1]) != 3:
        raise NotGeneral("eigenspaces are not 3-dimensional")
    return HitchinSplit(spaces[0], spaces[1], c, root, K)


# ---------------------------------------------------------------------------
# the pencil t λ' + μ^2


@dataclass(frozen=True)
class CubicPoly:
    c3: object
    c2: object
    c1: object
    c0: object
    field: Field

    def __call__(self, t):
        t = self.field(t)
        return ((self.c3 * t + self.c2) * t + self.c1) * t + self.c0

    @property
    def coeffs(self):
        return (self.c3, self.c2, self.c1, self.c0)

    def disc(self):
        a, b, c, d = self.coeffs
        return b * b * c * c - 4 * a * c ** 3 - 4 * b ** 3 * d - 27 * a * a * d * d + 18 * a * b * c * d

    def roots(self):
        """Roots lying in the field, sorted by the field's total order."""
        return field_roots(self.field, self.coeffs)


def field_roots(F: Field, coeffs):
    """Roots in F of the polynomial with coefficients ``coeffs`` (highest first)."""
    if all(c == 0 for c in coeffs):
        raise StructureError("zero polynomial")
    if F.is_finite:
        out = []
        for t in F.elements():
            acc = F.zero
            for c in coeffs:
                acc = acc * t + c
            if acc == 0:
                out.append(t)
        return out
    import sympy

    x = sympy.Symbol("x")
    poly = sympy.Poly([sympy.Rational(c.numerator, c.denominator) for c in coeffs], x, domain="QQ")
    roots = sympy.roots(poly, filter="Q")
    return sorted((F(sympy_to_fraction(r)) for r in roots), key=F.sort_key)


def sympy_to_fraction(r):
    from fractions import Fraction

    return Fraction(int(r.p), int(r.q))


def _wedge2_basis(A):
    """Basis of ∧^2 A as vector pairs, in the order a0∧a1, a0∧a2, a1∧a2."""
    return [(A[0], A[1]), (A[0], A[2]), (A[1], A[2])]


def pairing_matrix(form4: Multivector, A1, A2):
    F = form4.field
    rows = []
    for a, b in _wedge2_basis(A1):
        row = []
        for c, d in _wedge2_basis(A2):
            row.append(evaluate(form4, [_vec(F, v) for v in (a, b, c, d)]))
        rows.append(row)
    return rows


def chi_poly(lam_prime: Multivector, mu_sq: Multivector, A1, A2) -> CubicPoly:
    """det(t λ' + μ^2 : ∧^2 A1 → ∧^2 A2^∨) as an exact cubic."""
    F = lam_prime.field
    P1 = pairing_matrix(lam_prime, A1, A2)
    if linalg.det(P1, F) == 0:
        raise NotGeneral("lambda' pairs ∧^2 A1 and ∧^2 A2 degenerately")
    P2 = pairing_matrix(mu_sq, A1, A2)
    # det is cubic in t: recover it from its values at t = 0, 1, 2, 3
    vals = []
    for t in range(4):
        m = [[t * P1[i][j] + P2[i][j] for j in range(3)] for i in range(3)]
        vals.append(linalg.det(m, F))
    V = [[F(t) ** e for e in (3, 2, 1, 0)] for t in range(4)]
    c = linalg.solve(V, vals, F)
    return CubicPoly(c[0], c[1], c[2], c[3], F)


# ---------------------------------------------------------------------------
# standard form


@dataclass(frozen=True)
class NormalForm:
    basis: list  # six vectors of Wbar (frame coordinates): e_1..e_6 of the standard form
    M: tuple
    K: tuple
    w0_scale: object  # λbar is taken for w0 replaced by w0_scale * w0
    A1: list
    A2: list

    def projective_K(self):
        k0 = self.K[0]
        return tuple(k / k0 for k in self.K)


def _plane_covector(s):
    # plane in A (coords) of the bivector s0 a01 + s1 a02 + s2 a12
    return [s[2], -s[1], s[0]]


def _cross(u, v):
    return [u[1] * v[2] - u[2] * v[1], u[2] * v[0] - u[0] * v[2], u[0] * v[1] - u[1] * v[0]]


def _combine(field, coords, A):
    out = [field.zero] * len(A[0])
    for c, a in zip(coords, A):
        out = [x + c * y for x, y in zip(out, a)]
    return out


def fourth_roots(F: Field, x):
    if F.is_finite:
        return [t for t in F.elements() if t ** 4 == x]
    out = []
    r = F.sqrt(x)
    if r is not None:
        for s in (r, -r):
            t = F.sqrt(s)
            if t is not None:
                out += [t, -t]
    return sorted(set(out), key=F.sort_key)


def normal_form(lam_bar: Multivector, lam_prime: Multivector, mu_bar: Multivector) -> NormalForm:
    """A basis of Wbar putting (λbar, λ', μ^2) into the standard presentation.

    K is sorted by the field's total order. Raises :class:`RepeatedRoots` when
    the pencil has a repeated root and :class:`NonSplit` when the roots (or the
    rescaling constants) are not in the field.
    """
    F = lam_bar.field
    hs = hitchin_split(lam_bar)
    A1, A2 = hs.A1, hs.A2
    mu_sq = wedge(mu_bar, mu_bar)
    chi = chi_poly(lam_prime, mu_sq, A1, A2)
    if chi.disc() == 0:
        raise RepeatedRoots("the pencil has a repeated root")
    roots = chi.roots()
    if len(roots) != 3:
        raise NonSplit("the pencil's roots are not all in the field")
    kappas = sorted((-r for r in roots), key=F.sort_key)
    P1 = pairing_matrix(lam_prime, A1, A2)
    P2 = pairing_matrix(mu_sq, A1, A2)
    P1t, P2t = linalg.transpose(P1), linalg.transpose(P2)
    alphas, betas = [], []
    for k in kappas:
        left = [[P2t[i][j] - k * P1t[i][j] for j in range(3)] for i in range(3)]
        right = [[P2[i][j] - k * P1[i][j] for j in range(3)] for i in range(3)]
        alphas.append(_plane_covector(linalg.nullspace(left, F)[0]))
        betas.append(_plane_covector(linalg.nullspace(right, F)[0]))
    # eigen-planes: K1 <-> e23 / e45, K2 <-> e13 / e46, K3 <-> e12 / e56
    a1, a2, a3 = alphas
    b1, b2, b3 = betas
    f = [
        _combine(F, _cross(a3, a2), A1),
        _combine(F, _cross(a3, a1), A1),
        _combine(F, _cross(a2, a1), A1),
        _combine(F, _cross(b1, b2), A2),
        _combine(F, _cross(b1, b3), A2),
        _combine(F, _cross(b2, b3), A2),
    ]
    V = [_vec(F, v) for v in f]
    a = evaluate(lam_bar, V[0:3])
    b = evaluate(lam_bar, V[3:6])
    c1 = evaluate(lam_prime, [V[1], V[2], V[3], V[4]])
    c2 = evaluate(lam_prime, [V[0], V[2], V[3], V[5]])
    c3 = evaluate(lam_prime, [V[0], V[1], V[4], V[5]])
    if 0 in (a, b, c1, c2, c3):
        raise NotGeneral("degenerate adapted basis")
    gammas = fourth_roots(F, c1 * c2 * c3 / (a * a * b * b))
    if not gammas:
        raise NonSplit("rescaling to the standard form needs a fourth root outside the field")
    g = gammas[0]
    s3 = 1 / (g * a)
    pi = 1 / (g * b)
    s = [F.one, F.one, s3, pi * c3, pi * c2 * s3, pi * c1 * s3]
    basis = [[si * x for x in v] for si, v in zip(s, f)]
    lb = lam_bar.change_basis(basis).scale(g)
    lp = lam_prime.change_basis(basis)
    if lb != standard_lambda_bar(F) or lp != standard_lambda_prime(F):
        raise StructureError("internal: normal form did not reach the standard presentation")
    msq = mu_sq.change_basis(basis)
    M = tuple(msq.coeff(m) for m in M_MONOMIALS)
    K = tuple(msq.coeff(m) for m in K_MONOMIALS)
    if msq != mu_square_expression(F, M, K):
        raise StructureError("internal: mu^2 has terms outside the standard presentation")
    return NormalForm(basis, M, K, g, A1, A2)


# ---------------------------------------------------------------------------
# primitive projection and ξ


def primitive_part(lam_bar: Multivector, mu_bar: Multivector) -> Multivector:
    """The component of λbar killed by contraction with μ^{-1}.

    Subtracts μ ∧ f for the unique covector f making the result primitive.
    """
    F = lam_bar.field
    n = lam_bar.dim
    inv = linalg.inverse(skew_of(mu_bar), F)
    pi = Multivector.from_terms(
        F, n, 2, {(i, j): inv[i][j] for i in range(n) for j in range(i + 1, n)}, PRIMAL
    )
    target = contract(lam_bar, pi)
    cols = [list(contract(wedge(mu_bar, _unit(F, n, i, DUAL)), pi).coeffs) for i in range(n)]
    f = linalg.solve(linalg.transpose(cols), list(target.coeffs), F)
    if f is None:
        raise StructureError("mu is degenerate: no primitive projection")
    return lam_bar - wedge(mu_bar, Multivector(n, 1, DUAL, tuple(f), F))


def xi_build(lam_bar: Multivector, mu_bar: Multivector) -> Multivector:
    """ξ = λbar_0 + x_0 ∧ μ on W = k e_0 ⊕ Wbar, with λbar_0 the primitive part."""
    F = lam_bar.field
    pos = list(range(1, 7))
    lb = primitive_part(lam_bar, mu_bar).extend(7, pos)
    mu7 = mu_bar.extend(7, pos)
    return lb + wedge(_unit(F, 7, 0, DUAL), mu7)


# ---------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class Instance:
    field: Field
    lam: Multivector  # on W, original coordinates
    mu: Multivector
    frame: list
    w0: list
    w0v: list
    lam_bar: Multivector  # Wbar forms in frame coordinates
    lam_prime: Multivector
    mu_bar: Multivector
    q_inv_w0: object
    params: tuple | None = None  # (M, K) when built from parameters
    mu_sq_scale: object = None  # μ∧μ = scale * (standard μ^2 expression)

    def forms7(self):
        """``(λ, μ)`` in frame coordinates, where w0 = e_0 and Wbar = <e_1..e_6>."""
        pos = list(range(1, 7))
        x0 = _unit(self.field, 7, 0, DUAL)
        lam = wedge(x0, self.lam_bar.extend(7, pos)) + self.lam_prime.extend(7, pos)
        return lam, self.mu_bar.extend(7, pos)

    @property
    def xi(self):
        return xi_build(self.lam_bar, self.mu_bar)

    @property
    def mu_sq(self):
        return wedge(self.mu_bar, self.mu_bar)


def check_params(field, M, K):
    M = [field(x) for x in M]
    K = [field(x) for x in K]
    problems = []
    if len(M) != 6 or len(K) != 3:
        raise ParameterError([("M/K", "Shape", "need 6 values of M and 3 of K")])
    for i, m in enumerate(M):
        if m == 0:
            problems.append((f"M{i + 1}", "ZeroM", f"M{i + 1} must be nonzero"))
    for i, k in enumerate(K):
        if k == 0:
            problems.append((f"K{i + 1}", "ZeroK", f"K{i + 1} must be nonzero"))
    for i, j in combinations(range(3), 2):
        if K[i] == K[j]:
            problems.append((f"K{i + 1},K{j + 1}", "RepeatedK", f"K{i + 1} = K{j + 1}"))
    if mmk(field, M, K) == 0:
        problems.append(("M,K", "MmkZero", "M1M6K1 + M2M5K2 + M3M4K3 + K1K2K3 = 0"))
    return problems


def build_instance(M, K, field: Field) -> Instance:
    problems = check_params(field, M, K)
    if problems:
        raise ParameterError(problems)
    M = tuple(field(x) for x in M)
    K = tuple(field(x) for x in K)
    lb, lp = standard_lambda_bar(field), standard_lambda_prime(field)
    mu_bar = Multivector.from_skew(mu_matrix(field, M, K))
    sq = wedge(mu_bar, mu_bar)
    expr = mu_square_expression(field, M, K)
    scale = 2 * mmk(field, M, K)
    if sq != expr.scale(scale):
        raise StructureError("internal: mu∧mu is not proportional to the mu^2 expression")
    pos = list(range(1, 7))
    x0 = _unit(field, 7, 0, DUAL)
    lam = wedge(x0, lb.extend(7, pos)) + lp.extend(7, pos)
    mu = mu_bar.extend(7, pos)
    ident = linalg.identity(field, 7)
    B, _ = lambda_quadric(lam)
    q = linalg.inverse(B, field)[0][0]  # 𝐪_λ^{-1}(e_0, e_0)
    return Instance(
        field, lam, mu, ident, ident[0], ident[0], lb, lp, mu_bar,
        q_inv_w0=q, params=(M, K), mu_sq_scale=scale,
    )


def instance_from_forms(lam: Multivector, mu: Multivector) -> Instance:
    sp = split_odd(lam, mu)
    return Instance(
        lam.field, lam, mu, sp.frame, sp.w0, sp.w0v, sp.lam_bar, sp.lam_prime, sp.mu_bar, sp.q_inv_w0
    )


# ---------------------------------------------------------------------------
# certification


@dataclass
class Item:
    ok: bool
    witness: object = None
    note: str = ""


@dataclass
class Certificate:
    a1_general_lambda: Item
    a1_rank_mu: Item
    a1_w0_off_quadric: Item
    a2_distinct_roots: Item
    a3_nonzero: Item
    mmk_nonzero: Item
    a4_xi_general: Item
    normal: NormalForm | None = None
    split: OddSplit | None = None
    errors: list = dc_field(default_factory=list)

    ITEMS = (
        "a1_general_lambda", "a1_rank_mu", "a1_w0_off_quadric", "a2_distinct_roots",
        "a3_nonzero", "mmk_nonzero", "a4_xi_general",
    )

    @property
    def passed(self) -> bool:
        return all(getattr(self, k).ok for k in self.ITEMS)

    def failures(self):
        return [k for k in self.ITEMS if not getattr(self, k).ok]


def certify(lam: Multivector, mu: Multivector) -> Certificate:
    F = lam.field
    fail = Item(False, None, "not reached")
    items = {k: fail for k in Certificate.ITEMS}
    cert = Certificate(**items)

    B, d = lambda_quadric(lam)
    cert.a1_general_lambda = Item(d != 0, d)
    r = rank_2form(mu)
    cert.a1_rank_mu = Item(r == 6, r, "" if r == 6 else "Pf(mu) = ±mmk^2, so a degenerate mu means mmk = 0")
    if d == 0 or r != 6:
        return cert
    try:
        sp = split_odd(lam, mu)
    except StructureError as exc:
        cert.errors.append(exc.code)
        cert.a1_w0_off_quadric = Item(False, 0, str(exc))
        return cert
    cert.split = sp
    cert.a1_w0_off_quadric = Item(True, sp.q_inv_w0)
    try:
        hs = hitchin_split(sp.lam_bar)
        chi = chi_poly(sp.lam_prime, wedge(sp.mu_bar, sp.mu_bar), hs.A1, hs.A2)
    except StructureError as exc:
        cert.errors.append(exc.code)
        cert.a2_distinct_roots = Item(False, None, str(exc))
        return cert
    disc = chi.disc()
    cert.a2_distinct_roots = Item(disc != 0, disc)
    if disc == 0:
        return cert
    try:
        nf = normal_form(sp.lam_bar, sp.lam_prime, sp.mu_bar)
    except StructureError as exc:
        cert.errors.append(exc.code)
        cert.a3_nonzero = Item(False, None, str(exc))
        return cert
    cert.normal = nf
    vals = list(nf.M) + list(nf.K)
    cert.a3_nonzero = Item(all(v != 0 for v in vals), vals)
    P = mmk(F, nf.M, nf.K)
    cert.mmk_nonzero = Item(P != 0, P)
    xi = xi_build(sp.lam_bar, sp.mu_bar)
    dq = linalg.det(quadratic_invariant(xi), F)
    cert.a4_xi_general = Item(dq != 0, dq)
    return cert


def certify_instance(inst: Instance) -> Certificate:
    return certify(inst.lam, inst.mu)


# ---------------------------------------------------------------------------
# sampling


def random_params(field: Field, rng):
    M = [field.random(rng, nonzero=True) for _ in range(6)]
    if field.is_finite:
        K = rng.sample([x for x in field.elements() if x != 0], 3)
    else:
        K = []
        while len(K) < 3:
            k = field.random(rng, nonzero=True)
            if k not in K:
                K.append(k)
    return M, K


@dataclass
class SampleResult:
    instance: Instance | None
    certificate: Certificate | None
    attempts: int
    rejections: Counter


def find_certified(field: Field, seed: int = 0, retries: int = 200) -> SampleResult:
    """Sample admissible (M, K) until every assumption check passes."""
    rng = _random.Random(seed)
    rejections = Counter()
    for attempt in range(1, retries + 1):
        M, K = random_params(field, rng)
        try:
            inst = build_instance(M, K, field)
        except ParameterError as exc:
            for _, code, _ in exc.problems:
                rejections[code] += 1
            continue
        cert = certify_instance(inst)
        if cert.passed:
            return SampleResult(inst, cert, attempt, rejections)
        for k in cert.failures():
            rejections[k] += 1
    return SampleResult(None, None, retries, rejections)
