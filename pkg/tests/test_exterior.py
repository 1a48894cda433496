import random
from itertools import combinations

import pytest

from kuchle import linalg
from kuchle.exterior import (
    DUAL,
    PRIMAL,
    ExteriorError,
    Multivector,
    SkewMatrix,
    basis,
    contract,
    decomposable,
    determinant_element,
    duality_sign,
    eps_dual,
    eps_inverse,
    evaluate,
    pfaffian,
    wedge,
)
from kuchle.field import Field
from kuchle.structure import dual_trivector, standard_lambda

Q = Field.rational()


def rand_mv(rng, field, n, k, variance, lo=-3, hi=3):
    return Multivector(n, k, variance, tuple(field(rng.randint(lo, hi)) for _ in basis(n, k)), field)


@pytest.mark.parametrize("n", [6, 7])
def test_duality_identity_fuzz(n):
    """ω⌟ξ against ξ∨⌟ω∨ for ω a polyvector and ξ a form, all grades."""
    rng = random.Random(100 + n)
    eps = determinant_element(Q, n, DUAL)
    eps_inv = eps_inverse(eps)
    for _ in range(1000):
        k = rng.randrange(n + 1)
        p = rng.randrange(k + 1)
        om = rand_mv(rng, Q, n, k, PRIMAL)
        xi = rand_mv(rng, Q, n, p, DUAL)
        lhs = contract(om, xi)
        rhs = contract(eps_dual(xi, eps_inv), eps_dual(om, eps))
        assert lhs == rhs.scale(duality_sign(n, k, p))


@pytest.mark.parametrize("n", [6, 7])
def test_duality_sign_free_for_4vectors_and_2forms(n):
    rng = random.Random(n)
    eps = determinant_element(Q, n, DUAL)
    eps_inv = eps_inverse(eps)
    assert duality_sign(n, 4, 2) == 1
    for _ in range(200):
        om = rand_mv(rng, Q, n, 4, PRIMAL)
        xi = rand_mv(rng, Q, n, 2, DUAL)
        assert contract(om, xi) == contract(eps_dual(xi, eps_inv), eps_dual(om, eps))


@pytest.mark.parametrize("n", [5, 6, 7])
def test_double_dual_is_identity(n):
    rng = random.Random(7 * n)
    for variance in (PRIMAL, DUAL):
        eps = determinant_element(Q, n, variance.opposite, 2)
        for k in range(n + 1):
            x = rand_mv(rng, Q, n, k, variance)
            assert eps_dual(eps_dual(x, eps), eps_inverse(eps)) == x


def test_eps_dual_rejects_bad_eps():
    x = Multivector.monomial(Q, 4, (0, 1), DUAL)
    with pytest.raises(ExteriorError):
        eps_dual(x, Multivector.zero(Q, 4, 4, PRIMAL))
    with pytest.raises(ExteriorError):
        eps_dual(x, determinant_element(Q, 4, DUAL))
    with pytest.raises(ExteriorError):
        eps_dual(x, Multivector.monomial(Q, 4, (0, 1, 2), PRIMAL))


def test_lambda_dual_golden():
    lam_v = dual_trivector(standard_lambda(Q))
    expected = {(0, 1, 6): 1, (0, 2, 5): 1, (0, 3, 4): 1, (1, 2, 3): -1, (4, 5, 6): 1}
    assert lam_v == Multivector.from_terms(Q, 7, 3, expected, PRIMAL)
    assert {b for b, _ in lam_v.terms()} == {(4, 5, 6), (1, 2, 3), (0, 3, 4), (0, 2, 5), (0, 1, 6)}


def test_lambda_contract_e0_anchor():
    lam = standard_lambda(Q)
    e0 = Multivector.vector(Q, [1, 0, 0, 0, 0, 0, 0])
    got = contract(lam, e0)
    assert got == Multivector.from_terms(Q, 7, 3, {(1, 2, 3): 1, (4, 5, 6): 1}, DUAL)


def test_standard_lambda_value():
    lam = standard_lambda(Q)
    e = [Multivector.vector(Q, [int(i == j) for j in range(7)]) for i in range(7)]
    assert evaluate(lam, e[:4]) == 1
    assert evaluate(lam, [e[1], e[0], e[2], e[3]]) == -1
    assert evaluate(lam, [e[0], e[1], e[2], e[4]]) == 0


@pytest.mark.parametrize("field", [Q, Field(5), Field(7)])
def test_pfaffian_squared_is_det(field):
    rng = random.Random(3)
    for n in (2, 4, 6, 8):
        for _ in range(15):
            upper = {(i, j): rng.randint(-4, 4) for i, j in combinations(range(n), 2)}
            m = SkewMatrix.from_upper(field, n, upper)
            pf = pfaffian(m)
            assert pf * pf == linalg.det(m.rows(), field)


def test_pfaffian_standard_values():
    m = SkewMatrix.from_upper(Q, 4, {(0, 1): 2, (2, 3): 3})
    assert pfaffian(m) == 6
    with pytest.raises(ExteriorError):
        pfaffian(SkewMatrix.from_upper(Q, 3, {(0, 1): 1}))


def test_skew_matrix_validates():
    with pytest.raises(ExteriorError):
        SkewMatrix.from_rows(Q, [[0, 1], [1, 0]])


def test_contraction_composition_exhaustive():
    """(ω⌟a)⌟b = ω⌟(a∧b) with leading slots, on basis elements in dims up to 5."""
    for n in range(1, 6):
        for k in range(n + 1):
            for om_b in basis(n, k):
                om = Multivector.monomial(Q, n, om_b, DUAL)
                for p1 in range(k + 1):
                    for p2 in range(k - p1 + 1):
                        for a in basis(n, p1):
                            A = Multivector.monomial(Q, n, a, PRIMAL)
                            for b in basis(n, p2):
                                B = Multivector.monomial(Q, n, b, PRIMAL)
                                if set(a) & set(b):
                                    continue
                                lhs = contract(contract(om, A), B)
                                assert lhs == contract(om, wedge(A, B))


def test_evaluate_agrees_with_contract():
    rng = random.Random(11)
    F = Field(7)
    for _ in range(200):
        n = rng.randint(2, 7)
        k = rng.randint(1, n)
        form = rand_mv(rng, F, n, k, DUAL)
        rows = [[rng.randrange(7) for _ in range(n)] for _ in range(k)]
        vecs = [Multivector.vector(F, r) for r in rows]
        top = contract(form, decomposable(F, rows))
        assert evaluate(form, vecs) == top.coeffs[0]


def test_wedge_graded_commutativity():
    rng = random.Random(5)
    for _ in range(100):
        n = rng.randint(2, 7)
        a_k = rng.randint(0, n)
        b_k = rng.randint(0, n - a_k)
        a = rand_mv(rng, Q, n, a_k, DUAL)
        b = rand_mv(rng, Q, n, b_k, DUAL)
        assert wedge(a, b) == wedge(b, a).scale((-1) ** (a_k * b_k))


def test_errors():
    a = Multivector.monomial(Q, 4, (0, 1), DUAL)
    with pytest.raises(ExteriorError):
        wedge(a, Multivector.monomial(Q, 4, (0, 1, 2), DUAL))
    with pytest.raises(ExteriorError):
        contract(a, Multivector.monomial(Q, 4, (0,), DUAL))
    with pytest.raises(ExteriorError):
        contract(a, Multivector.monomial(Q, 5, (0,), PRIMAL))
    with pytest.raises(ExteriorError):
        Multivector.from_terms(Q, 4, 2, {(0, 4): 1})


def test_from_terms_sorts_with_sign():
    a = Multivector.from_terms(Q, 4, 2, {(1, 0): 1})
    assert a == Multivector.monomial(Q, 4, (0, 1), DUAL, -1)
    assert Multivector.from_terms(Q, 4, 2, {(1, 1): 5}).is_zero()
