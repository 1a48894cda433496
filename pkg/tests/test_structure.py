import random
from fractions import Fraction

import pytest

from kuchle import linalg
from kuchle.exterior import DUAL, PRIMAL, Multivector, contract, pfaffian, wedge
from kuchle.field import Field
from kuchle.structure import (
    ParameterError,
    build_instance,
    certify,
    chi_poly,
    find_certified,
    hitchin_operator,
    hitchin_split,
    instance_from_forms,
    lambda_quadric,
    mmk,
    mu_matrix,
    split_odd,
    standard_lambda,
    standard_lambda_bar,
    standard_lambda_prime,
)

Q = Field.rational()
F5 = Field(5)

STANDARD_MU = {(1, 6): 1, (2, 5): 1, (3, 4): 1}


def sym_matrix(field, diag0, cross):
    """Matrix of diag0*x0^2 + cross*(x1x6 + x2x5 + x3x4)."""
    m = linalg.zeros(field, 7, 7)
    m[0][0] = field(diag0)
    for i, j in ((1, 6), (2, 5), (3, 4)):
        m[i][j] = m[j][i] = field(cross) / 2
    return m


def proportional(a, b):
    flat_a = [x for r in a for x in r]
    flat_b = [x for r in b for x in r]
    i = next(k for k, x in enumerate(flat_b) if x != 0)
    if flat_a[i] == 0:
        return False
    r = flat_a[i] / flat_b[i]
    return all(x == r * y for x, y in zip(flat_a, flat_b))


def test_standard_lambda_is_general():
    B, d = lambda_quadric(standard_lambda(Q))
    assert d != 0
    # the degeneracy quadric on W∨
    assert proportional(B, sym_matrix(Q, 1, -1))


def test_dual_quadric_on_w():
    """Equation of the projective dual quadric in P(W) for the standard λ."""
    B, _ = lambda_quadric(standard_lambda(Q))
    Binv = linalg.inverse(B, Q)
    assert proportional(Binv, sym_matrix(Q, 1, -4))


def _hitchin_c_at(lam, w):
    """K^2 scalar of the 3-form λ⌟w descended to W/<w>."""
    frame = [w] + [[int(j == i) for j in range(7)] for i in range(1, 7)]
    e0 = Multivector.vector(Q, [1] + [0] * 6)
    t = contract(lam.change_basis(frame), e0).restrict(range(1, 7))
    K = hitchin_operator(t)
    return linalg.matmul(K, K)[0][0]


def test_dual_quadric_is_where_lambda_w_degenerates():
    lam = standard_lambda(Q)
    on = [1, 1, 0, 0, 0, 0, Fraction(1, 4)]  # x0^2 = 4 x1 x6
    off = [1, 1, 0, 0, 0, 0, 1]  # x0^2 = x1 x6
    assert _hitchin_c_at(lam, on) == 0
    assert _hitchin_c_at(lam, off) != 0


def test_split_of_standard_pair():
    lam = standard_lambda(Q)
    mu = Multivector.from_terms(Q, 7, 2, STANDARD_MU, DUAL)
    sp = split_odd(lam, mu)
    assert [x for x in sp.w0] in ([1, 0, 0, 0, 0, 0, 0], [-1, 0, 0, 0, 0, 0, 0])
    assert sp.lam_bar == standard_lambda_bar(Q).scale(sp.w0[0])
    assert sp.lam_prime == standard_lambda_prime(Q)


def test_hitchin_split_of_standard_lambda_bar():
    hs = hitchin_split(standard_lambda_bar(Q))
    spans = [linalg.rref(hs.A1, Q)[1], linalg.rref(hs.A2, Q)[1]]
    assert sorted(spans) == [[0, 1, 2], [3, 4, 5]]


@pytest.mark.parametrize("field", [Q, Field(5), Field(7), Field(11)])
def test_pfaffian_of_mu_matrix(field):
    rng = random.Random(2)
    for _ in range(20):
        M = [field.random(rng, nonzero=True) for _ in range(6)]
        K = [field.random(rng, nonzero=True) for _ in range(3)]
        P = mmk(field, M, K)
        pf = pfaffian(mu_matrix(field, M, K))
        assert pf in (P * P, -(P * P))


def test_mu_square_matches_expression():
    inst = build_instance([1, 2, 3, 4, 5, 6], [1, 2, 3], Q)
    assert inst.mu_sq_scale == 2 * mmk(Q, [1, 2, 3, 4, 5, 6], [1, 2, 3])


@pytest.mark.parametrize("M,K,code", [
    ([0, 1, 1, 1, 1, 1], [1, 2, 3], "ZeroM"),
    ([1, 1, 1, 1, 1, 1], [1, 0, 3], "ZeroK"),
    ([1, 1, 1, 1, 1, 1], [1, 1, 2], "RepeatedK"),
])
def test_parameter_errors(M, K, code):
    with pytest.raises(ParameterError) as exc:
        build_instance(M, K, Q)
    assert code in {c for _, c, _ in exc.value.problems}


def test_mmk_zero_rejected():
    M, K = [1, 1, 1, 1, 1, 1], [1, 2, -1]  # 1 + 2 - 1 - 2 = 0
    assert mmk(Q, M, K) == 0
    with pytest.raises(ParameterError) as exc:
        build_instance(M, K, Q)
    assert {c for _, c, _ in exc.value.problems} == {"MmkZero"}


def test_certify_sampled_instance_f5():
    res = find_certified(F5, seed=0, retries=200)
    assert res.instance is not None
    assert res.certificate.passed
    assert res.attempts <= 200


def test_certify_zero_lambda_fails_a1():
    lam = Multivector.zero(F5, 7, 4)
    mu = Multivector.from_terms(F5, 7, 2, STANDARD_MU, DUAL)
    cert = certify(lam, mu)
    assert not cert.passed
    assert not cert.a1_general_lambda.ok
    assert cert.a1_general_lambda.witness == 0


def _random_gl7(field, rng):
    while True:
        g = [[field.random(rng) for _ in range(7)] for _ in range(7)]
        if linalg.det(g, field) != 0:
            return g


@pytest.mark.parametrize("field", [Q, Field(5), Field(7)])
def test_certify_invariant_under_change_of_basis(field):
    rng = random.Random(9)
    res = find_certified(field, seed=1)
    inst = res.instance
    g = _random_gl7(field, rng)
    lam = inst.lam.change_basis(g)
    mu = inst.mu.change_basis(g)
    cert = certify(lam, mu)
    assert cert.passed
    moved = instance_from_forms(lam, mu)
    assert certify(moved.lam, moved.mu).passed


def test_chi_has_distinct_roots_for_certified():
    res = find_certified(F5, seed=0)
    inst = res.instance
    hs = hitchin_split(inst.lam_bar)
    chi = chi_poly(inst.lam_prime, wedge(inst.mu_bar, inst.mu_bar), hs.A1, hs.A2)
    assert chi.disc() != 0


def test_lambda_prime_annihilates_hitchin_summands():
    res = find_certified(Field(7), seed=0)
    inst = res.instance
    hs = hitchin_split(inst.lam_bar)
    for A in (hs.A1, hs.A2):
        vecs = [Multivector.vector(inst.field, v, PRIMAL) for v in A]
        t = inst.lam_prime
        for v in vecs:
            t = contract(t, v)
        assert t.is_zero()
