import random

import numpy as np
import pytest

from kuchle.exterior import DUAL, PRIMAL, ExteriorError, Multivector, basis
from kuchle.field import Field
from kuchle.fingeom import (
    BudgetExceeded,
    Constraint,
    Subspace,
    UnsupportedField,
    VarietyId,
    annihilated_by,
    count,
    count_subspaces,
    enum_subspaces,
    gaussian_binomial,
    isotropic_for,
    member,
    points,
    solve,
)
from kuchle.fingeom.engine import Deadline


def rand_form(rng, F, n, k, density=0.5, variance=DUAL):
    coeffs = tuple(F(rng.randrange(F.char) if rng.random() < density else 0) for _ in basis(n, k))
    return Multivector(n, k, variance, coeffs, F)


def oracle(n, k, q, constraints):
    out = []
    for U in enum_subspaces(k, n, q):
        ok = True
        for c in constraints:
            test = isotropic_for if c.kind == 0 else annihilated_by
            if not test(c.form, U):
                ok = False
                break
        if ok:
            out.append(U.basis)
    return out


@pytest.mark.parametrize("n,k,q", [(4, 2, 3), (5, 2, 3), (5, 3, 3), (6, 3, 3), (4, 2, 5), (7, 3, 5)])
def test_unconstrained_counts_are_gaussian_binomials(n, k, q):
    assert count_subspaces(n, k, q) == gaussian_binomial(n, k, q)


def test_gaussian_binomial_values():
    assert gaussian_binomial(4, 2, 3) == 130
    assert gaussian_binomial(6, 3, 3) == 33880
    assert gaussian_binomial(5, 0, 7) == 1
    assert gaussian_binomial(3, 4, 5) == 0


def test_python_enumerator_is_exhaustive_and_canonical():
    subs = list(enum_subspaces(2, 4, 3))
    assert len(subs) == 130
    assert len({s.basis for s in subs}) == 130
    assert all(s.is_canonical() for s in subs)


def test_pruned_equals_filtered():
    F = Field(3)
    rng = random.Random(4)
    mu = rand_form(rng, F, 5, 2, 0.8)
    pruned = [U.basis for U in enum_subspaces(
        2, 5, 3, prune=lambda rows: len(rows) < 2 or isotropic_for(mu, rows))]
    filtered = [U.basis for U in enum_subspaces(2, 5, 3) if isotropic_for(mu, U)]
    assert pruned == filtered


@pytest.mark.parametrize("seed", range(12))
def test_kernel_matches_oracle(seed):
    rng = random.Random(seed)
    q = rng.choice([3, 5])
    n = rng.choice([4, 5]) if q == 5 else rng.choice([4, 5, 6])
    k = rng.randint(1, n - 1)
    F = Field(q)
    cons = []
    for _ in range(rng.randint(1, 2)):
        if rng.random() < 0.5:
            g = rng.randint(1, k)
            cons.append(Constraint.iso(rand_form(rng, F, n, g)))
        else:
            g = rng.randint(k, n)
            cons.append(Constraint.ann(rand_form(rng, F, n, g)))
    expected = oracle(n, k, q, cons)
    cnt, rows = solve(n, k, q, cons, store=True)
    assert cnt == len(expected)
    got = sorted(tuple(tuple(int(x) for x in r) for r in U) for U in rows.tolist())
    assert got == sorted(expected)
    assert solve(n, k, q, cons)[0] == cnt


def test_kernel_polyvector_constraint():
    F = Field(3)
    rng = random.Random(1)
    t = rand_form(rng, F, 5, 3, 0.7, PRIMAL)
    cons = [Constraint.ann(t)]
    assert solve(5, 2, 3, cons)[0] == len(oracle(5, 2, 3, cons))


def test_results_independent_of_threads(geom5):
    a = count(VarietyId.X5, geom5, threads=1)
    b = count(VarietyId.X5, geom5, threads=3)
    assert a.observed == b.observed
    ra = points(VarietyId.F_flag, geom5, threads=1)
    rb = points(VarietyId.F_flag, geom5, threads=4)
    assert np.array_equal(ra, rb)


def test_budget_exceeded():
    with pytest.raises(BudgetExceeded):
        solve(7, 3, 7, [], budget=Deadline(0.0))


@pytest.mark.parametrize("q", [2, 4, 9, 1])
def test_unsupported_field(q):
    with pytest.raises(UnsupportedField):
        solve(4, 2, q, [])


def test_predicate_dimension_errors():
    F = Field(5)
    U = Subspace.from_rows([[1, 0, 0, 0]], 5)
    with pytest.raises(ExteriorError):
        isotropic_for(Multivector.monomial(F, 4, (0, 1), DUAL), U)
    V = Subspace.from_rows([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 1, 0]], 5)
    with pytest.raises(ExteriorError):
        annihilated_by(Multivector.monomial(F, 4, (0, 1), DUAL), V)


def test_subspace_basics():
    U = Subspace.from_rows([[2, 4, 0], [1, 2, 1]], 5)
    assert U.k == 2 and U.is_canonical()
    assert U.basis == ((1, 2, 0), (0, 0, 1))
    assert U.contains([3, 1, 4])
    assert not U.contains([0, 1, 0])
    L = Subspace.from_rows([[1, 2, 3]], 5)
    assert L <= U


@pytest.mark.parametrize("variety", [
    VarietyId.X5, VarietyId.F_flag, VarietyId.S_surface, VarietyId.GrXi2W, VarietyId.GrLambda5W,
    VarietyId.Dlm, VarietyId.Qdual_lambda, VarietyId.ZeroLocus_gr26,
])
def test_points_satisfy_exact_membership(geom5, variety):
    rows = points(variety, geom5)
    rng = random.Random(0)
    n = rows.shape[2]
    for i in rng.sample(range(len(rows)), min(25, len(rows))):
        U = Subspace.from_rows(rows[i].tolist(), 5)
        assert member(variety, U, geom5)
    found = {tuple(map(tuple, r)) for r in rows.tolist()}
    k = rows.shape[1]
    misses = 0
    for _ in range(40):
        U = Subspace.from_rows([[rng.randrange(5) for _ in range(n)] for _ in range(k)], 5, n)
        if U.k != k:
            continue
        assert member(variety, U, geom5) == (U.basis in found)
        misses += U.basis not in found
    assert misses > 0


def test_z_flags_membership(geom5):
    from kuchle.fingeom import z_flags

    flags = z_flags(geom5)
    assert len(flags) == 276
    for U3, U4 in flags[:20]:
        a = Subspace.from_rows([list(r) for r in U3], 5, 6)
        b = Subspace.from_rows([list(r) for r in U4], 5, 6)
        assert member(VarietyId.Z_scroll, (a, b), geom5)


def test_membership_wrong_shape(geom5):
    U = Subspace.from_rows([[1, 0, 0, 0, 0, 0]], 5)
    with pytest.raises(ValueError):
        member(VarietyId.X5, U, geom5)


@pytest.mark.heavy
def test_gr4_section_rank_profile(geom5):
    """About five minutes on one core."""
    from kuchle.fingeom import rank_profile

    prof = rank_profile(geom5, "Gr4_section")
    assert prof.passed
    assert prof.histogram.get(1) == 3906
    assert 0 not in prof.histogram
