"""Rank profiles of λ̂, special checks, and the structural identities.

Every routine takes a :class:`Geometry` (forms in frame coordinates over F_p)
and returns plain data.
"""

from __future__ import annotations

import random
import time
from collections import Counter
from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from ..exterior import DUAL, Multivector, contract
from . import _kernel
from .engine import Constraint, Deadline, solve
from .subspace import Subspace, dense, nullspace_mod, projective_points, rank_mod, rref_mod
from .varieties import Geometry, VarietyId, hyperplanes, points, z_flags


class HyperplaneViolation(ValueError):
    pass


def _normalize(v, p):
    lead = next(x for x in v if x % p)
    s = pow(lead, p - 2, p)
    return tuple((x * s) % p for x in v)


def _canon(rows, p):
    return tuple(rref_mod([list(r) for r in rows], p)[0])


def intersect_mod(A, B, p):
    """Basis of span(A) ∩ span(B)."""
    n = len(A[0])
    cols = [[A[i][j] for i in range(len(A))] + [(-B[i][j]) % p for i in range(len(B))]
            for j in range(n)]
    out = []
    for sol in nullspace_mod(cols, p, len(A) + len(B)):
        v = [sum(sol[i] * A[i][j] for i in range(len(A))) % p for j in range(n)]
        out.append(v)
    return list(rref_mod(out, p)[0]) if out else []


# ---------------------------------------------------------------------------
# λ̂


def lambda_hat_matrix(U4, geom: Geometry):
    """Matrix of ∧³U4 → U4⊥, ω ↦ λ ⌟ ω, in the basis of U4⊥ from the RREF nullspace.

    Columns follow the 3-subsets (0,1,2), (0,1,3), (0,2,3), (1,2,3) of the
    basis of U4. Raises HyperplaneViolation if λ does not vanish on ∧⁴U4.
    """
    p = geom.p
    F = geom.field
    U4 = U4 if isinstance(U4, Subspace) else Subspace.from_rows(U4, p)
    if U4.k != 4 or U4.n != 7:
        raise ValueError("λ̂ is defined on 4-subspaces of W")
    vecs = U4.vectors(F)
    perp = nullspace_mod([list(r) for r in U4.basis], p, 7)
    cols = []
    for sub in combinations(range(4), 3):
        cov = geom.lam
        for i in sub:
            cov = contract(cov, vecs[i])
        c = [int(x) % p for x in cov.coeffs]
        if any(sum(a * b for a, b in zip(c, u)) % p for u in U4.basis):
            raise HyperplaneViolation("λ does not vanish on ∧⁴U4")
        coords = _solve_in_basis(perp, c, p)
        cols.append(coords)
    return [[cols[j][i] for j in range(4)] for i in range(3)]


def _solve_in_basis(basis, v, p):
    """Coordinates of v in the span of ``basis`` (which must contain v)."""
    m = len(basis)
    cols = [[basis[i][j] for i in range(m)] + [(-v[j]) % p] for j in range(len(v))]
    for sol in nullspace_mod(cols, p, m + 1):
        if sol[m] % p:
            s = pow(sol[m], p - 2, p)
            return [(x * s) % p for x in sol[:m]]
    raise ValueError("vector is not in the span")


def section_hat_ranks(geom: Geometry, rows3):
    """rank λ̂ at U4 = <w0> ⊕ Ubar3 for each stored Ubar3 ⊂ Wbar."""
    p = geom.p
    N = len(rows3)
    U4 = np.zeros((N, 4, 7), dtype=np.int64)
    U4[:, 0, 0] = 1
    U4[:, 1:, 1:] = rows3
    subsets = list(combinations(range(4), 3))
    rowsets = np.zeros((N * 4, 3, 7), dtype=np.int64)
    for s, sub in enumerate(subsets):
        rowsets[s::4] = U4[:, list(sub), :]
    lam = np.array(dense(geom.lam, p), dtype=np.int64)
    cov = _kernel.contract_rows(lam, rowsets, 7, p)[:, [1 << i for i in range(7)]]
    cov = cov.reshape(N, 4, 7)
    # the hyperplane condition: every covector vanishes on U4
    if np.any(np.einsum("nsj,nkj->nsk", cov, U4) % p):
        raise HyperplaneViolation("λ does not vanish on ∧⁴U4 for some section point")
    return _kernel.batch_rank(cov, p, geom.inv)


@dataclass
class RankProfile:
    domain: str
    q: int
    histogram: dict
    checks: dict
    seconds: float
    extra: dict = dc_field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def as_dict(self):
        return {
            "domain": self.domain,
            "q": self.q,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "checks": self.checks,
            "pass": self.passed,
            "seconds": round(self.seconds, 3),
            **({"extra": self.extra} if self.extra else {}),
        }


def rank_profile(geom: Geometry, domain: str = "LGr_section", threads: int = 1,
                 budget_seconds: float | None = None) -> RankProfile:
    t0 = time.monotonic()
    budget = Deadline(budget_seconds)
    p = geom.p
    if domain == "LGr_section":
        rows = points(VarietyId.LGr3Wbar_lambda, geom, threads, budget)
        ranks = section_hat_ranks(geom, rows)
        hist = dict(sorted(Counter(int(r) for r in ranks).items()))
        rank2 = {tuple(map(tuple, r)) for r, k in zip(rows.tolist(), ranks) if k == 2}
        zimg = {U3 for U3, _ in z_flags(geom, threads, budget)}
        checks = {
            "ranks_in_2_3": set(hist) <= {2, 3},
            "no_rank_at_most_1": all(k > 1 for k in hist),
            "rank2_equals_Z_count": hist.get(2, 0) == len(zimg),
            "rank2_set_equals_Z_image": rank2 == zimg,
        }
        extra = {"section_points": int(len(rows)), "Z_image": len(zimg)}
    elif domain == "Gr4_section":
        _, hist = solve(7, 4, p, [Constraint.iso(geom.lam)], threads=threads, budget=budget,
                        split=10 ** 6, hat_ranks=True)
        nq = len(points(VarietyId.Qdual_lambda, geom, threads, budget))
        checks = {
            "ranks_in_1_2_3": set(hist) <= {1, 2, 3},
            "rank0_empty": hist.get(0, 0) == 0,
            "rank1_equals_Qdual": hist.get(1, 0) == nq,
        }
        extra = {"Qdual": nq, "section_points": sum(hist.values())}
    else:
        raise ValueError(f"unknown domain {domain!r}; use LGr_section or Gr4_section")
    return RankProfile(domain, p, hist, checks, time.monotonic() - t0, extra)


# ---------------------------------------------------------------------------
# special checks


def _point_set(rows):
    return {tuple(map(tuple, r)) for r in rows.tolist()}


def shift_check(geom: Geometry, ts, threads: int = 1):
    """X5 for (λ − tμ², μ) equals X5 for (λ, μ) as a point set."""
    base = _point_set(points(VarietyId.X5, geom, threads))
    out = {}
    for t in ts:
        other = _point_set(points(VarietyId.X5, geom.shifted(t), threads))
        out[str(t)] = other == base
    return out


def no21_scan(geom: Geometry):
    """μ-isotropic U_{2,A_i} ⊕ U_{1,A_j} annihilated by λ′ (should be none)."""
    p = geom.p
    lp = np.array(dense(geom.lam_prime, p), dtype=np.int64)
    mb = dense(geom.mu_bar, p)
    cand = []
    for big, small in ((geom.A1, geom.A2), (geom.A2, geom.A1)):
        planes = hyperplanes(big, p)
        lines = [_combine(pt, small, p) for pt in projective_points(3, p)]
        for U2 in planes:
            for v in lines:
                cand.append(list(U2) + [v])
    rows = np.array(cand, dtype=np.int64)
    ann = _kernel.contract_rows(lp, rows, 6, p)
    violations = 0
    isotropic = 0
    for r, c in zip(cand, ann):
        if not _iso2(mb, r, p):
            continue
        isotropic += 1
        if not np.any(c % p):
            violations += 1
    return {"candidates": len(cand), "isotropic": isotropic, "violations": violations}


def _combine(coeffs, basis, p):
    return [sum(c * b[j] for c, b in zip(coeffs, basis)) % p for j in range(len(basis[0]))]


def _iso2(form_dense, vecs, p):
    n = len(vecs[0])
    for a, b in combinations(vecs, 2):
        s = 0
        for i, j in combinations(range(n), 2):
            c = form_dense[(1 << i) | (1 << j)]
            if c:
                s += c * (a[i] * b[j] - a[j] * b[i])
        if s % p:
            return False
    return True


def adjoint_check(geom: Geometry, samples: int = 20, rng=None, threads: int = 1):
    """Lines of Gr_{λ∨}(2,W∨) lie on Q∨, so points off Q∨ lie on none of them."""
    p = geom.p
    rng = rng or random.Random(0)
    planes = points(VarietyId.GrLambda5W, geom, threads).tolist()
    quad = {tuple(r[0]) for r in points(VarietyId.Qdual_lambda, geom, threads).tolist()}
    covered = set()
    for a, b in planes:
        covered.add(_normalize(b, p))
        for t in range(p):
            covered.add(_normalize([(x + t * y) % p for x, y in zip(a, b)], p))
    off = []
    while len(off) < samples:
        v = [rng.randrange(p) for _ in range(7)]
        if any(v) and _normalize(v, p) not in quad:
            off.append(_normalize(v, p))
    hits = sum(1 for v in off if v in covered)
    return {
        "planes": len(planes),
        "covered_points": len(covered),
        "covered_subset_of_Qdual": covered <= quad,
        "samples_off_Qdual": samples,
        "samples_on_some_plane": hits,
    }


def c_loci(geom: Geometry, flags=None, threads: int = 1):
    """Rank-1 locus of ∧²Ubar3 → Ubar4⊥ on Z-flags, split by Ubar4 ∩ A_i ⊂ Ubar3."""
    p = geom.p
    flags = flags if flags is not None else z_flags(geom, threads)
    lb = np.array(dense(geom.lam_bar, p), dtype=np.int64)
    rowsets = []
    for U3, _ in flags:
        for i, j in combinations(range(3), 2):
            rowsets.append([U3[i], U3[j]])
    cov = _kernel.contract_rows(lb, np.array(rowsets, dtype=np.int64), 6, p)
    cov = cov[:, [1 << i for i in range(6)]].reshape(len(flags), 3, 6)
    ranks = _kernel.batch_rank(cov, p, geom.inv)
    c1, c2, rank1 = set(), set(), set()
    for (U3, U4), r in zip(flags, ranks):
        key = (U3, U4)
        if r == 1:
            rank1.add(key)
        for A, target in ((geom.A1, c1), (geom.A2, c2)):
            cap = intersect_mod([list(x) for x in U4], [list(x) for x in A], p)
            if rank_mod([list(x) for x in U3] + cap, p) == 3:
                target.add(key)
    return {
        "flags": len(flags),
        "rank_histogram": dict(sorted(Counter(int(r) for r in ranks).items())),
        "C1": len(c1),
        "C2": len(c2),
        "disjoint": not (c1 & c2),
        "union_is_rank1_locus": (c1 | c2) == rank1,
    }


@dataclass
class SpecialReport:
    q: int
    shift: dict
    no21: dict
    adjoint: dict
    c_loci: dict
    seconds: float

    @property
    def passed(self) -> bool:
        q = self.q
        return (
            all(self.shift.values())
            and self.no21["violations"] == 0
            and self.adjoint["covered_subset_of_Qdual"]
            and self.adjoint["samples_on_some_plane"] == 0
            and self.c_loci["C1"] == q + 1
            and self.c_loci["C2"] == q + 1
            and self.c_loci["disjoint"]
            and self.c_loci["union_is_rank1_locus"]
        )

    def as_dict(self):
        return {
            "q": self.q,
            "shift": self.shift,
            "no21": self.no21,
            "adjoint": self.adjoint,
            "c_loci": self.c_loci,
            "pass": self.passed,
            "seconds": round(self.seconds, 3),
        }


def special_checks(geom: Geometry, seed: int = 0, threads: int = 1) -> SpecialReport:
    t0 = time.monotonic()
    p = geom.p
    rng = random.Random(seed)
    ts = rng.sample(range(1, p), 3)
    return SpecialReport(
        p,
        shift_check(geom, ts, threads),
        no21_scan(geom),
        adjoint_check(geom, rng=rng, threads=threads),
        c_loci(geom, threads=threads),
        time.monotonic() - t0,
    )


# ---------------------------------------------------------------------------
# structural identities checked point by point


def flag_middle_count(geom: Geometry, threads: int = 1):
    """Number of pairs Ubar2 ⊂ Ubar3 with Ubar3 on the LGr section, counted from the Ubar2 side."""
    p = geom.p
    rows2 = points(VarietyId.LGr2Wbar, geom, threads)
    lb = np.array(dense(geom.lam_bar, p), dtype=np.int64)
    mb = np.array(dense(geom.mu_bar, p), dtype=np.int64)
    lines = _kernel.middle_fibers(rows2, lb, mb, p, geom.inv)
    if np.any(lines % (p * p)):
        raise ArithmeticError("line count not divisible by q^2")
    fib = lines // (p * p)
    return {
        "LGr2_points": int(len(rows2)),
        "middle": int(fib.sum()),
        "fiber_sizes": {str(k): v for k, v in sorted(Counter(int(x) for x in fib).items())},
    }


def projection_check(geom: Geometry, threads: int = 1):
    """U2 ↦ pr(U2) from Gr_ξ(2,W) to D_{λbar,μ} along w0."""
    p = geom.p
    gx = points(VarietyId.GrXi2W, geom, threads)
    d = _point_set(points(VarietyId.Dlm, geom, threads))
    images = set()
    degenerate = 0
    for U in gx.tolist():
        pr = [r[1:] for r in U]
        if rank_mod(pr, p) < 2:
            degenerate += 1
            continue
        images.add(_canon(pr, p))
    return {
        "GrXi": int(len(gx)),
        "Dlm": len(d),
        "w0_in_U2": degenerate,
        "injective": degenerate == 0 and len(images) == len(gx),
        "image_equals_Dlm": images == d,
    }


def sigma_fibration(geom: Geometry, flags=None, threads: int = 1):
    """Fiber sizes of Z → S."""
    p = geom.p
    flags = flags if flags is not None else z_flags(geom, threads)
    s_points = _point_set(points(VarietyId.S_surface, geom, threads))
    fibers = Counter(U4 for _, U4 in flags)
    sizes = Counter(fibers.get(s, 0) for s in s_points)
    return {
        "S_points": len(s_points),
        "fiber_sizes": {str(k): v for k, v in sorted(sizes.items())},
        "all_fibers_q_plus_1": set(sizes) == {p + 1},
    }


# ---------------------------------------------------------------------------
# fourfold


def pencil_roots(geom: Geometry, nu: Multivector):
    """Roots in F_q of det(t μ + ν⌟w0) on A1 × A2, and the leading coefficient."""
    p = geom.p
    g = object.__new__(Geometry)
    g.__dict__.update(geom.__dict__)
    g.set_nu(nu)
    mb = dense(geom.mu_bar, p)
    nb = dense(g.nu_bar, p)

    def pair(form, a, b):
        s = 0
        for i, j in combinations(range(6), 2):
            c = form[(1 << i) | (1 << j)]
            if c:
                s += c * (a[i] * b[j] - a[j] * b[i])
        return s % p

    Mm = [[pair(mb, a, b) for b in geom.A2] for a in geom.A1]
    Mn = [[pair(nb, a, b) for b in geom.A2] for a in geom.A1]
    roots = [t for t in range(p)
             if rank_mod([[(t * x + y) % p for x, y in zip(r1, r2)] for r1, r2 in zip(Mm, Mn)], p) < 3]
    lead = rank_mod(Mm, p) == 3
    return roots, lead


def sample_nu(geom: Geometry, seed: int = 0, retries: int = 200):
    """A random 3-form ν whose pencil with μ on A1 × A2 has three distinct roots in F_q."""
    p = geom.p
    F = geom.field
    rng = random.Random(seed)
    for attempt in range(1, retries + 1):
        terms = {c: rng.randrange(p) for c in combinations(range(7), 3)}
        nu = Multivector.from_terms(F, 7, 3, terms, DUAL)
        roots, lead = pencil_roots(geom, nu)
        if lead and len(roots) == 3:
            return nu, attempt
    raise RuntimeError(f"no split pencil found in {retries} tries")


def fourfold_counts(geom: Geometry, nu: Multivector | None = None, seed: int = 0,
                    threads: int = 1, budget_seconds: float | None = None):
    from .varieties import count

    attempts = 0
    if nu is None:
        nu, attempts = sample_nu(geom, seed)
    roots, lead = pencil_roots(geom, nu)
    g = object.__new__(Geometry)
    g.__dict__.update(geom.__dict__)
    g.set_nu(nu)
    sigma = count(VarietyId.Sigma, g, threads, budget_seconds)
    split = lead and len(roots) == 3
    if not split:
        sigma.expected = None
        sigma.passed = None
        sigma.extra["note"] = "pencil is not split over the field; no expectation"
    x4 = count(VarietyId.X4, g, threads, budget_seconds)
    x4.extra["degenerate_nu"] = nu.is_zero()
    return {
        "nu_terms": [[list(k), int(v)] for k, v in nu.terms()],
        "nu_attempts": attempts,
        "pencil_roots": roots,
        "pencil_split": split,
        "Sigma": sigma,
        "X4": x4,
    }
