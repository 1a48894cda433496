"""Membership predicates and point counts for the varieties attached to an instance.

All work happens in the frame of the instance: W = <e_0..e_6> with w_0 = e_0,
Wbar = <e_1..e_6> (indexed 0..5 on Wbar), and W∨ with the dual coordinates.
"""

from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field as dc_field
from itertools import combinations

import numpy as np

from ..exterior import DUAL, Multivector, contract, wedge
from ..structure import Instance, dual_trivector, hitchin_split
from . import _kernel
from .engine import Constraint, Deadline, inverses, solve
from .subspace import (
    Subspace,
    annihilated_by,
    dense,
    isotropic_for,
    nullspace_mod,
    projective_points,
    rank_mod,
    rref_mod,
)


class VarietyId(str, enum.Enum):
    X5 = "X5"
    LGr3W_odd = "LGr3W_odd"
    LGr3Wbar = "LGr3Wbar"
    LGr3Wbar_lambda = "LGr3Wbar_lambda"
    F_flag = "F_flag"
    S_surface = "S_surface"
    Z_scroll = "Z_scroll"
    GrXi2W = "GrXi2W"
    GrLambda5W = "GrLambda5W"
    Dlm = "Dlm"
    LGr2Wbar = "LGr2Wbar"
    Qdual_lambda = "Qdual_lambda"
    ZeroLocus_gr26 = "ZeroLocus_gr26"
    ZeroLocus_gr46 = "ZeroLocus_gr46"
    X4 = "X4"
    Sigma = "Sigma"

    @classmethod
    def parse(cls, name: str) -> "VarietyId":
        for v in cls:
            if v.value.lower() == name.lower():
                return v
        raise ValueError(f"unknown variety {name!r}; choose from {', '.join(v.value for v in cls)}")


class NeedsNu(ValueError):
    pass


def _ints(vectors, p):
    return [tuple(int(x) % p for x in v) for v in vectors]


class Geometry:
    """Forms of a certified instance over F_p, ready for enumeration."""

    def __init__(self, inst: Instance, nu: Multivector | None = None):
        F = inst.field
        if not F.is_finite:
            raise ValueError("point counting needs an instance over a prime field")
        self.instance = inst
        self.field = F
        self.p = F.char
        self.lam, self.mu = inst.forms7()
        self.lam_bar = inst.lam_bar
        self.lam_prime = inst.lam_prime
        self.mu_bar = inst.mu_bar
        self.mu_sq = wedge(inst.mu_bar, inst.mu_bar)
        self.xi = inst.xi
        self.lam_dual = dual_trivector(self.lam)
        hs = hitchin_split(inst.lam_bar)
        self.A1 = _ints(hs.A1, self.p)
        self.A2 = _ints(hs.A2, self.p)
        self.nu = None
        self.nu_bar = None
        if nu is not None:
            self.set_nu(nu)
        self.inv = inverses(self.p)

    def set_nu(self, nu: Multivector):
        """ν in the original coordinates of W; stored in frame coordinates."""
        frame = self.instance.frame
        nu_f = nu.change_basis(frame)
        self.nu = nu_f
        e0 = Multivector.vector(self.field, [1, 0, 0, 0, 0, 0, 0])
        self.nu_bar = contract(nu_f, e0).restrict(range(1, 7))

    def shifted(self, t) -> "Geometry":
        """The same data with λ replaced by λ − t μ∧μ."""
        g = object.__new__(Geometry)
        g.__dict__.update(self.__dict__)
        t = self.field(t)
        g.lam = self.lam - wedge(self.mu, self.mu).scale(t)
        g.lam_prime = self.lam_prime - self.mu_sq.scale(t)
        return g


@dataclass(frozen=True)
class Spec:
    space: str  # "W", "Wbar" or "Wdual"
    k: int
    constraints: tuple  # names of (kind, attribute) pairs
    needs_nu: bool = False


_ISO, _ANN = 0, 1

SPECS = {
    VarietyId.X5: Spec("W", 3, ((_ISO, "mu"), (_ANN, "lam"))),
    VarietyId.LGr3W_odd: Spec("W", 3, ((_ISO, "mu"),)),
    VarietyId.LGr3Wbar: Spec("Wbar", 3, ((_ISO, "mu_bar"),)),
    VarietyId.LGr3Wbar_lambda: Spec("Wbar", 3, ((_ISO, "mu_bar"), (_ISO, "lam_bar"))),
    VarietyId.F_flag: Spec("Wbar", 2, ((_ISO, "mu_bar"), (_ANN, "lam_bar"))),
    VarietyId.S_surface: Spec("Wbar", 4, ((_ISO, "lam_bar"), (_ISO, "lam_prime"), (_ISO, "mu_sq"))),
    VarietyId.Z_scroll: Spec("Wbar", 4, ((_ISO, "lam_bar"), (_ISO, "lam_prime"), (_ISO, "mu_sq"))),
    VarietyId.GrXi2W: Spec("W", 2, ((_ANN, "xi"),)),
    VarietyId.GrLambda5W: Spec("Wdual", 2, ((_ANN, "lam_dual"),)),
    VarietyId.Dlm: Spec("Wbar", 2, ((_ISO, "mu_bar"),)),
    VarietyId.LGr2Wbar: Spec("Wbar", 2, ((_ISO, "mu_bar"),)),
    VarietyId.Qdual_lambda: Spec("Wdual", 1, ()),
    VarietyId.ZeroLocus_gr26: Spec("Wbar", 2, ((_ANN, "lam_bar"),)),
    VarietyId.ZeroLocus_gr46: Spec("Wbar", 4, ((_ISO, "lam_bar"),)),
    VarietyId.X4: Spec("W", 3, ((_ISO, "mu"), (_ANN, "lam"), (_ISO, "nu")), needs_nu=True),
    VarietyId.Sigma: Spec(
        "Wbar", 2, ((_ISO, "mu_bar"), (_ANN, "lam_bar"), (_ISO, "nu_bar")), needs_nu=True
    ),
}

DIMS = {"W": 7, "Wbar": 6, "Wdual": 7}


def constraints_for(variety: VarietyId, geom: Geometry):
    spec = SPECS[variety]
    if spec.needs_nu and geom.nu is None:
        raise NeedsNu(f"{variety.value} needs a 3-form nu")
    return [Constraint(kind, getattr(geom, name)) for kind, name in spec.constraints]


# ---------------------------------------------------------------------------
# exact membership


def _check_dim(U, n, k, variety):
    if U.n != n or U.k != k:
        raise ValueError(f"{variety.value} needs a {k}-subspace of a {n}-space, got ({U.k}, {U.n})")


def dlm_condition(geom: Geometry, U: Subspace) -> bool:
    """λbar ⌟ (u_1 ∧ u_2) lies in span(μ ⌟ u_1, μ ⌟ u_2), for μ-isotropic U."""
    if not isotropic_for(geom.mu_bar, U):
        return False
    u1, u2 = U.vectors(geom.field)
    c = contract(contract(geom.lam_bar, u1), u2)
    m1 = contract(geom.mu_bar, u1)
    m2 = contract(geom.mu_bar, u2)
    rows = [[int(x) for x in v.coeffs] for v in (m1, m2)]
    return rank_mod(rows + [[int(x) for x in c.coeffs]], geom.p) == rank_mod(rows, geom.p)


def qdual_condition(geom: Geometry, w) -> bool:
    """rank(λ∨ ⌟ w∨) < 6 for a covector w∨."""
    wv = Multivector.vector(geom.field, list(w), DUAL)
    two = contract(geom.lam_dual, wv)
    return _rank_2vector(two, geom.p) < 6


def _rank_2vector(two: Multivector, p):
    n = two.dim
    m = [[0] * n for _ in range(n)]
    for (i, j), c in two.terms():
        m[i][j] = int(c) % p
        m[j][i] = (-int(c)) % p
    return rank_mod(m, p)


def member(variety: VarietyId, U, geom: Geometry) -> bool:
    """Exact membership of a subspace (or a flag for Z) in a variety."""
    spec = SPECS[variety]
    n = DIMS[spec.space]
    if variety is VarietyId.Z_scroll:
        U3, U4 = U
        _check_dim(U3, 6, 3, variety)
        _check_dim(U4, 6, 4, variety)
        return (
            member(VarietyId.S_surface, U4, geom)
            and U3 <= U4
            and isotropic_for(geom.mu_bar, U3)
        )
    _check_dim(U, n, spec.k, variety)
    if variety is VarietyId.Qdual_lambda:
        return qdual_condition(geom, U.basis[0])
    for c in constraints_for(variety, geom):
        test = isotropic_for if c.kind == _ISO else annihilated_by
        if not test(c.form, U):
            return False
    if variety is VarietyId.Dlm:
        return dlm_condition(geom, U)
    return True


# ---------------------------------------------------------------------------
# counting


@dataclass
class CountReport:
    variety: str
    q: int
    observed: int
    expected_poly: list | None
    expected: int | None
    passed: bool | None
    seconds: float
    extra: dict = dc_field(default_factory=dict)

    def as_dict(self):
        return {
            "variety": self.variety,
            "q": self.q,
            "observed": self.observed,
            "expected_poly": self.expected_poly,
            "expected": self.expected,
            "pass": self.passed,
            "seconds": round(self.seconds, 3),
            **({"extra": self.extra} if self.extra else {}),
        }


def points(variety: VarietyId, geom: Geometry, threads: int = 1, budget: Deadline | None = None):
    """The F_p-points as an int array of RREF bases (flags for Z as (U3, U4) pairs)."""
    spec = SPECS[variety]
    n = DIMS[spec.space]
    p = geom.p
    if variety is VarietyId.Z_scroll:
        return z_flags(geom, threads, budget)
    _, rows = solve(n, spec.k, p, constraints_for(variety, geom), store=True,
                    threads=threads, budget=budget)
    if variety is VarietyId.Dlm:
        rows = rows[dlm_mask(geom, rows)]
    elif variety is VarietyId.Qdual_lambda:
        rows = rows[qdual_mask(geom, rows)]
    return rows


def dlm_mask(geom: Geometry, rows):
    p = geom.p
    lb = np.array(dense(geom.lam_bar, p), dtype=np.int64)
    mb = np.array(dense(geom.mu_bar, p), dtype=np.int64)
    c = _kernel.contract_rows(lb, rows, 6, p)
    m1 = _kernel.contract_rows(mb, rows[:, 0:1, :], 6, p)
    m2 = _kernel.contract_rows(mb, rows[:, 1:2, :], 6, p)
    one = [1 << i for i in range(6)]
    mats = np.stack([m1[:, one], m2[:, one], c[:, one]], axis=1)
    return _kernel.batch_rank(mats, p, geom.inv) <= 2


def qdual_mask(geom: Geometry, rows):
    p = geom.p
    ld = np.array(dense(geom.lam_dual, p), dtype=np.int64)
    two = _kernel.contract_rows(ld, rows, 7, p)
    mats = np.zeros((len(rows), 7, 7), dtype=np.int64)
    for i, j in combinations(range(7), 2):
        m = (1 << i) | (1 << j)
        mats[:, i, j] = two[:, m]
        mats[:, j, i] = (-two[:, m]) % p
    return _kernel.batch_rank(mats, p, geom.inv) < 6


def hyperplanes(rows, p):
    """All codimension-1 subspaces of the row space, as RREF tuples."""
    k = len(rows)
    out = []
    for phi in projective_points(k, p):
        coeffs = nullspace_mod([phi], p, k)
        sub = [[sum(c * r[j] for c, r in zip(cf, rows)) % p for j in range(len(rows[0]))]
               for cf in coeffs]
        out.append(tuple(rref_mod(sub, p)[0]))
    return out


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


def z_flags(geom: Geometry, threads: int = 1, budget: Deadline | None = None):
    """Flags (Ubar_3 ⊂ Ubar_4) with Ubar_4 ∈ S and Ubar_3 μ-isotropic."""
    p = geom.p
    _, S = solve(6, 4, p, constraints_for(VarietyId.S_surface, geom), store=True,
                 threads=threads, budget=budget)
    mb = dense(geom.mu_bar, p)
    flags = []
    for U4 in S.tolist():
        for U3 in hyperplanes(U4, p):
            if _iso2(mb, U3, p):
                flags.append((U3, tuple(map(tuple, U4))))
    return flags


def count(variety: VarietyId, geom: Geometry, threads: int = 1,
          budget_seconds: float | None = None) -> CountReport:
    from ..motive import NotLefschetzType, known_motive

    t0 = time.monotonic()
    budget = Deadline(budget_seconds)
    spec = SPECS[variety]
    n = DIMS[spec.space]
    if variety in (VarietyId.Dlm, VarietyId.Qdual_lambda, VarietyId.Z_scroll):
        observed = len(points(variety, geom, threads, budget))
    else:
        observed, _ = solve(n, spec.k, geom.p, constraints_for(variety, geom),
                            threads=threads, budget=budget)
    try:
        poly = known_motive(variety)
    except NotLefschetzType:
        poly = None
    expected = poly(geom.p) if poly is not None else None
    return CountReport(
        variety.value, geom.p, int(observed),
        list(poly.coeffs) if poly is not None else None,
        expected,
        None if expected is None else observed == expected,
        time.monotonic() - t0,
    )
