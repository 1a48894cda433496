"""Motives of Lefschetz type as integer polynomials in L.

A motive 1^{c_0} ⊕ L^{c_1} ⊕ ... is stored as its coefficient vector; its
number of F_q-points is the polynomial evaluated at q.
"""

from __future__ import annotations

from dataclasses import dataclass


class NotLefschetzType(ValueError):
    pass


class MotiveError(ValueError):
    pass


@dataclass(frozen=True)
class LefPoly:
    coeffs: tuple

    def __init__(self, coeffs=()):
        c = [int(x) for x in coeffs]
        while c and c[-1] == 0:
            c.pop()
        object.__setattr__(self, "coeffs", tuple(c))

    @classmethod
    def L(cls, power: int = 1) -> "LefPoly":
        return cls([0] * power + [1])

    @classmethod
    def geometric(cls, r: int) -> "LefPoly":
        """1 + L + ... + L^{r-1}, the motive of P^{r-1}."""
        return cls([1] * r)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_effective(self) -> bool:
        return all(c >= 0 for c in self.coeffs)

    def __call__(self, q: int) -> int:
        out = 0
        for c in reversed(self.coeffs):
            out = out * q + c
        return out

    def _coerce(self, other):
        if isinstance(other, LefPoly):
            return other
        if isinstance(other, int):
            return LefPoly([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self.coeffs), len(other.coeffs))
        a = self.coeffs + (0,) * (n - len(self.coeffs))
        b = other.coeffs + (0,) * (n - len(other.coeffs))
        return LefPoly(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return LefPoly(-x for x in self.coeffs)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if not self.coeffs or not other.coeffs:
            return LefPoly()
        out = [0] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return LefPoly(out)

    __rmul__ = __mul__

    def padded(self, length: int) -> list:
        return list(self.coeffs) + [0] * (length - len(self.coeffs))

    def __repr__(self):
        return f"LefPoly({list(self.coeffs)})"

    def pretty(self) -> str:
        parts = []
        for i, c in enumerate(self.coeffs):
            if c == 0:
                continue
            base = "1" if i == 0 else ("L" if i == 1 else f"L^{i}")
            parts.append(base if c == 1 else f"{base}^(+{c})")
        return " + ".join(parts) or "0"


# ---------------------------------------------------------------------------
# tabulated motives


@dataclass(frozen=True)
class MotiveEntry:
    poly: LefPoly
    provenance: str


def _lgr_36():
    return LefPoly([1, 1]) * LefPoly([1, 0, 1]) * LefPoly([1, 0, 0, 1])


_TABLE = {
    "X5": MotiveEntry(LefPoly([1, 1, 4, 4, 1, 1]), "two descriptions of the common blowup; see derive_X5"),
    "LGr3Wbar": MotiveEntry(_lgr_36(), "Lagrangian Grassmannian LGr(3,6): (1+L)(1+L^2)(1+L^3)"),
    "LGr3Wbar_lambda": MotiveEntry(LefPoly([1] * 6), "hyperplane section of LGr(3,6)"),
    "LGr3W_odd": MotiveEntry(
        LefPoly.L(3) * _lgr_36() + LefPoly([1, 1, 2, 2, 2, 2, 1, 1]),
        "odd symplectic Grassmannian: cells with and without the kernel line",
    ),
    "F_flag": MotiveEntry(LefPoly([1, 2, 2, 1]), "F is the flag variety Fl(1,2;A_1)"),
    "S_surface": MotiveEntry(LefPoly([1, 4, 1]), "sextic del Pezzo surface"),
    "Z_scroll": MotiveEntry(LefPoly([1, 5, 5, 1]), "P^1-bundle over the del Pezzo surface S"),
    "GrXi2W": MotiveEntry(LefPoly([1] * 6), "G2-adjoint variety of the general 3-form xi"),
    "GrLambda5W": MotiveEntry(LefPoly([1] * 6), "G2-adjoint variety of lambda, via duality"),
    "Dlm": MotiveEntry(LefPoly([1] * 6), "isomorphic to Gr_xi(2,W) by projection"),
    "LGr2Wbar": MotiveEntry(
        LefPoly([1, 1, 2, 2, 2, 2, 1, 1]), "isotropic Grassmannian LGr(2,6)"
    ),
    "Qdual_lambda": MotiveEntry(LefPoly([1] * 6), "smooth 5-dimensional quadric"),
    "ZeroLocus_gr26": MotiveEntry(LefPoly([1, 2, 3, 2, 1]), "P(A_1) x P(A_2)"),
    "ZeroLocus_gr46": MotiveEntry(LefPoly([1, 2, 3, 2, 1]), "Gr(2,A_1) x Gr(2,A_2)"),
    "Sigma": MotiveEntry(LefPoly([1, 4, 1]), "sextic del Pezzo surface F ∩ H_nu"),
}

NOT_LEFSCHETZ = {"X4": "the fourfold is not claimed to be of Lefschetz type"}


def _key(variety) -> str:
    return getattr(variety, "value", variety)


def motive_entry(variety) -> MotiveEntry:
    key = _key(variety)
    if key in NOT_LEFSCHETZ:
        raise NotLefschetzType(f"{key}: {NOT_LEFSCHETZ[key]}")
    if key not in _TABLE:
        raise NotLefschetzType(f"no tabulated motive for {key}")
    return _TABLE[key]


def known_motive(variety) -> LefPoly:
    return motive_entry(variety).poly


def provenance(variety) -> str:
    return motive_entry(variety).provenance


# ---------------------------------------------------------------------------
# formulas


def proj_bundle(base: LefPoly, r: int) -> LefPoly:
    """Motive of a P^{r-1}-bundle over ``base``."""
    if r < 1:
        raise MotiveError("fiber rank must be at least 1")
    return base * LefPoly.geometric(r)


def blowup(X: LefPoly, center: LefPoly, c: int) -> LefPoly:
    """Motive of the blowup of X along a smooth center of codimension c."""
    if c < 2:
        raise MotiveError("blowup needs codimension at least 2")
    return X + center * (LefPoly.geometric(c) - 1)


@dataclass
class Derivation:
    result: LefPoly
    steps: list

    def trace(self) -> str:
        return "\n".join(f"{name}: {list(p.coeffs)}" for name, p in self.steps)


def derive_X5() -> Derivation:
    """Mot(X5) from the two descriptions of the common blowup.

    The blowup of LGr_λ(3,Wbar) along Z equals the blowup of X5 along F, so
    Mot(X5) = Mot(LGr_λ) + Mot(Z)·L − Mot(F)·L.
    """
    lgr = known_motive("LGr3Wbar_lambda")
    S = known_motive("S_surface")
    Z = proj_bundle(S, 2)
    F = known_motive("F_flag")
    top = blowup(lgr, Z, 2)
    correction = F * LefPoly.L()
    x5 = top - correction
    if not x5.is_effective():
        raise MotiveError(f"subtraction left negative coefficients: {x5}")
    if blowup(x5, F, 2) != top:
        raise MotiveError("the two blowup descriptions disagree")
    steps = [
        ("Mot(S)", S),
        ("Mot(Z) = proj_bundle(S, 2)", Z),
        ("Mot(LGr_lambda)", lgr),
        ("Mot(blowup) = LGr_lambda + Z*L", top),
        ("Mot(F)", F),
        ("Mot(F)*L", correction),
        ("Mot(X5) = blowup - F*L", x5),
    ]
    return Derivation(x5, steps)


# ---------------------------------------------------------------------------
# reconciliation of counts


@dataclass
class Verdict:
    name: str
    passed: bool
    detail: str

    def as_dict(self):
        return {"name": self.name, "pass": self.passed, "detail": self.detail}


@dataclass
class Reconciliation:
    q: int
    verdicts: list

    @property
    def passed(self) -> bool:
        return all(v.passed for v in self.verdicts)

    def failed(self):
        return [v.name for v in self.verdicts if not v.passed]


def _lgr36_count(q):
    return (1 + q) * (1 + q * q) * (1 + q ** 3)


def identities(q: int, counts: dict) -> list:
    """The three cross-identities among observed counts (keys are variety names)."""
    out = []

    def have(*names):
        return all(n in counts for n in names)

    if have("X5", "F_flag", "LGr3Wbar_lambda", "Z_scroll"):
        lhs = counts["X5"] + q * counts["F_flag"]
        rhs = counts["LGr3Wbar_lambda"] + q * counts["Z_scroll"]
        out.append(Verdict("blowup", lhs == rhs, f"#X5 + q#F = {lhs}, #LGr_lambda + q#Z = {rhs}"))
    if have("LGr3Wbar_lambda", "LGr2Wbar", "GrXi2W"):
        lhs = (1 + q + q * q) * counts["LGr3Wbar_lambda"]
        rhs = counts["LGr2Wbar"] + q * counts["GrXi2W"]
        out.append(Verdict("flag", lhs == rhs, f"(1+q+q^2)#LGr_lambda = {lhs}, #LGr2 + q#Gr_xi = {rhs}"))
    if have("LGr3W_odd", "LGr2Wbar"):
        lgr3 = counts.get("LGr3Wbar", _lgr36_count(q))
        lhs = (1 + q + q * q + q ** 3) * lgr3
        rhs = counts["LGr3W_odd"] + q * counts["LGr2Wbar"]
        out.append(Verdict("odd_symplectic", lhs == rhs, f"(1+q+q^2+q^3)#LGr3 = {lhs}, #odd + q#LGr2 = {rhs}"))
    return out


def reconcile(reports) -> Reconciliation:
    """Compare CountReports from one instance and one q with the motive table."""
    reports = list(reports)
    qs = {r.q for r in reports}
    if len(qs) != 1:
        raise MotiveError(f"reports mix several values of q: {sorted(qs)}")
    q = qs.pop()
    verdicts = []
    counts = {}
    for r in reports:
        counts[r.variety] = r.observed
        try:
            poly = known_motive(r.variety)
        except NotLefschetzType:
            continue
        exp = poly(q)
        verdicts.append(Verdict(r.variety, r.observed == exp, f"observed {r.observed}, expected {exp}"))
    verdicts.extend(identities(q, counts))
    return Reconciliation(q, verdicts)
