"""Exact coefficient fields: the rationals and prime fields F_p (p odd)."""

from __future__ import annotations

from fractions import Fraction
from math import isqrt


def _is_prime(n: int) -> bool:
    if n < 2:
        return False
    for d in range(2, isqrt(n) + 1):
        if n % d == 0:
            return False
    return True


class Fp:
    """An element of the prime field F_p."""

    __slots__ = ("v", "p")

    def __init__(self, v: int, p: int):
        self.v = v % p
        self.p = p

    def _coerce(self, other):
        if isinstance(other, Fp):
            if other.p != self.p:
                raise ValueError(f"mixing F_{self.p} and F_{other.p}")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return other.numerator * pow(other.denominator, -1, self.p)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v + o, self.p)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v - o, self.p)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(o - self.v, self.p)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return Fp(self.v * o, self.p)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if o % self.p == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Fp(self.v * pow(o, -1, self.p), self.p)

    def __rtruediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if self.v == 0:
            raise ZeroDivisionError("division by zero in F_p")
        return Fp(o * pow(self.v, -1, self.p), self.p)

    def __neg__(self):
        return Fp(-self.v, self.p)

    def __pos__(self):
        return self

    def __pow__(self, e: int):
        if e < 0:
            return Fp(pow(self.v, -1, self.p), self.p) ** (-e)
        return Fp(pow(self.v, e, self.p), self.p)

    def __eq__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return False
        return (self.v - o) % self.p == 0

    def __hash__(self):
        return hash((self.v, self.p))

    def __bool__(self):
        return self.v != 0

    def __int__(self):
        return self.v

    def __repr__(self):
        return f"{self.v}"


class Field:
    """Either the rationals (``p is None``) or F_p for an odd prime p.

    Calling the field coerces an int (or, for F_p, a Fraction) into it.
    """

    def __init__(self, p: int | None = None):
        if p is not None and (p == 2 or not _is_prime(p)):
            raise ValueError(f"F_{p}: only odd primes are supported")
        self.p = p

    @classmethod
    def rational(cls) -> "Field":
        return cls(None)

    @classmethod
    def prime(cls, p: int) -> "Field":
        return cls(p)

    @property
    def is_finite(self) -> bool:
        return self.p is not None

    @property
    def char(self) -> int:
        return self.p or 0

    def __call__(self, x):
        if self.p is None:
            if isinstance(x, Fp):
                raise TypeError("cannot coerce an F_p element into Q")
            return Fraction(x)
        if isinstance(x, Fp):
            if x.p != self.p:
                raise ValueError(f"element of F_{x.p} given to F_{self.p}")
            return x
        if isinstance(x, Fraction):
            return Fp(x.numerator * pow(x.denominator, -1, self.p), self.p)
        return Fp(int(x), self.p)

    @property
    def zero(self):
        return self(0)

    @property
    def one(self):
        return self(1)

    def __eq__(self, other):
        return isinstance(other, Field) and other.p == self.p

    def __hash__(self):
        return hash(("Field", self.p))

    def __repr__(self):
        return "Q" if self.p is None else f"F_{self.p}"

    def describe(self) -> str:
        return "rational" if self.p is None else f"prime {self.p}"

    def elements(self):
        if self.p is None:
            raise ValueError("Q is infinite")
        return [Fp(i, self.p) for i in range(self.p)]

    def sort_key(self, x):
        """Fixed total order: integer representative for F_p, (num, den) for Q."""
        x = self(x)
        if self.p is None:
            return (x.numerator, x.denominator)
        return (x.v,)

    def to_int(self, x) -> int:
        """Canonical integer representative (F_p only)."""
        return self(x).v

    def is_square(self, x) -> bool:
        return self.sqrt(x) is not None

    def sqrt(self, x):
        """A square root of x in the field, or None. Deterministic choice."""
        x = self(x)
        if self.p is None:
            if x < 0:
                return None
            n, d = x.numerator, x.denominator
            rn, rd = isqrt(n), isqrt(d)
            if rn * rn == n and rd * rd == d:
                return Fraction(rn, rd)
            return None
        if x.v == 0:
            return self.zero
        # p is small in every supported workflow; the scan keeps the root canonical.
        for r in range(1, (self.p + 1) // 2):
            if r * r % self.p == x.v:
                return Fp(r, self.p)
        return None

    def random(self, rng, nonzero: bool = False):
        if self.p is None:
            lo = 1 if nonzero else 0
            v = rng.randint(lo, 9)
            return Fraction(v if rng.random() < 0.5 or v == 0 else -v)
        lo = 1 if nonzero else 0
        return Fp(rng.randrange(lo, self.p), self.p)

    @classmethod
    def parse(cls, text: str) -> "Field":
        """Parse ``rational`` / ``Q`` / ``prime 5`` / ``F_5`` / ``5``."""
        t = text.strip().lower().replace("f_", "").replace("prime", "").strip()
        if t in ("rational", "q", "qq"):
            return cls.rational()
        return cls.prime(int(t))

    def parse_element(self, text):
        if isinstance(text, int):
            return self(text)
        return self(Fraction(str(text)))
