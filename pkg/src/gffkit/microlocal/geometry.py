"""Flat 1+1 Minkowski points and covectors with exact rational coordinates.

Signature is (+, -).  The future causal covector cone is the polyhedral
cone spanned by the null covectors ``l+ = (1, 1)`` and ``l- = (1, -1)``;
writing ``k = a l+ + b l-`` gives the null coordinates
``a = (k0 + k1) / 2`` and ``b = (k0 - k1) / 2``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


def as_rational(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, Rational)):
        return Fraction(v)
    if isinstance(v, dict):
        return Fraction(int(v["num"]), int(v["den"]))
    if isinstance(v, str):
        return Fraction(v)
    raise TypeError(f"expected an exact rational, got {type(v).__name__} {v!r}")


def rational_to_json(q: Fraction) -> dict:
    q = as_rational(q)
    return {"num": q.numerator, "den": q.denominator}


@dataclass(frozen=True)
class Point1p1:
    t: Fraction
    x: Fraction

    def __post_init__(self):
        object.__setattr__(self, "t", as_rational(self.t))
        object.__setattr__(self, "x", as_rational(self.x))

    def to_json(self):
        return {"t": rational_to_json(self.t), "x": rational_to_json(self.x)}

    @classmethod
    def from_json(cls, d):
        return cls(as_rational(d["t"]), as_rational(d["x"]))


@dataclass(frozen=True)
class Covector1p1:
    k0: Fraction
    k1: Fraction

    def __post_init__(self):
        object.__setattr__(self, "k0", as_rational(self.k0))
        object.__setattr__(self, "k1", as_rational(self.k1))

    @classmethod
    def from_null(cls, a, b) -> "Covector1p1":
        a, b = as_rational(a), as_rational(b)
        return cls(a + b, a - b)

    @property
    def null(self) -> tuple[Fraction, Fraction]:
        return (self.k0 + self.k1) / 2, (self.k0 - self.k1) / 2

    def is_zero(self) -> bool:
        return self.k0 == 0 and self.k1 == 0

    def is_future(self) -> bool:
        """In the closed future cone (zero included)."""
        a, b = self.null
        return a >= 0 and b >= 0

    def is_past(self) -> bool:
        a, b = self.null
        return a <= 0 and b <= 0

    def __neg__(self):
        return Covector1p1(-self.k0, -self.k1)

    def __add__(self, other):
        return Covector1p1(self.k0 + other.k0, self.k1 + other.k1)

    def __sub__(self, other):
        return Covector1p1(self.k0 - other.k0, self.k1 - other.k1)

    def scale(self, c) -> "Covector1p1":
        c = as_rational(c)
        return Covector1p1(c * self.k0, c * self.k1)

    def to_json(self):
        return {"k0": rational_to_json(self.k0), "k1": rational_to_json(self.k1)}

    @classmethod
    def from_json(cls, d):
        return cls(as_rational(d["k0"]), as_rational(d["k1"]))


ZERO = Covector1p1(0, 0)


def causally_related(p: Point1p1, q: Point1p1) -> bool:
    """``|dt| >= |dx|``; a point is related to itself."""
    return abs(p.t - q.t) >= abs(p.x - q.x)
