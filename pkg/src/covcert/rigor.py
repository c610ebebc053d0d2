"""Exact rational and outward-rounded interval arithmetic.

Every numeric claim made by the certification pipeline reduces to arithmetic
on closed intervals with exact rational endpoints.  Field operations on
rationals are exact, so the only widening in the whole system comes from
series truncation in the transcendental enclosures and from the optional
``coarsen`` step that caps denominator growth.

A comparison between two intervals is *certified* when the intervals are
disjoint; an ``OVERLAP`` verdict is never treated as a proof of anything.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import Union

Rational = Fraction

RationalLike = Union[Fraction, int, str]


class DivisionByIntervalContainingZero(ZeroDivisionError):
    """Raised when dividing by an interval that contains zero."""


class Comparison(Enum):
    CERTAINLY_LESS = "CertainlyLess"
    CERTAINLY_GREATER = "CertainlyGreater"
    OVERLAP = "Overlap"


def _to_rational(value: RationalLike) -> Fraction:
    if isinstance(value, Fraction):
        return value
    return Fraction(value)


@dataclass(frozen=True)
class Interval:
    """Closed interval [lo, hi] with exact rational endpoints."""

    lo: Fraction
    hi: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "lo", _to_rational(self.lo))
        object.__setattr__(self, "hi", _to_rational(self.hi))
        if self.lo > self.hi:
            raise ValueError(f"invalid interval: lo={self.lo} > hi={self.hi}")

    # -- constructors ------------------------------------------------------

    @classmethod
    def exact(cls, value: RationalLike) -> "Interval":
        r = _to_rational(value)
        return cls(r, r)

    # -- queries -----------------------------------------------------------

    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, value: RationalLike) -> bool:
        r = _to_rational(value)
        return self.lo <= r <= self.hi

    def contains_zero(self) -> bool:
        return self.lo <= 0 <= self.hi

    def subset_of(self, other: "Interval") -> bool:
        return other.lo <= self.lo and self.hi <= other.hi

    def is_point(self) -> bool:
        return self.lo == self.hi

    # -- arithmetic --------------------------------------------------------

    def __add__(self, other: "Interval") -> "Interval":
        return Interval(self.lo + other.lo, self.hi + other.hi)

    def __sub__(self, other: "Interval") -> "Interval":
        return Interval(self.lo - other.hi, self.hi - other.lo)

    def __neg__(self) -> "Interval":
        return Interval(-self.hi, -self.lo)

    def __mul__(self, other: "Interval") -> "Interval":
        products = (
            self.lo * other.lo,
            self.lo * other.hi,
            self.hi * other.lo,
            self.hi * other.hi,
        )
        return Interval(min(products), max(products))

    def __truediv__(self, other: "Interval") -> "Interval":
        if other.contains_zero():
            raise DivisionByIntervalContainingZero(
                f"division by {other} which contains zero"
            )
        quotients = (
            self.lo / other.lo,
            self.lo / other.hi,
            self.hi / other.lo,
            self.hi / other.hi,
        )
        return Interval(min(quotients), max(quotients))

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(Fraction(0), max(-self.lo, self.hi))

    def pow_int(self, k: int) -> "Interval":
        if k == 0:
            return Interval.exact(1)
        if k < 0:
            if self.contains_zero():
                raise DivisionByIntervalContainingZero(
                    f"negative power of {self} which contains zero"
                )
            return Interval.exact(1) / self.pow_int(-k)
        if k % 2 == 1 or self.lo >= 0:
            return Interval(self.lo**k, self.hi**k)
        if self.hi <= 0:
            return Interval(self.hi**k, self.lo**k)
        # even power of an interval straddling zero
        return Interval(Fraction(0), max(self.lo**k, self.hi**k))

    # -- lattice operations ------------------------------------------------

    def hull(self, other: "Interval") -> "Interval":
        return Interval(min(self.lo, other.lo), max(self.hi, other.hi))

    def intersect(self, other: "Interval") -> "Interval":
        lo = max(self.lo, other.lo)
        hi = min(self.hi, other.hi)
        if lo > hi:
            raise ValueError(f"empty intersection of {self} and {other}")
        return Interval(lo, hi)

    # -- rounding ----------------------------------------------------------

    def coarsen(self, bits: int = 256) -> "Interval":
        """Outward-round both endpoints to denominator 2**bits.

        Soundness: the result always contains ``self``.  Skips endpoints
        whose denominator already fits, so coarsening is idempotent.
        """
        scale = 1 << bits
        lo, hi = self.lo, self.hi
        if lo.denominator > scale:
            lo = Fraction(lo.numerator * scale // lo.denominator, scale)
        if hi.denominator > scale:
            hi = Fraction(-((-hi.numerator) * scale // hi.denominator), scale)
        return Interval(lo, hi)

    def __str__(self) -> str:
        return f"[{self.lo}, {self.hi}]"


def coarsen_relative(iv: Interval, bits: int = 256) -> Interval:
    """Outward-round while preserving roughly ``bits`` of relative precision.

    Plain ``coarsen`` fixes the absolute resolution at 2**-bits, which
    destroys intervals whose magnitude is far below 1.  This variant
    shifts the rounding grid down by the magnitude's exponent.
    """
    magnitude = max(abs(iv.lo), abs(iv.hi))
    if magnitude == 0:
        return iv
    extra = magnitude.denominator.bit_length() - magnitude.numerator.bit_length()
    return iv.coarsen(bits + max(extra + 1, 0))


def iv_exact(r: RationalLike) -> Interval:
    return Interval.exact(r)


def iv_compare(a: Interval, b: Interval) -> Comparison:
    if a.hi < b.lo:
        return Comparison.CERTAINLY_LESS
    if a.lo > b.hi:
        return Comparison.CERTAINLY_GREATER
    return Comparison.OVERLAP


_BINARY_OPS = {
    "add": lambda a, b: a + b,
    "sub": lambda a, b: a - b,
    "mul": lambda a, b: a * b,
    "div": lambda a, b: a / b,
}


def iv_arith(op: str, a: Interval, b=None) -> Interval:
    """Dispatch-style interface over the interval operations.

    ``op`` is one of add/sub/mul/div (b: Interval), pow_int (b: integer
    exponent), neg, abs (no b).
    """
    if op in _BINARY_OPS:
        if not isinstance(b, Interval):
            raise TypeError(f"{op} requires an Interval second operand")
        return _BINARY_OPS[op](a, b)
    if op == "pow_int":
        if not isinstance(b, int):
            raise TypeError("pow_int requires an integer exponent")
        return a.pow_int(b)
    if op == "neg":
        return -a
    if op == "abs":
        return a.abs()
    raise ValueError(f"unknown interval operation {op!r}")
