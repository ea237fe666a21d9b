"""Fixed-point reals over Python integers.

A real ``x`` is stored as the integer ``floor(m * x)`` for a scaling factor
``m`` (the magnifier).  Multiplication, division and square root round
toward minus infinity, so each of them lands strictly less than one unit
``1/m`` below the exact result and never above it.  Addition, subtraction and
multiplication by an integer are exact.

All operands must be nonnegative; the error analysis of the AGM algorithms
is only valid on that domain, so violating it raises :class:`ContractError`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from .errors import ContractError

__all__ = [
    "Magnifier",
    "FixedReal",
    "isqrt",
    "fx_one",
    "fx_two",
    "fx_add",
    "fx_sub",
    "int_scale",
    "fx_halve",
    "fx_mul",
    "fx_div",
    "fx_sqrt",
    "change_magnifier",
]

MIN_MAGNIFIER = 1000


@dataclass(frozen=True)
class Magnifier:
    """Scaling factor ``m``; one ulp is ``1/m``."""

    value: int

    def __post_init__(self):
        if not isinstance(self.value, int) or isinstance(self.value, bool):
            raise ContractError(f"magnifier must be an int, got {type(self.value).__name__}")
        if self.value <= MIN_MAGNIFIER:
            raise ContractError(f"magnifier must exceed {MIN_MAGNIFIER}, got {self.value}")

    @classmethod
    def pow2(cls, bits: int) -> "Magnifier":
        return cls(1 << bits)

    @classmethod
    def power(cls, base: int, exponent: int) -> "Magnifier":
        return cls(base**exponent)

    @property
    def shift(self) -> Optional[int]:
        """Exponent ``s`` when the magnifier is ``2**s``, else None."""
        v = self.value
        if v & (v - 1) == 0:
            return v.bit_length() - 1
        return None

    @property
    def bits(self) -> int:
        return self.value.bit_length()

    def __repr__(self):
        s = self.shift
        if s is not None:
            return f"Magnifier(2**{s})"
        if self.value.bit_length() > 64:
            return f"Magnifier(<{self.value.bit_length()} bits>)"
        return f"Magnifier({self.value})"


@dataclass(frozen=True)
class FixedReal:
    """The real number ``mantissa / magnifier.value``."""

    mantissa: int
    magnifier: Magnifier

    def to_fraction(self) -> Fraction:
        return Fraction(self.mantissa, self.magnifier.value)

    def __float__(self):
        return self.mantissa / self.magnifier.value

    def __add__(self, other: "FixedReal") -> "FixedReal":
        return fx_add(self, other)

    def __sub__(self, other: "FixedReal") -> "FixedReal":
        return fx_sub(self, other)

    def __repr__(self):
        if self.mantissa.bit_length() > 64:
            return f"FixedReal(~{float(self)!r}, {self.magnifier!r})"
        return f"FixedReal({self.mantissa}, {self.magnifier!r})"


def isqrt(n: int) -> int:
    """Largest ``r`` with ``r*r <= n``.

    Recursive Newton: the square root of the top half of ``n`` gives an
    estimate with about half the final bits right, one Newton step doubles
    that, and a final correction enforces the floor property exactly.
    """
    if n < 0:
        raise ContractError("isqrt of a negative number")
    if n < 1 << 52:
        r = int(math.sqrt(n))
    else:
        k = (n.bit_length() - 1) // 4
        r = isqrt(n >> (2 * k)) << k
        r = (r + n // r) >> 1
    sq = r * r
    while sq > n:
        sq -= 2 * r - 1
        r -= 1
    while sq + 2 * r + 1 <= n:
        sq += 2 * r + 1
        r += 1
    return r


def _check_same(m: Magnifier, *xs: FixedReal):
    for x in xs:
        if x.magnifier != m:
            raise ContractError(f"operand carries {x.magnifier!r}, expected {m!r}")


def _check_nonneg(*xs: FixedReal):
    for x in xs:
        if x.mantissa < 0:
            raise ContractError("fixed-point operands must be nonnegative")


def fx_one(m: Magnifier) -> FixedReal:
    return FixedReal(m.value, m)


def fx_two(m: Magnifier) -> FixedReal:
    return FixedReal(2 * m.value, m)


def fx_add(x: FixedReal, y: FixedReal) -> FixedReal:
    _check_same(x.magnifier, y)
    return FixedReal(x.mantissa + y.mantissa, x.magnifier)


def fx_sub(x: FixedReal, y: FixedReal) -> FixedReal:
    _check_same(x.magnifier, y)
    return FixedReal(x.mantissa - y.mantissa, x.magnifier)


def int_scale(k: int, x: FixedReal) -> FixedReal:
    """Exact multiplication by the integer ``k``."""
    return FixedReal(k * x.mantissa, x.magnifier)


def fx_halve(x: FixedReal) -> FixedReal:
    """``x / 2`` rounded down (exact when the mantissa is even)."""
    _check_nonneg(x)
    return FixedReal(x.mantissa >> 1, x.magnifier)


# Raw mantissa kernels.  The generic versions are the reference semantics; the
# shift versions must agree with them bit for bit when m is a power of two.

def _mul_generic(mv: int, a: int, b: int) -> int:
    return a * b // mv


def _div_generic(mv: int, a: int, b: int) -> int:
    return a * mv // b


def _sqrt_generic(mv: int, a: int) -> int:
    return isqrt(a * mv)


def _mul_raw(m: Magnifier, a: int, b: int) -> int:
    s = m.shift
    if s is not None:
        return (a * b) >> s
    return a * b // m.value


def _div_raw(m: Magnifier, a: int, b: int) -> int:
    s = m.shift
    if s is not None:
        return (a << s) // b
    return a * m.value // b


def _sqrt_raw(m: Magnifier, a: int) -> int:
    s = m.shift
    if s is not None:
        return isqrt(a << s)
    return isqrt(a * m.value)


def fx_mul(m: Magnifier, x: FixedReal, y: FixedReal) -> FixedReal:
    """``floor(x*y*m)/m``: at most one ulp below the exact product, never above."""
    _check_same(m, x, y)
    _check_nonneg(x, y)
    return FixedReal(_mul_raw(m, x.mantissa, y.mantissa), m)


def fx_div(m: Magnifier, x: FixedReal, y: FixedReal) -> FixedReal:
    _check_same(m, x, y)
    _check_nonneg(x)
    if y.mantissa == 0:
        raise ZeroDivisionError("fixed-point division by zero")
    if y.mantissa < 0:
        raise ContractError("fixed-point divisor must be positive")
    return FixedReal(_div_raw(m, x.mantissa, y.mantissa), m)


def fx_sqrt(m: Magnifier, x: FixedReal) -> FixedReal:
    _check_same(m, x)
    _check_nonneg(x)
    return FixedReal(_sqrt_raw(m, x.mantissa), m)


def change_magnifier(m1: Magnifier, m2: Magnifier, x: FixedReal) -> FixedReal:
    """Re-express ``x`` (over ``m1``) over the smaller magnifier ``m2``.

    Costs at most one ulp of ``m2``, always downward.
    """
    _check_same(m1, x)
    _check_nonneg(x)
    if not m2.value < m1.value:
        raise ContractError("change_magnifier only rescales to a smaller magnifier")
    s = m1.shift
    if s is not None:
        return FixedReal((x.mantissa * m2.value) >> s, m2)
    return FixedReal(x.mantissa * m2.value // m1.value, m2)
