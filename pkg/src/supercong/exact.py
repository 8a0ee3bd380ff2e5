"""Exact rationals, p-adic valuations and a fixed-precision scaled p-adic residue.

Rationals are plain :class:`fractions.Fraction` values: always in lowest terms
with a positive denominator, so equality is structural.

:class:`PadicScaled` stores a value ``x`` as ``p**e * r`` known modulo
``p**(e + N)``.  Additions track the surviving *absolute* precision, so
cancellation between terms shrinks ``N`` instead of silently producing wrong
digits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Union

from .errors import PrecisionExhausted

Rational = Fraction
RationalLike = Union[int, Fraction]

INF = math.inf


def _vp_int(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def vp(x: RationalLike, p: int) -> int | float:
    """p-adic valuation of a rational; ``math.inf`` for zero."""
    x = Fraction(x)
    if x == 0:
        return INF
    return _vp_int(x.numerator, p) - _vp_int(x.denominator, p)


def congruent(a: RationalLike, b: RationalLike, p: int, k: int) -> tuple[bool, int | float]:
    """Test ``a == b (mod p**k)`` and return ``(verdict, vp(a - b))``."""
    achieved = vp(Fraction(a) - Fraction(b), p)
    return achieved >= k, achieved


@dataclass(frozen=True)
class PadicScaled:
    """``p**e * r`` modulo ``p**(e + N)``; ``is_zero`` marks an exact zero.

    A normalized value has ``r`` coprime to ``p``, or ``r == 0`` meaning the
    value is indistinguishable from zero at absolute precision ``e + N``.
    """

    p: int
    N: int
    e: int = 0
    r: int = 0
    is_zero: bool = False

    @classmethod
    def zero(cls, p: int, N: int = 1) -> "PadicScaled":
        return cls(p, N, 0, 0, True)

    @property
    def modulus(self) -> int:
        return self.p ** self.N

    @property
    def absolute_precision(self) -> int | float:
        return INF if self.is_zero else self.e + self.N

    @property
    def is_unit_form(self) -> bool:
        """True when the leading digit is known (nonzero residue)."""
        return not self.is_zero and self.r % self.p != 0

    def normalize(self) -> "PadicScaled":
        if self.is_zero:
            return self
        p, N, e = self.p, self.N, self.e
        r = self.r % p**N
        if r == 0:
            return PadicScaled(p, N, e, 0)
        while r % p == 0:
            r //= p
            e += 1
            N -= 1
        return PadicScaled(p, N, e, r % p**N)

    def valuation(self) -> int | float:
        """Exact valuation; raises when it lies beyond the tracked precision."""
        x = self.normalize()
        if x.is_zero:
            return INF
        if x.r == 0:
            raise PrecisionExhausted(
                f"value is 0 mod {x.p}^{x.e + x.N}; valuation not determined"
            )
        return x.e

    def valuation_at_least(self, k: int) -> tuple[bool, int | float, bool]:
        """Decide ``valuation >= k``.

        Returns ``(verdict, valuation, exact)`` where ``exact`` is False when
        only a lower bound (the absolute precision) is known.  Raises
        :class:`PrecisionExhausted` if the verdict depends on lost digits.
        """
        x = self.normalize()
        if x.is_zero:
            return True, INF, True
        if x.r != 0:
            return x.e >= k, x.e, True
        bound = x.e + x.N
        if bound >= k:
            return True, bound, False
        raise PrecisionExhausted(
            f"difference is 0 mod {x.p}^{bound} but {x.p}^{k} was required"
        )

    def to_fraction(self) -> Fraction:
        """The representative ``p**e * r`` (exact only up to ``p**(e+N)``)."""
        if self.is_zero:
            return Fraction(0)
        return Fraction(self.r) * Fraction(self.p) ** self.e

    def agrees_with(self, value: RationalLike) -> bool:
        """True if ``value`` lies in the residue class this object denotes."""
        if self.is_zero:
            return Fraction(value) == 0
        return vp(Fraction(value) - self.to_fraction(), self.p) >= self.e + self.N

    def digest(self) -> str:
        if self.is_zero:
            return "0"
        return f"{self.p}^{self.e}*{self.r} mod {self.p}^{self.e + self.N}"

    def __neg__(self) -> "PadicScaled":
        return padic_neg(self)

    def __add__(self, other: "PadicScaled") -> "PadicScaled":
        return padic_add(self, other)

    def __sub__(self, other: "PadicScaled") -> "PadicScaled":
        return padic_add(self, padic_neg(other))

    def __mul__(self, other: "PadicScaled") -> "PadicScaled":
        return padic_mul(self, other)

    def __truediv__(self, other: "PadicScaled") -> "PadicScaled":
        return padic_mul(self, padic_invert(other))

    def __pow__(self, n: int) -> "PadicScaled":
        return padic_pow(self, n)


def padic_encode(x: RationalLike, p: int, N: int) -> PadicScaled:
    """Encode an exact rational with ``N`` p-adic digits of relative precision."""
    if N < 1:
        raise ValueError("precision must be positive")
    x = Fraction(x)
    if x == 0:
        return PadicScaled.zero(p, N)
    num, den = x.numerator, x.denominator
    a, b = _vp_int(num, p), _vp_int(den, p)
    mod = p**N
    unit_num = num // p**a
    unit_den = den // p**b
    r = unit_num * pow(unit_den, -1, mod) % mod
    return PadicScaled(p, N, a - b, r)


def padic_neg(x: PadicScaled) -> PadicScaled:
    if x.is_zero:
        return x
    return PadicScaled(x.p, x.N, x.e, (-x.r) % x.modulus)


def padic_add(x: PadicScaled, y: PadicScaled) -> PadicScaled:
    if x.p != y.p:
        raise ValueError("cannot mix p-adic values for different primes")
    if x.is_zero:
        return y
    if y.is_zero:
        return x
    p = x.p
    m = min(x.e, y.e)
    G = min(x.e + x.N, y.e + y.N) - m
    if G <= 0:
        raise PrecisionExhausted("no surviving digits after alignment")
    mod = p**G
    r = (x.r * p ** (x.e - m) + y.r * p ** (y.e - m)) % mod
    return PadicScaled(p, G, m, r).normalize()


def padic_mul(x: PadicScaled, y: PadicScaled) -> PadicScaled:
    if x.p != y.p:
        raise ValueError("cannot mix p-adic values for different primes")
    if x.is_zero:
        return x
    if y.is_zero:
        return y
    N = min(x.N, y.N)
    return PadicScaled(x.p, N, x.e + y.e, x.r * y.r % x.p**N).normalize()


def padic_invert(x: PadicScaled) -> PadicScaled:
    if x.is_zero:
        raise ZeroDivisionError("division by zero")
    x = x.normalize()
    if x.r == 0:
        raise PrecisionExhausted(
            f"cannot invert a value that is 0 mod {x.p}^{x.e + x.N}"
        )
    return PadicScaled(x.p, x.N, -x.e, pow(x.r, -1, x.modulus))


def padic_pow(x: PadicScaled, n: int) -> PadicScaled:
    if n < 0:
        return padic_pow(padic_invert(x), -n)
    result = padic_encode(1, x.p, x.N)
    base = x
    while n:
        if n & 1:
            result = padic_mul(result, base)
        base = padic_mul(base, base)
        n >>= 1
    return result
