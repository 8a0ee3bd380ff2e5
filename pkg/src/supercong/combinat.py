"""Pochhammer symbols, binomials, harmonic numbers and epsilon-expansions."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, PoleError
from .exact import RationalLike


def _scaled_factors(a: Fraction, m: int, step: int) -> tuple[int, int]:
    # prod_{j} (a + step*j) for j in range(m), as (integer numerator, denominator)
    u, v = a.numerator, a.denominator
    return math.prod(u + step * j * v for j in range(m)), v**m


def rising(a: RationalLike, m: int) -> Fraction:
    """Pochhammer symbol ``(a)_m``.

    For ``m < 0`` this is ``prod_{k=1}^{|m|} 1/(a - k)``.
    """
    a = Fraction(a)
    if m >= 0:
        num, den = _scaled_factors(a, m, 1)
        return Fraction(num, den)
    num, den = _scaled_factors(a - 1, -m, -1)
    if num == 0:
        raise PoleError(f"({a})_{m} has a vanishing factor")
    return Fraction(den, num)


def inv_rising_or_zero(a: RationalLike, m: int) -> Fraction:
    """``1/(a)_m`` read as ``Gamma(a)/Gamma(a+m)``, zero at a Gamma pole.

    For negative ``m`` the reciprocal is the finite product
    ``prod_{k=1}^{|m|} (a - k)``, which vanishes exactly when ``a + m`` is a
    pole of Gamma, e.g. ``1/(1)_{-1} == 0``.
    """
    a = Fraction(a)
    if m >= 0:
        num, den = _scaled_factors(a, m, 1)
        if num == 0:
            raise PoleError(f"1/({a})_{m} is infinite")
        return Fraction(den, num)
    num, den = _scaled_factors(a - 1, -m, -1)
    return Fraction(num, den)


def factorial(n: int) -> Fraction:
    return rising(1, n)


def binomial(n: int, k: int) -> Fraction:
    if n < 0 or k < 0 or k > n:
        raise DomainError(f"binomial({n}, {k}) requires 0 <= k <= n")
    return factorial(n) / (factorial(k) * factorial(n - k))


def harmonic(n: int, i: int = 1) -> Fraction:
    """Generalized harmonic number ``H_n^{(i)} = sum_{j<=n} j**-i``."""
    if n < 0 or i < 1:
        raise DomainError("harmonic(n, i) needs n >= 0 and i >= 1")
    if n == 0:
        return Fraction(0)
    common = math.lcm(*range(1, n + 1)) ** i
    return Fraction(sum(common // j**i for j in range(1, n + 1)), common)


@dataclass(frozen=True)
class EpsPoly:
    """Polynomial in epsilon truncated after ``degree``; higher terms unknown."""

    coefficients: tuple[Fraction, ...]

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def __getitem__(self, i: int) -> Fraction:
        return self.coefficients[i]

    def __mul__(self, other: "EpsPoly") -> "EpsPoly":
        d = min(self.degree, other.degree)
        out = [Fraction(0)] * (d + 1)
        for i, a in enumerate(self.coefficients[: d + 1]):
            for j, b in enumerate(other.coefficients[: d + 1 - i]):
                out[i + j] += a * b
        return EpsPoly(tuple(out))


def rising_eps_poly(k: int, d: int) -> EpsPoly:
    """Coefficients of ``(1+eps)(2+eps)...(k+eps)`` up to ``eps**d``."""
    coeffs = [Fraction(0)] * (d + 1)
    coeffs[0] = Fraction(1)
    for j in range(1, k + 1):
        # multiply by (j + eps), highest degree first
        for i in range(d, 0, -1):
            coeffs[i] = coeffs[i] * j + coeffs[i - 1]
        coeffs[0] *= j
    return EpsPoly(tuple(coeffs))
