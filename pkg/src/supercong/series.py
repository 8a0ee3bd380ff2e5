"""Exact and p-adic evaluation of the named sums and terms.

Truncated sums are driven by term-ratio recurrences, so a sum of ``N`` terms
costs ``O(N)`` arithmetic operations.
"""

from __future__ import annotations

from fractions import Fraction

from .combinat import factorial, inv_rising_or_zero, rising
from .errors import DomainError, PoleError
from .exact import PadicScaled, padic_encode

HALF = Fraction(1, 2)


def _sign(k: int) -> int:
    return -1 if k % 2 else 1


# ------------------------------------------------ degree-3 series for 16/pi


def k2_term(n: int) -> Fraction:
    """``(1/2)_n**3 / n!**3 * (42n + 5) / 64**n``."""
    return rising(HALF, n) ** 3 / factorial(n) ** 3 * (42 * n + 5) / Fraction(64) ** n


def _k2_ratio(n: int) -> tuple[int, int]:
    # t_{n+1} / t_n
    return (2 * n + 1) ** 3 * (42 * n + 47), 512 * (n + 1) ** 3 * (42 * n + 5)


def s_k2(N: int) -> Fraction:
    """Truncated sum ``sum_{n=0}^{N} k2_term(n)``."""
    term = Fraction(5)
    total = term
    for n in range(N):
        num, den = _k2_ratio(n)
        term = term * num / den
        total += term
    return total


def _padic_sum(first: int, ratio, N: int, p: int, prec: int) -> PadicScaled:
    term = padic_encode(first, p, prec)
    total = term
    for n in range(N):
        num, den = ratio(n)
        term = term * padic_encode(num, p, prec) / padic_encode(den, p, prec)
        total = total + term
    return total


def s_k2_padic(N: int, p: int, prec: int) -> PadicScaled:
    """``s_k2(N)`` computed entirely in :class:`PadicScaled` arithmetic."""
    if p % 2 == 0:
        raise DomainError("p must be odd")
    return _padic_sum(5, _k2_ratio, N, p, prec)


# ------------------------------------------------------- degree-7 (1/pi^3) series


def _g7_weight(n: int) -> int:
    return 168 * n**3 + 76 * n**2 + 14 * n + 1


def g7_term(n: int) -> Fraction:
    """``(1/2)_n**7 / n!**7 * (168n^3 + 76n^2 + 14n + 1) / 2**(6n)``."""
    return rising(HALF, n) ** 7 / factorial(n) ** 7 * _g7_weight(n) / Fraction(64) ** n


def _g7_ratio(n: int) -> tuple[int, int]:
    return (2 * n + 1) ** 7 * _g7_weight(n + 1), 8192 * (n + 1) ** 7 * _g7_weight(n)


def s_g7(N: int) -> Fraction:
    term = Fraction(1)
    total = term
    for n in range(N):
        num, den = _g7_ratio(n)
        term = term * num / den
        total += term
    return total


def s_g7_padic(N: int, p: int, prec: int) -> PadicScaled:
    if p % 2 == 0:
        raise DomainError("p must be odd")
    return _padic_sum(1, _g7_ratio, N, p, prec)


# ------------------------------------------------------------------- WZ pair


def f_weight(n: int, k: int) -> int:
    return 84 * n * n - 56 * n * k + 4 * k * k + 52 * n - 12 * k + 5


def wz_F(n: int, k: int) -> Fraction:
    """WZ pair component ``F(n, k)``; zero whenever ``2n - k + 1 < 0``."""
    tail = inv_rising_or_zero(1, 2 * n - k + 1)
    if tail == 0:
        return Fraction(0)
    value = (
        f_weight(n, k)
        * _sign(k)
        * rising(HALF, n)
        * rising(HALF, n + k)
        * rising(HALF, n - k) ** 2
        / (Fraction(2) ** (4 * n) * factorial(n) ** 2)
    )
    return value * tail


def wz_G(n: int, k: int) -> Fraction:
    """WZ pair component ``G(n, k)``; vanishes at ``n = 0`` and when ``2n - k < 0``."""
    if n == 0:
        return Fraction(0)
    tail = inv_rising_or_zero(1, 2 * n - k)
    if tail == 0:
        return Fraction(0)
    value = (
        64 * n * n
        * _sign(k)
        * rising(HALF, n)
        * rising(HALF, n + k - 1)
        * rising(HALF, n - k) ** 2
        / (Fraction(2) ** (4 * n) * factorial(n) ** 2)
    )
    return value * tail


# ------------------------------------------------------------ lemma sums


def _require_odd_prime_above(p: int, bound: int) -> None:
    if p <= bound or p % 2 == 0:
        raise DomainError(f"requires an odd prime p > {bound}, got {p}")


def key1_sides(p: int) -> tuple[Fraction, Fraction]:
    """``prod_{k=1}^{p-1} (p+2k)`` and ``(-1)^((p-1)/2) prod_{k<=(p-1)/2} (2k-1)^2``."""
    _require_odd_prime_above(p, 3)
    lhs = 1
    for k in range(1, p):
        lhs *= p + 2 * k
    rhs = 1
    for k in range(1, (p - 1) // 2 + 1):
        rhs *= (2 * k - 1) ** 2
    return Fraction(lhs), Fraction(_sign((p - 1) // 2) * rhs)


def key2_sum(p: int) -> Fraction:
    """``sum_{k=2}^{p} (-1)^k (1/2)_{(p-1)/2+k} (1/2)_{(p+1)/2-k}^2 / (1)_{p+1-k}``."""
    _require_odd_prime_above(p, 2)
    h = (p - 1) // 2
    total = Fraction(0)
    for k in range(2, p + 1):
        total += (
            _sign(k)
            * rising(HALF, h + k)
            * rising(HALF, h + 1 - k) ** 2
            / factorial(p + 1 - k)
        )
    return total


def easier_sum(p: int) -> Fraction:
    """``sum_{n=1}^{p-1} (1-p/2)_{n-1}^2 / (n! (1-3p/2)_{n-1})`` for ``p > 3``."""
    _require_odd_prime_above(p, 3)
    a = 1 - Fraction(p, 2)
    b = 1 - Fraction(3 * p, 2)
    term = Fraction(1)  # n = 1
    total = term
    for n in range(1, p - 1):
        # n -> n + 1 multiplies by (a+n-1)^2 / ((n+1) (b+n-1))
        step = b + n - 1
        if step == 0:
            raise PoleError(f"(1-3p/2)_{n} vanishes at p={p}")
        term = term * (a + n - 1) ** 2 / ((n + 1) * step)
        total += term
    return total


# ------------------------------------------------------- reference constants


def _arctan_inv_bounds(x: int, tol: Fraction) -> tuple[Fraction, Fraction]:
    # alternating series sum_j (-1)^j / ((2j+1) x^(2j+1)); consecutive partial
    # sums bracket the limit once terms decrease
    lo = hi = Fraction(0)
    partial = Fraction(0)
    power = Fraction(1, x)
    x2 = x * x
    j = 0
    while True:
        term = power / (2 * j + 1)
        partial = partial + term if j % 2 == 0 else partial - term
        if j % 2 == 0:
            hi = partial
        else:
            lo = partial
        if j >= 1 and hi - lo < tol:
            return lo, hi
        power /= x2
        j += 1


def pi_bounds(digits: int) -> tuple[Fraction, Fraction]:
    """Rational ``lo < pi < hi`` with ``hi - lo < 10**-digits`` (Machin's formula)."""
    tol = Fraction(1, 10 ** (digits + 2) * 40)
    a_lo, a_hi = _arctan_inv_bounds(5, tol)
    b_lo, b_hi = _arctan_inv_bounds(239, tol)
    return 16 * a_lo - 4 * b_hi, 16 * a_hi - 4 * b_lo


def reference_16_over_pi(digits: int) -> tuple[Fraction, Fraction]:
    """Rigorous rational enclosure of ``16/pi`` of width below ``10**-digits``."""
    if not 1 <= digits <= 1000:
        raise DomainError("digits must lie in [1, 1000]")
    lo, hi = pi_bounds(digits + 1)
    return 16 / hi, 16 / lo


def reference_32_over_pi_cubed(digits: int) -> tuple[Fraction, Fraction]:
    if not 1 <= digits <= 1000:
        raise DomainError("digits must lie in [1, 1000]")
    lo, hi = pi_bounds(digits + 2)
    return 32 / hi**3, 32 / lo**3
