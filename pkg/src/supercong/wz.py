"""Exact bivariate polynomial algebra and verification of the WZ pair.

The certificate is checked as an identity of rational functions in ``n`` and
``k``: both sides are built from sparse polynomials with :class:`Fraction`
coefficients and compared by cross-multiplication, so no polynomial GCD is
ever needed.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Mapping

from .series import wz_F, wz_G

Monomial = tuple[int, int]  # (degree in n, degree in k)


class BiPoly:
    """Sparse polynomial in ``n`` and ``k`` with exact rational coefficients."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Monomial, int | Fraction] | None = None):
        clean: dict[Monomial, Fraction] = {}
        for mono, c in (terms or {}).items():
            c = Fraction(c)
            if c:
                clean[mono] = c
        self._terms = clean

    @classmethod
    def const(cls, c: int | Fraction) -> "BiPoly":
        return cls({(0, 0): c})

    @classmethod
    def var_n(cls) -> "BiPoly":
        return cls({(1, 0): 1})

    @classmethod
    def var_k(cls) -> "BiPoly":
        return cls({(0, 1): 1})

    @property
    def terms(self) -> dict[Monomial, Fraction]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def degree(self) -> int:
        return max((i + j for i, j in self._terms), default=-1)

    @staticmethod
    def _coerce(other) -> "BiPoly":
        return other if isinstance(other, BiPoly) else BiPoly.const(other)

    def __add__(self, other) -> "BiPoly":
        other = self._coerce(other)
        out = dict(self._terms)
        for mono, c in other._terms.items():
            out[mono] = out.get(mono, 0) + c
        return BiPoly(out)

    __radd__ = __add__

    def __neg__(self) -> "BiPoly":
        return BiPoly({m: -c for m, c in self._terms.items()})

    def __sub__(self, other) -> "BiPoly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "BiPoly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "BiPoly":
        other = self._coerce(other)
        out: dict[Monomial, Fraction] = {}
        for (i1, j1), c1 in self._terms.items():
            for (i2, j2), c2 in other._terms.items():
                mono = (i1 + i2, j1 + j2)
                out[mono] = out.get(mono, 0) + c1 * c2
        return BiPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "BiPoly":
        if e < 0:
            raise ValueError("negative power of a polynomial")
        out = BiPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, BiPoly):
            other = BiPoly.const(other) if isinstance(other, (int, Fraction)) else None
            if other is None:
                return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        return hash(frozenset(self._terms.items()))

    def __call__(self, n: int | Fraction, k: int | Fraction) -> Fraction:
        n, k = Fraction(n), Fraction(k)
        return sum((c * n**i * k**j for (i, j), c in self._terms.items()), Fraction(0))

    def __repr__(self) -> str:
        if not self._terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self._terms.items(), reverse=True):
            mono = "*".join(
                s for s in (
                    "" if i == 0 else ("n" if i == 1 else f"n^{i}"),
                    "" if j == 0 else ("k" if j == 1 else f"k^{j}"),
                ) if s
            )
            parts.append(f"({c})*{mono}" if mono else f"({c})")
        return " + ".join(parts)


def bipoly_arith(a: BiPoly, b: BiPoly, op: str) -> BiPoly:
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


@dataclass(frozen=True, eq=False)
class RatFunc:
    """Quotient of two polynomials; not reduced, compared by cross-multiplication."""

    num: BiPoly
    den: BiPoly

    def __post_init__(self):
        if self.den.is_zero():
            raise ZeroDivisionError("zero denominator polynomial")

    @classmethod
    def of(cls, p) -> "RatFunc":
        return p if isinstance(p, RatFunc) else cls(BiPoly._coerce(p), BiPoly.const(1))

    def __add__(self, other) -> "RatFunc":
        o = RatFunc.of(other)
        return RatFunc(self.num * o.den + o.num * self.den, self.den * o.den)

    def __neg__(self) -> "RatFunc":
        return RatFunc(-self.num, self.den)

    def __sub__(self, other) -> "RatFunc":
        return self + (-RatFunc.of(other))

    def __mul__(self, other) -> "RatFunc":
        o = RatFunc.of(other)
        return RatFunc(self.num * o.num, self.den * o.den)

    def __truediv__(self, other) -> "RatFunc":
        o = RatFunc.of(other)
        return RatFunc(self.num * o.den, self.den * o.num)

    def __call__(self, n: int | Fraction, k: int | Fraction) -> Fraction:
        return self.num(n, k) / self.den(n, k)


def ratfunc_eq(a: RatFunc, b: RatFunc) -> bool:
    return a.num * b.den == b.num * a.den


# ------------------------------------------------------------- certificate

_H = Fraction(1, 2)

# Every numeric coefficient of the divided identity, one polynomial per
# displayed factor, keyed by monomial (deg_n, deg_k).
CERTIFICATE_FACTORS: dict[str, dict[Monomial, Fraction | int]] = {
    # first left-hand term
    "a.weight": {(2, 0): 84, (1, 1): -56, (1, 0): 108, (0, 2): 4, (0, 1): -20, (0, 0): 21},
    "a.half_n_minus_k": {(0, 0): _H, (1, 0): 1, (0, 1): -1},
    "a.den_scale": {(2, 0): 64},
    "a.den_2n_k_2": {(1, 0): 2, (0, 1): -1, (0, 0): 2},
    "a.den_2n_k_1": {(1, 0): 2, (0, 1): -1, (0, 0): 1},
    # second left-hand term
    "b.weight": {(2, 0): 84, (1, 1): -56, (0, 2): 4, (1, 0): 52, (0, 1): -12, (0, 0): 5},
    "b.n_plus_k_half": {(1, 0): 1, (0, 1): 1, (0, 0): -_H},
    "b.num_2n_k_2": {(1, 0): 2, (0, 1): -1, (0, 0): 2},
    "b.den_scale": {(2, 0): 64},
    "b.den_2n_k_1": {(1, 0): 2, (0, 1): -1, (0, 0): 1},
    "b.den_2n_k_2": {(1, 0): 2, (0, 1): -1, (0, 0): 2},
    # right-hand side
    "c.half_plus_n": {(0, 0): _H, (1, 0): 1},
    "c.n_plus_k_half": {(1, 0): 1, (0, 1): 1, (0, 0): -_H},
    "c.half_n_minus_k": {(0, 0): _H, (1, 0): 1, (0, 1): -1},
    "c.den_scale": {(2, 0): 16},
    "c.den_2n_k_2": {(1, 0): 2, (0, 1): -1, (0, 0): 2},
    "c.den_2n_k_1": {(1, 0): 2, (0, 1): -1, (0, 0): 1},
    "c.one": {(0, 0): 1},
}


def certificate_sides(
    factors: Mapping[str, Mapping[Monomial, Fraction | int]] | None = None,
) -> tuple[RatFunc, RatFunc]:
    """Both sides of ``[F(n,k-1) - F(n,k)] / G(n,k) = G(n+1,k)/G(n,k) - 1``."""
    f = {name: BiPoly(terms) for name, terms in (factors or CERTIFICATE_FACTORS).items()}
    first = RatFunc(
        f["a.weight"] * f["a.half_n_minus_k"] ** 2,
        f["a.den_scale"] * f["a.den_2n_k_2"] * f["a.den_2n_k_1"],
    )
    second = RatFunc(
        f["b.weight"] * f["b.n_plus_k_half"] * f["b.num_2n_k_2"],
        f["b.den_scale"] * f["b.den_2n_k_1"] * f["b.den_2n_k_2"],
    )
    lhs = -first - second
    rhs = RatFunc(
        f["c.half_plus_n"] * f["c.n_plus_k_half"] * f["c.half_n_minus_k"] ** 2,
        f["c.den_scale"] * f["c.den_2n_k_2"] * f["c.den_2n_k_1"],
    ) - f["c.one"]
    return lhs, rhs


def certificate_check(
    factors: Mapping[str, Mapping[Monomial, Fraction | int]] | None = None,
) -> bool:
    """True iff the divided WZ identity holds as a rational-function identity."""
    lhs, rhs = certificate_sides(factors)
    return ratfunc_eq(lhs, rhs)


def single_mutations(
    factors: Mapping[str, Mapping[Monomial, Fraction | int]] = CERTIFICATE_FACTORS,
    delta: Fraction | int = 1,
) -> Iterable[tuple[str, Monomial, dict]]:
    """Yield ``(factor, monomial, mutated_factors)`` bumping one coefficient each."""
    for name, terms in factors.items():
        for mono in terms:
            mutated = {key: dict(val) for key, val in factors.items()}
            mutated[name][mono] = Fraction(mutated[name][mono]) + delta
            yield name, mono, mutated


# --------------------------------------------------------- pointwise checks

WZFunc = Callable[[int, int], Fraction]


def find_wz_violation(
    n_max: int, k_max: int, F: WZFunc = wz_F, G: WZFunc = wz_G
) -> tuple[int, int] | None:
    """First ``(n, k)`` where ``F(n,k-1) - F(n,k) != G(n+1,k) - G(n,k)``."""
    for n in range(n_max + 1):
        for k in range(1, k_max + 1):
            if F(n, k - 1) - F(n, k) != G(n + 1, k) - G(n, k):
                return n, k
    return None


def wz_grid_check(n_max: int, k_max: int, F: WZFunc = wz_F, G: WZFunc = wz_G) -> bool:
    return find_wz_violation(n_max, k_max, F, G) is None


def telescoping_failures(p: int, F: WZFunc = wz_F, G: WZFunc = wz_G) -> list[str]:
    """Describe every telescoping identity that fails at the odd prime ``p``."""
    if p < 3 or p % 2 == 0:
        raise ValueError("p must be an odd prime")
    h = (p - 1) // 2
    failures = []
    column = [sum((F(n, k) for n in range(h + 1)), Fraction(0)) for k in range(p + 1)]
    for k in range(1, p + 1):
        if column[k - 1] - column[k] != G(h + 1, k):
            failures.append(f"column difference at k={k}")
    rhs = F(h, p) + sum((G(h + 1, k) for k in range(1, p + 1)), Fraction(0))
    if column[0] != rhs:
        failures.append(f"total: {column[0]} != {rhs}")
    return failures


def telescoping_check(p: int, F: WZFunc = wz_F, G: WZFunc = wz_G) -> bool:
    return not telescoping_failures(p, F, G)


def telescoping_sides(p: int) -> tuple[Fraction, Fraction]:
    """``(sum_n F(n,0), F((p-1)/2,p) + sum_k G((p+1)/2,k))``."""
    h = (p - 1) // 2
    lhs = sum((wz_F(n, 0) for n in range(h + 1)), Fraction(0))
    rhs = wz_F(h, p) + sum((wz_G(h + 1, k) for k in range(1, p + 1)), Fraction(0))
    return lhs, rhs
