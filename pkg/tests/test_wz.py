from fractions import Fraction

import pytest
import sympy

from supercong import series
from supercong.wz import (
    CERTIFICATE_FACTORS,
    BiPoly,
    RatFunc,
    bipoly_arith,
    certificate_check,
    certificate_sides,
    find_wz_violation,
    ratfunc_eq,
    single_mutations,
    telescoping_check,
    telescoping_failures,
    telescoping_sides,
    wz_grid_check,
)

n, k = BiPoly.var_n(), BiPoly.var_k()


def to_sympy(poly: BiPoly):
    sn, sk = sympy.symbols("n k")
    return sum(sympy.Rational(c.numerator, c.denominator) * sn**i * sk**j
               for (i, j), c in poly.terms.items())


def test_bipoly_examples():
    a = 3 * n * k - Fraction(1, 2)
    assert bipoly_arith(a, BiPoly(), "add") == a
    assert bipoly_arith(n + k, n - k, "mul") == n * n - k * k
    expected = BiPoly({(2, 0): 4, (1, 1): -4, (1, 0): 6, (0, 2): 1, (0, 1): -3, (0, 0): 2})
    assert (2 * n - k + 1) * (2 * n - k + 2) == expected
    assert bipoly_arith(a, a, "sub").is_zero()
    with pytest.raises(ValueError):
        bipoly_arith(a, a, "div")


def test_bipoly_matches_sympy_expansion():
    p1 = 84 * n * n - 56 * n * k + 4 * k * k + 52 * n - 12 * k + 5
    p2 = (n + Fraction(1, 2)) * (n + k - Fraction(1, 2))
    sn, sk = sympy.symbols("n k")
    assert sympy.expand(to_sympy(p1 * p2) - to_sympy(p1) * to_sympy(p2)) == 0
    assert sympy.expand(to_sympy(p1 ** 3) - to_sympy(p1) ** 3) == 0


def test_bipoly_canonical_form_has_no_zero_coefficients():
    assert (n - n).terms == {}
    assert BiPoly({(1, 0): 0, (0, 0): 2}).terms == {(0, 0): 2}


def test_ratfunc_eq_examples():
    x = RatFunc(n + 1, k)
    assert ratfunc_eq(x, x)
    assert ratfunc_eq(RatFunc(n * n - k * k, n - k), RatFunc.of(n + k))
    assert not ratfunc_eq(RatFunc(n, k), RatFunc(k, n))
    with pytest.raises(ZeroDivisionError):
        RatFunc(n, BiPoly())


def test_certificate_holds():
    assert certificate_check()


def test_certificate_agrees_with_sympy():
    lhs, rhs = certificate_sides()
    expr = (to_sympy(lhs.num) / to_sympy(lhs.den)) - (to_sympy(rhs.num) / to_sympy(rhs.den))
    assert sympy.simplify(expr) == 0


def test_weight_mutation_breaks_certificate():
    factors = {key: dict(val) for key, val in CERTIFICATE_FACTORS.items()}
    factors["b.weight"][(0, 0)] = 6
    assert not certificate_check(factors)


def test_every_single_coefficient_mutation_breaks_certificate():
    mutations = list(single_mutations())
    assert len(mutations) == sum(len(v) for v in CERTIFICATE_FACTORS.values())
    for name, mono, factors in mutations:
        assert not certificate_check(factors), (name, mono)


def test_certificate_independent_of_construction_order():
    lhs, rhs = certificate_sides()
    # rebuild the right side with factors multiplied in reverse order
    f = {key: BiPoly(val) for key, val in CERTIFICATE_FACTORS.items()}
    num = f["c.half_n_minus_k"] * f["c.half_n_minus_k"] * f["c.n_plus_k_half"] * f["c.half_plus_n"]
    den = f["c.den_2n_k_1"] * f["c.den_2n_k_2"] * f["c.den_scale"]
    rhs2 = RatFunc(num - den * f["c.one"], den)
    assert ratfunc_eq(rhs, rhs2)
    assert ratfunc_eq(lhs, rhs2)


def test_certificate_sides_at_2_1():
    lhs, rhs = certificate_sides()
    assert lhs(2, 1) == rhs(2, 1)


def test_certificate_matches_pointwise_wz_relation():
    lhs, rhs = certificate_sides()
    F, G = series.wz_F, series.wz_G
    checked = 0
    for nn in range(1, 12):
        for kk in range(0, 2 * nn):  # 2n - k + 1 >= 2 keeps every denominator alive
            g = G(nn, kk)
            if g == 0:
                continue
            assert lhs(nn, kk) == (F(nn, kk - 1) - F(nn, kk)) / g
            assert rhs(nn, kk) == G(nn + 1, kk) / g - 1
            checked += 1
    assert checked > 50


def test_grid_check():
    assert wz_grid_check(10, 10)
    assert series.wz_F(1, 0) - series.wz_F(1, 1) == series.wz_G(2, 1) - series.wz_G(1, 1)


def test_grid_check_detects_mutated_G():
    def bad_G(nn, kk):
        g = series.wz_G(nn, kk)
        return g * 63 / 64

    assert find_wz_violation(10, 10, G=bad_G) is not None
    assert not wz_grid_check(10, 10, G=bad_G)


@pytest.mark.parametrize("p", [3, 5, 13])
def test_telescoping(p):
    assert telescoping_check(p)
    lhs, rhs = telescoping_sides(p)
    assert lhs == rhs == series.s_k2((p - 1) // 2)


def test_telescoping_at_3_components():
    parts = [Fraction(315, 32), Fraction(-3, 512), Fraction(45, 256), Fraction(-315, 64)]
    assert [series.wz_F(1, 3)] + [series.wz_G(2, kk) for kk in (1, 2, 3)] == parts
    assert sum(parts) == Fraction(2607, 512) == telescoping_sides(3)[0]


def test_telescoping_reports_failure_for_bad_F():
    def bad_F(nn, kk):
        return series.wz_F(nn, kk) + (1 if kk == 2 else 0)

    assert telescoping_failures(5, F=bad_F)
