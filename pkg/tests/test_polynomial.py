from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from riccati_pade.polynomial import RationalPolynomial, parse_rational

E = sympy.Symbol("E")
rationals = st.fractions(min_value=-20, max_value=20, max_denominator=50)
polys = st.lists(rationals, max_size=7).map(RationalPolynomial)


def to_sympy(p: RationalPolynomial):
    return sum(sympy.Rational(c.numerator, c.denominator) * E ** k for k, c in enumerate(p.coefficients))


def test_parse_rational_accepts_exact_forms():
    assert parse_rational("105/64") == Fraction(105, 64)
    assert parse_rational("-0.1") == Fraction(-1, 10)
    assert parse_rational(3) == Fraction(3)


def test_parse_rational_rejects_floats_and_junk():
    with pytest.raises(TypeError):
        parse_rational(0.1)
    with pytest.raises(ValueError):
        parse_rational("1/0")
    with pytest.raises(ValueError):
        parse_rational("")


def test_zero_polynomial_has_degree_minus_one():
    z = RationalPolynomial([0, 0])
    assert z.is_zero() and z.degree == -1 and z.coefficients == ()


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_arithmetic_matches_sympy(p, q):
    assert sympy.expand(to_sympy(p * q) - to_sympy(p) * to_sympy(q)) == 0
    assert sympy.expand(to_sympy(p + q) - to_sympy(p) - to_sympy(q)) == 0
    assert sympy.expand(to_sympy(p - q) - to_sympy(p) + to_sympy(q)) == 0


@settings(max_examples=60, deadline=None)
@given(polys, polys)
def test_divmod_reconstructs_dividend(p, q):
    if q.is_zero():
        return
    quo, rem = p.divmod(q)
    assert quo * q + rem == p
    assert rem.degree < q.degree


@settings(max_examples=60, deadline=None)
@given(polys, rationals)
def test_synthetic_division_remainder_is_value(p, r):
    quo, rem = p.synthetic_division(r)
    assert rem == p.evaluate_exact(r)
    assert quo * RationalPolynomial([-r, 1]) + rem == p


def test_synthetic_division_example():
    quo, rem = RationalPolynomial([-1, 0, 1]).synthetic_division(2)
    assert quo == RationalPolynomial([2, 1]) and rem == 3


@settings(max_examples=60, deadline=None)
@given(polys)
def test_content_times_primitive(p):
    if p.is_zero():
        return
    prim = p.primitive()
    assert p.content() * prim == p
    coeffs = prim.integer_coefficients()
    assert prim.leading > 0
    from math import gcd
    from functools import reduce
    assert reduce(gcd, coeffs) == 1


@settings(max_examples=60, deadline=None)
@given(polys)
def test_text_and_string_round_trips(p):
    assert RationalPolynomial.from_text(p.to_text()) == p
    assert RationalPolynomial.from_strings(p.to_strings()) == p


def test_text_rendering():
    p = RationalPolynomial([-1412, 1030, -602, -23, -2, 1])
    assert p.to_text() == "E^5 - 2*E^4 - 23*E^3 - 602*E^2 + 1030*E - 1412"


def test_exact_div_raises_on_remainder():
    with pytest.raises(ArithmeticError):
        RationalPolynomial([1, 0, 1]).exact_div(RationalPolynomial([-1, 1]))
