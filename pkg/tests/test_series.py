from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpc, mpfr
from hypothesis import given, settings
from hypothesis import strategies as st

from riccati_pade.errors import DomainError
from riccati_pade.polynomial import RationalPolynomial
from riccati_pade.potential import PolynomialPotential
from riccati_pade.precision import PrecisionPolicy, to_mpc
from riccati_pade.series import (
    recurrence_residuals,
    series_coefficients,
    series_jets,
    symbolic_series_coefficients,
)

V1 = PolynomialPotential.parse("1,-4,1")
HARMONIC = PolynomialPotential.parse("1")
POLICY = PrecisionPolicy(256, 30)


def test_harmonic_ground_state_series_terminates():
    c = series_coefficients(HARMONIC, 0, 1, 3, POLICY)
    assert [complex(x) for x in c.values] == [1, 0, 0, 0]


def test_harmonic_odd_state_series_terminates():
    c = series_coefficients(HARMONIC, 1, 3, 2, POLICY)
    assert [complex(x) for x in c.values] == [1, 0, 0]


def test_qes_level_series_values():
    c = series_coefficients(V1, 0, -2, 3, POLICY)
    # by hand: f1 = (E^2 - 1)/3 = 1, f2 = (2 f0 f1 + 4)/5 = 0, f3 = (f1^2 - 1)/7 = 0
    assert [complex(x) for x in c.values] == [-2, 1, 0, 0]


def test_symbolic_series_examples():
    f = symbolic_series_coefficients(V1, 0, 3)
    assert f[0] == RationalPolynomial([0, 1])
    assert f[1] == RationalPolynomial([Fraction(-1, 3), 0, Fraction(1, 3)])
    assert f[3] == RationalPolynomial([-40, 72, -22, 0, 17]) * Fraction(1, 315)
    g = symbolic_series_coefficients(HARMONIC, 0, 2)
    assert g[2] == RationalPolynomial([0, -2, 0, 2]) * Fraction(1, 15)


def test_symbolic_degrees():
    f = symbolic_series_coefficients(PolynomialPotential.parse("105/64,-43/8,1,-1,1"), 1, 12)
    assert [p.degree for p in f] == [j + 1 for j in range(13)]


def test_parity_shift_identity():
    for s, level in ((0, 1), (1, 3)):
        c = series_coefficients(HARMONIC, s, level, 20, POLICY)
        assert all(x == 0 for x in c.values[1:])


def test_recurrence_residuals_are_at_rounding_level():
    c = series_coefficients(PolynomialPotential.parse("1,-1/10"), 0, "0.9-0.007i", 80, POLICY)
    bound = mpfr(2) ** (-POLICY.working_bits + 16)
    assert all(r < bound for r in recurrence_residuals(PolynomialPotential.parse("1,-1/10"), c))


def test_input_validation():
    with pytest.raises(DomainError):
        series_coefficients(V1, 0, 1, -1, POLICY)
    with pytest.raises(DomainError):
        series_coefficients(V1, 2, 1, 3, POLICY)


coeff = st.fractions(min_value=-8, max_value=8, max_denominator=16)
potentials = st.lists(coeff, min_size=1, max_size=3).filter(lambda c: c[-1] != 0).map(PolynomialPotential)
small = st.fractions(min_value=-4, max_value=4, max_denominator=64)


@settings(max_examples=40, deadline=None)
@given(potentials, st.integers(0, 1), small)
def test_numeric_matches_symbolic_at_rational_energy(pot, s, E):
    n = 12
    sym = symbolic_series_coefficients(pot, s, n)
    num = series_coefficients(pot, s, E, n, POLICY)
    with gmpy2.context(gmpy2.get_context(), precision=POLICY.working_bits):
        for p, x in zip(sym, num.values):
            exact = p.evaluate_exact(E)
            ref = gmpy2.mpfr(gmpy2.mpq(exact.numerator, exact.denominator))
            assert x.imag == 0
            assert abs(x.real - ref) <= mpfr(2) ** (-POLICY.working_bits + 16) * max(mpfr(1), abs(ref))


@settings(max_examples=40, deadline=None)
@given(potentials, st.integers(0, 1), small, small)
def test_conjugate_symmetry(pot, s, re, im):
    E = to_mpc(complex(re, im), 256)
    a = series_coefficients(pot, s, E, 15, POLICY)
    b = series_coefficients(pot, s, to_mpc(complex(re, -im), 256), 15, POLICY)
    with gmpy2.context(gmpy2.get_context(), precision=256):
        for x, y in zip(a.values, b.values):
            assert x == y.conjugate()


def test_jets_match_values_and_derivatives():
    pot = PolynomialPotential.parse("1,-2/25,1/625")
    bits = 256
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        v = [gmpy2.mpfr(gmpy2.mpq(c.numerator, c.denominator)) for c in pot.coefficients]
        E = mpc("0.93-0.001j")
        jets = series_jets(v, 0, E, 30)
    sym = symbolic_series_coefficients(pot, 0, 30)
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        for (f0, f1, f2), p in zip(jets, sym):
            dp = RationalPolynomial([k * c for k, c in enumerate(p.coefficients)][1:])
            ddp = RationalPolynomial([k * c for k, c in enumerate(dp.coefficients)][1:])
            for got, ref in ((f0, p(E)), (f1, dp(E)), (2 * f2, ddp(E))):
                assert abs(got - ref) <= mpfr(2) ** -200 * max(mpfr(1), abs(ref))
