from fractions import Fraction

import gmpy2
import pytest
from gmpy2 import mpc, mpfr

from riccati_pade.errors import DegenerateFitError, DomainError
from riccati_pade.models import (
    fit_wkb_prefactor,
    pure_quartic,
    qes_model,
    qes_models,
    quartic,
    resonance_seed,
    resonance_width,
    three_well,
    three_well_bound_seed,
    wkb_scaled_width,
)
from riccati_pade.potential import Parity
from tests.reference import IDW_IM_ABS, IDW_RE, TW_BOUND, TW_EVEN_IM_ABS, TW_EVEN_RE


def test_three_well_expansion():
    tw = three_well("1/5")
    assert list(tw.potential.coefficients) == [1, Fraction(-2, 25), Fraction(1, 625)]
    assert tw.minima == (Fraction(-5), 0, Fraction(5))


def test_three_well_higher_k():
    tw = three_well(Fraction(1, 2), k=2)
    assert list(tw.potential.coefficients) == [1, 0, Fraction(-1, 8), 0, Fraction(1, 256)]


def test_three_well_vanishes_at_minima_and_is_nonnegative():
    tw = three_well("3/10")
    for x in tw.minima:
        assert tw.potential(x) == 0
    for i in range(-80, 81):
        assert tw.potential(Fraction(i, 10)) >= 0


def test_three_well_float_is_exact_binary():
    assert three_well(0.25).g == Fraction(1, 4)


@pytest.mark.parametrize("g", [0, "-1/5"])
def test_three_well_rejects_nonpositive_g(g):
    with pytest.raises(DomainError):
        three_well(g)


def test_three_well_rejects_bad_k():
    with pytest.raises(DomainError):
        three_well("1/5", k=0)


def test_bound_seed_is_close():
    seed = three_well_bound_seed("1/5")
    assert seed == 1 - 2 * Fraction(1, 25) * Fraction(3, 4)
    assert abs(float(seed) - float(TW_BOUND)) < 0.01


def test_scaled_width_examples():
    assert wkb_scaled_width("1/5", 0).scaled_width == 0
    q = wkb_scaled_width("1/5", mpfr(TW_EVEN_IM_ABS, 256))
    assert float(q.scaled_width) == pytest.approx(0.85307165147697, rel=1e-4)
    # the sign of Im E does not matter
    with gmpy2.context(gmpy2.get_context(), precision=256):
        negative = -mpfr(TW_EVEN_IM_ABS)
    assert wkb_scaled_width("1/5", negative).scaled_width == q.scaled_width
    with pytest.raises(DomainError):
        wkb_scaled_width(0, 1)


def test_scaled_width_large_g_tends_to_g_squared_times_width():
    q = wkb_scaled_width(1000, "1e-6")
    assert float(q.scaled_width) == pytest.approx(1.0, rel=1e-5)


def test_fit_prefactor_is_mean():
    pts = [("1/5", mpfr(TW_EVEN_IM_ABS, 256))] * 3
    A = fit_wkb_prefactor(pts)
    assert float(A) == pytest.approx(0.85307165147697, rel=1e-4)
    with pytest.raises(DegenerateFitError):
        fit_wkb_prefactor([])


def test_resonance_width():
    with gmpy2.context(gmpy2.get_context(), precision=256):
        E = mpc(mpfr(IDW_RE), -mpfr(IDW_IM_ABS))
    r = resonance_width(E)
    assert float(r.width) == pytest.approx(0.0133865617516, rel=1e-10)
    assert float(r.position) == pytest.approx(float(IDW_RE), rel=1e-15)
    assert resonance_width(complex(0.5, 0.1)).half_width == resonance_width(complex(0.5, -0.1)).half_width


def test_resonance_seed_lies_near_resonance():
    seed = resonance_seed(mpfr(TW_BOUND, 256), "1/5")
    assert abs(float(seed.real) - float(TW_EVEN_RE)) < 1e-3
    assert seed.imag < 0


def test_qes_table():
    labels = [m.label for m in qes_models()]
    assert labels == ["V1", "V2", "V3", "V4"]
    assert qes_model("v2").parity == Parity.ODD
    assert qes_model("V3").exact_energy == Fraction(3, 8)
    with pytest.raises(DomainError):
        qes_model("V5")


def test_quartic_models():
    assert list(quartic(1).coefficients) == [1, 1]
    assert list(pure_quartic().coefficients) == [0, 1]
    with pytest.raises(DomainError):
        quartic(0)
