"""End-to-end acceptance checks, one PASS/FAIL line per criterion."""
import csv
import io
import json
import random
import time
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from riccati_pade.cli import main
from riccati_pade.hankel import HankelIndex, condensed_det, direct_det, symbolic_hankel_det
from riccati_pade.models import qes_model, quartic, wkb_scaled_width
from riccati_pade.polynomial import RationalPolynomial
from riccati_pade.potential import PolynomialPotential
from riccati_pade.precision import PrecisionPolicy
from riccati_pade.series import series_values, symbolic_series_coefficients
from riccati_pade.solver import HankelFunction, bound_pair
from riccati_pade.symbolic import verify_qes
from tests.helpers import agreeing_decimals
from tests.reference import (
    IDW_IM_ABS,
    IDW_RE,
    PURE_QUARTIC,
    QUARTIC,
    TW_BOUND,
    TW_EVEN_IM_ABS,
    TW_EVEN_RE,
    TW_ODD_IM_ABS,
    TW_ODD_RE,
)


def cli_json(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, json.loads(out)


def test_criterion_01_qes_exactness(acceptance):
    cases = [
        ("V1", 2, Fraction(1, 4725), [2, 1], None),
        ("V2", 2, Fraction(1, 4465125), [9, 1], [-348624, 78336, -8217, -187, -9, 1]),
        ("V3", 3, Fraction(1, 3189612751764848640000), [-3, 8], None),
        ("V4", 3, Fraction(1, 431028319209742820966400000), [-9, 8], None),
    ]
    ok, notes = True, []
    for label, D, prefactor, linear, cofactor in cases:
        t0 = time.perf_counter()
        rep = verify_qes(qes_model(label), D)
        elapsed = time.perf_counter() - t0
        good = (
            rep.root_exact
            and abs(rep.prefactor) == prefactor
            and rep.primitive.divmod(RationalPolynomial(linear))[1].is_zero()
            and elapsed < 1.0
        )
        if cofactor is not None:
            good = good and rep.quotient.primitive() == RationalPolynomial(cofactor)
        ok &= good
        notes.append(f"{label}:{'ok' if good else 'bad'}({elapsed:.2f}s)")
    acceptance(1, ok, " ".join(notes))


def test_criterion_02_quartic(capsys, acceptance):
    code, data = cli_json(capsys, "solve", "--model", "quartic", "--digits", "25", "--dmax", "30")
    agree = agreeing_decimals(data["value_re"], QUARTIC)
    ok = code == 0 and data["certified_digits"] >= 25 and data["D_final"] <= 30 \
        and agree >= data["certified_digits"]
    acceptance(2, ok, f"certified={data['certified_digits']} agree={agree} D={data['D_final']}")


def test_criterion_03_pure_quartic(capsys, acceptance):
    code, data = cli_json(capsys, "solve", "--model", "pure-quartic", "--digits", "25", "--dmax", "30")
    agree = agreeing_decimals(data["value_re"], PURE_QUARTIC)
    ok = code == 0 and data["certified_digits"] >= 25 and data["D_final"] <= 30 \
        and agree >= data["certified_digits"]
    acceptance(3, ok, f"certified={data['certified_digits']} agree={agree} D={data['D_final']}")


def test_criterion_04_bound_pair(acceptance):
    ref = mpfr(QUARTIC, 256)
    policy = PrecisionPolicy.for_digits(30)
    pairs = [bound_pair(quartic(1), 0, D, policy) for D in (5, 10, 15)]
    lows = [lo.value.real for lo, _ in pairs]
    ups = [up.value.real for _, up in pairs]
    ok = all(lo <= ref <= up for lo, up in zip(lows, ups))
    ok &= lows == sorted(lows) and ups == sorted(ups, reverse=True)
    width = [float(u - l) for l, u in zip(lows, ups)]
    acceptance(4, ok, "bracket widths " + ", ".join(f"{w:.1e}" for w in width))


def test_criterion_05_inverted_double_well(capsys, acceptance):
    code, data = cli_json(capsys, "solve", "--coeffs", "1,-1/10", "--seed", "0.9-0.007i",
                          "--digits", "15", "--dmax", "60")
    re_ok = agreeing_decimals(data["value_re"], IDW_RE)
    im_ok = agreeing_decimals(data["value_im"], IDW_IM_ABS, magnitude=True)
    ok = code == 0 and data["certified_digits"] >= 15 and min(re_ok, im_ok) >= 15 and data["D_final"] <= 60
    acceptance(5, ok, f"certified={data['certified_digits']} re={re_ok} im={im_ok} D={data['D_final']}")


def test_criterion_06_three_well(capsys, acceptance):
    common = ("--model", "three-well", "--g", "0.2", "--dmax", "120")
    _, bound = cli_json(capsys, "solve", *common, "--digits", "15")
    _, even = cli_json(capsys, "solve", *common, "--digits", "12", "--seed", "0.9326-0.00008i")
    _, odd = cli_json(capsys, "solve", *common, "--digits", "12", "--parity", "odd",
                      "--seed", "2.6157-0.0121i")
    b = agreeing_decimals(bound["value_re"], TW_BOUND)
    e = min(agreeing_decimals(even["value_re"], TW_EVEN_RE),
            agreeing_decimals(even["value_im"], TW_EVEN_IM_ABS, magnitude=True))
    o = min(agreeing_decimals(odd["value_re"], TW_ODD_RE),
            agreeing_decimals(odd["value_im"], TW_ODD_IM_ABS, magnitude=True))
    ok = b >= 15 and e >= 12 and o >= 12
    ok &= bound["certified_digits"] >= 15 and min(even["certified_digits"], odd["certified_digits"]) >= 12
    ok &= max(bound["D_final"], even["D_final"], odd["D_final"]) <= 120
    acceptance(6, ok, f"bound={b} (D={bound['D_final']}) even={e} (D={even['D_final']}) "
                      f"odd={o} (D={odd['D_final']})")


def _hadamard(f, D, d):
    out = mpfr(1)
    for i in range(D):
        out *= gmpy2.sqrt(sum(gmpy2.norm(f[d + i + j + 1]) for j in range(D)))
    return out


def test_criterion_07_oracle_equivalence(acceptance):
    rng = random.Random(2024)
    bits = 256
    worst, symbolic_checked, ok = -10 ** 9, 0, True
    for _ in range(50):
        K = rng.randint(1, 4)
        coeffs = [Fraction(rng.randint(-20, 20), rng.randint(1, 10)) for _ in range(K)]
        if coeffs[-1] == 0:
            coeffs[-1] = Fraction(1)
        pot = PolynomialPotential(coeffs)
        s, D, d = rng.randint(0, 1), rng.randint(1, 8), rng.randint(0, 2)
        E_re = Fraction(rng.randint(-300, 300), 100)
        E_im = Fraction(rng.randint(-300, 300), 100)
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            v = [mpfr(mpq(c.numerator, c.denominator)) for c in pot.coefficients]
            E = mpc(mpfr(mpq(E_re.numerator, E_re.denominator)), mpfr(mpq(E_im.numerator, E_im.denominator)))
            f = series_values(v, s, E, d + 2 * D)
            fast = condensed_det(f, D, d, bits)
            slow = direct_det(f, D, d)
            scale = _hadamard(f, D, d)
            tol = mpfr(2) ** (-bits + 24) * scale
            err = abs(fast - slow)
            ok &= err <= tol
            if err:
                worst = max(worst, int(gmpy2.floor(gmpy2.log2(err / scale))))
            if D <= 4:
                exact = symbolic_hankel_det(symbolic_series_coefficients(pot, s, d + 2 * D), HankelIndex(D, d))
                value = exact(E)
                ok &= abs(value - fast) <= tol and abs(value - slow) <= tol
                symbolic_checked += 1
    acceptance(7, ok, f"50 instances, {symbolic_checked} symbolic, worst log2 rel err {worst} "
                      f"(tolerance {-bits + 24})")


def test_criterion_08_harmonic(acceptance):
    bits = 256
    harmonic = PolynomialPotential.parse("1")
    worst, ok = mpfr(0), True
    for s in (0, 1):
        for D in range(2, 7):
            value = abs(HankelFunction(harmonic, s, HankelIndex(D))(1 + 2 * s, bits))
            ok &= value < mpfr(2) ** (-bits + 16)
            worst = max(worst, value)
    acceptance(8, ok, f"max |H| = {float(worst):.1e} (bound 2^{-bits + 16})")


def _slope(capsys, g, state):
    code, data = cli_json(capsys, "slope", "--model", "three-well", "--g", g, "--state", state,
                          "--dmax", "60")
    assert code == 0
    return data["b"]


def test_criterion_09_slopes(capsys, acceptance):
    code, q = cli_json(capsys, "slope", "--model", "quartic", "--dmax", "30")
    quartic_ok = code == 0 and q["b"] < 0 and q["b_stderr"] < 0.1 * abs(q["b"])
    grid = ("0.15", "0.2", "0.3")
    bound = [_slope(capsys, g, "bound") for g in grid]
    res = [_slope(capsys, g, "resonance") for g in grid]
    spread_b = max(bound) - min(bound)
    spread_r = max(res) - min(res)
    ok = quartic_ok and spread_r < spread_b
    acceptance(9, ok, f"quartic b={q['b']:.3f}+-{q['b_stderr']:.3f}; "
                      f"resonance spread {spread_r:.4f} < bound spread {spread_b:.4f}")


def test_criterion_10_scaled_width(capsys, acceptance):
    code = main(["scan-g", "--grid", "0.2", "--digits", "12"])
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    expected = wkb_scaled_width("1/5", mpfr(TW_EVEN_IM_ABS, 256)).scaled_width
    got = mpfr(rows[0]["scaled_width"], 256)
    rel = float(abs(got - expected) / expected)
    ok = code == 0 and len(rows) == 1 and rows[0]["status"] == "ok" and rel < 1e-4
    acceptance(10, ok, f"scaled_width={rows[0]['scaled_width']} expected={float(expected):.12f} rel={rel:.1e}")
