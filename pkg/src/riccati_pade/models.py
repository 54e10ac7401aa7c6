"""Benchmark potentials, their reference energies and the three-well width scaling."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .errors import DegenerateFitError, DomainError
from .polynomial import parse_rational
from .potential import Parity, PolynomialPotential

__all__ = [
    "QESModel",
    "ThreeWellModel",
    "WKBQuantity",
    "Resonance",
    "qes_models",
    "qes_model",
    "quartic",
    "pure_quartic",
    "three_well",
    "three_well_bound_seed",
    "wkb_scaled_width",
    "fit_wkb_prefactor",
    "resonance_width",
    "resonance_seed",
    "QUARTIC_GROUND_STATE",
    "PURE_QUARTIC_GROUND_STATE",
]

# reference digit strings for the benchmark ground states
QUARTIC_GROUND_STATE = "1.3923516415302918556575078766099341846000667112208340889063493"
PURE_QUARTIC_GROUND_STATE = "1.060362090484182899647046016692663545515208728528977933216245"

_DEFAULT_BITS = 256


@dataclass(frozen=True)
class QESModel:
    """A quasi-exactly solvable potential with one known exact level."""

    label: str
    potential: PolynomialPotential
    parity: Parity
    exact_energy: Fraction


def qes_models() -> list[QESModel]:
    """The four sextic/decatic potentials with a rational eigenvalue."""
    table = [
        ("V1", ("1", "-4", "1"), 0, Fraction(-2)),
        ("V2", ("4", "-6", "1"), 1, Fraction(-9)),
        ("V3", ("105/64", "-43/8", "1", "-1", "1"), 0, Fraction(3, 8)),
        ("V4", ("169/64", "-59/8", "1", "-1", "1"), 1, Fraction(9, 8)),
    ]
    return [QESModel(label, PolynomialPotential(coeffs), Parity(s), energy)
            for label, coeffs, s, energy in table]


def qes_model(label: str) -> QESModel:
    """Look up ``"V1"`` .. ``"V4"`` (case-insensitive)."""
    for model in qes_models():
        if model.label.lower() == label.strip().lower():
            return model
    raise DomainError(f"unknown model {label!r}; expected one of V1, V2, V3, V4")


def quartic(lam="1") -> PolynomialPotential:
    """``x^2 + lam x^4``."""
    lam = _exact(lam, "lambda")
    if lam == 0:
        raise DomainError("lambda must be non-zero (use the harmonic potential [1] instead)")
    return PolynomialPotential((Fraction(1), lam))


def pure_quartic() -> PolynomialPotential:
    """``x^4``; the harmonic coefficient is an explicit zero."""
    return PolynomialPotential((Fraction(0), Fraction(1)))


@dataclass(frozen=True)
class ThreeWellModel:
    """``V = x^2 (1 - g^(2k) x^(2k))^2``, three degenerate minima at ``0, +-1/g``."""

    g: Fraction
    k: int
    potential: PolynomialPotential

    @property
    def minima(self) -> tuple[Fraction, Fraction, Fraction]:
        return (-1 / self.g, Fraction(0), 1 / self.g)


def three_well(g, k: int = 1) -> ThreeWellModel:
    """Exact expansion ``v_1 = 1``, ``v_(k+1) = -2 g^(2k)``, ``v_(2k+1) = g^(4k)``.

    ``g`` may be a rational, a decimal string, or a binary float/mpfr (taken
    at its exact binary value).
    """
    g = _exact(g, "g")
    if g <= 0:
        raise DomainError("g must be positive")
    if not isinstance(k, int) or k < 1:
        raise DomainError("k must be a positive integer")
    coeffs = [Fraction(0)] * (2 * k + 1)
    coeffs[0] = Fraction(1)
    coeffs[k] = -2 * g ** (2 * k)
    coeffs[2 * k] = g ** (4 * k)
    return ThreeWellModel(g, k, PolynomialPotential(coeffs))


def three_well_bound_seed(g, k: int = 1) -> Fraction:
    """First-order estimate ``1 - 2 g^(2k) <x^(2k+2)>`` of the lowest even level.

    ``<x^(2m)> = (2m-1)!! / 2^m`` in the harmonic ground state.
    """
    g = _exact(g, "g")
    m = k + 1
    moment = Fraction(math.prod(range(1, 2 * m, 2)), 2 ** m)
    return 1 - 2 * g ** (2 * k) * moment


@dataclass(frozen=True)
class WKBQuantity:
    """``|Im E| g^2 exp(1/(2 g^2))``, which tends to the constant ``A`` if the
    semiclassical estimate ``|Im E| ~ A g^-2 exp(-1/(2 g^2))`` holds."""

    g: Fraction
    scaled_width: mpfr
    prefactor_A: mpfr | None = None


def wkb_scaled_width(g, im_E, bits: int = _DEFAULT_BITS) -> WKBQuantity:
    g = _exact(g, "g")
    if g <= 0:
        raise DomainError("g must be positive")
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        im = abs(_to_real(im_E, bits))
        gg = mpfr(mpq(g.numerator, g.denominator))
        scaled = im * gg * gg * gmpy2.exp(1 / (2 * gg * gg))
    return WKBQuantity(g, scaled)


def fit_wkb_prefactor(points: Iterable[tuple], bits: int = _DEFAULT_BITS) -> mpfr:
    """Least-squares ``A`` from ``(g, |Im E|)`` pairs.

    The residuals are taken on the scaled widths, so every point carries
    equal weight and ``A`` is their mean.
    """
    scaled = [wkb_scaled_width(g, im, bits).scaled_width for g, im in points]
    if not scaled:
        raise DegenerateFitError("need at least one point to fit the prefactor")
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        return gmpy2.fsum(scaled) / len(scaled)


@dataclass(frozen=True)
class Resonance:
    """Position ``Re E`` and width ``Gamma = 2 |Im E|``."""

    position: mpfr
    half_width: mpfr

    @property
    def width(self) -> mpfr:
        return 2 * self.half_width


def resonance_width(estimate) -> Resonance:
    """Accepts an ``EnergyEstimate``, an ``mpc`` or a Python complex."""
    value = getattr(estimate, "value", estimate)
    if isinstance(value, complex):
        value = mpc(value)
    if not isinstance(value, mpc):
        value = mpc(value)
    return Resonance(value.real, abs(value.imag))


def resonance_seed(bound_energy, g, prefactor="0.83", bits: int = _DEFAULT_BITS) -> mpc:
    """Starting point ``E_bs + w (1 - i)`` with ``w = A g^-2 exp(-1/(2 g^2))``.

    In the three-well family the lowest even resonance sits just above the
    bound state, displaced by about its own half-width.
    """
    g = _exact(g, "g")
    if g <= 0:
        raise DomainError("g must be positive")
    A = _exact(prefactor, "prefactor")
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        gg = mpfr(mpq(g.numerator, g.denominator))
        w = mpfr(mpq(A.numerator, A.denominator)) / (gg * gg) * gmpy2.exp(-1 / (2 * gg * gg))
        E = _to_real(getattr(bound_energy, "real", bound_energy), bits)
        return mpc(E + w, -w)


def _exact(value, name: str) -> Fraction:
    if isinstance(value, float):
        return Fraction(value)
    if isinstance(value, mpfr):
        return Fraction(int(mpq(value).numerator), int(mpq(value).denominator))
    try:
        return parse_rational(value)
    except (TypeError, ValueError) as exc:
        raise DomainError(f"{name}: {exc}") from exc


def _to_real(value, bits: int) -> mpfr:
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        if isinstance(value, mpfr):
            return mpfr(value)
        if isinstance(value, str):
            return mpfr(mpq(parse_rational(value)))
        if isinstance(value, Fraction):
            return mpfr(mpq(value.numerator, value.denominator))
        return mpfr(value)
