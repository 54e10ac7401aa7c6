"""Taylor coefficients of the regularized logarithmic derivative.

With ``f(x) = s/x - psi'(x)/psi(x) = x * sum_j f_j x^(2j)`` the Riccati
equation ``f' + 2 s f / x - f^2 + V - E = 0`` gives, order by order in x,

    f_0 = E / (1 + 2s)
    (2n + 1 + 2s) f_n = sum_{i+j=n-1} f_i f_j - v_n        (n >= 1)

The recurrence is run either numerically at a fixed complex energy or
symbolically, keeping every ``f_n`` as an exact polynomial in ``E``.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import DomainError, PrecisionExhaustedError
from .polynomial import RationalPolynomial
from .potential import Parity, PolynomialPotential, as_parity, coerce_potential
from .precision import PrecisionPolicy, to_mpc, to_mpfr

__all__ = [
    "SeriesCoefficients",
    "series_coefficients",
    "series_values",
    "series_jets",
    "symbolic_series_coefficients",
    "recurrence_residuals",
]


@dataclass(frozen=True)
class SeriesCoefficients:
    energy: mpc
    values: tuple
    parity: Parity
    working_bits: int

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, j):
        return self.values[j]


def _convolution(f: list, n: int):
    """``sum_{i+j=n-1} f_i f_j`` using the i <-> j symmetry."""
    m = n - 1
    acc = 0
    for i in range((m + 1) // 2):
        acc += f[i] * f[m - i]
    acc = acc + acc
    if m % 2 == 0:
        acc += f[m // 2] * f[m // 2]
    return acc


def series_values(v: list, s: int, energy: mpc, n_max: int) -> list:
    """Raw recurrence in the *current* gmpy2 context.

    ``v`` holds ``v_1..v_K`` already rounded to the working precision.
    This is the hot loop of the solver, so it skips validation.
    """
    f = [energy / (1 + 2 * s)]
    K = len(v)
    for n in range(1, n_max + 1):
        acc = _convolution(f, n)
        if n <= K:
            acc -= v[n - 1]
        f.append(acc / (2 * n + 1 + 2 * s))
    return f


def series_jets(v: list, s: int, energy: mpc, n_max: int) -> list:
    """Like :func:`series_values`, but each ``f_n`` is the truncated Taylor
    jet ``(f_n, f_n', f_n''/2)`` in ``E``."""
    w = 1 + 2 * s
    f = [(energy / w, mpfr(1) / w, mpfr(0))]
    K = len(v)
    for n in range(1, n_max + 1):
        m = n - 1
        a0 = a1 = a2 = 0
        for i in range((m + 1) // 2):
            x0, x1, x2 = f[i]
            y0, y1, y2 = f[m - i]
            a0 += x0 * y0
            a1 += x0 * y1 + x1 * y0
            a2 += x0 * y2 + x1 * y1 + x2 * y0
        a0, a1, a2 = a0 + a0, a1 + a1, a2 + a2
        if m % 2 == 0:
            x0, x1, x2 = f[m // 2]
            a0 += x0 * x0
            a1 += 2 * x0 * x1
            a2 += 2 * x0 * x2 + x1 * x1
        if n <= K:
            a0 -= v[n - 1]
        k = 2 * n + 1 + 2 * s
        f.append((a0 / k, a1 / k, a2 / k))
    return f


def series_coefficients(
    potential: PolynomialPotential,
    parity,
    energy,
    n_max: int,
    policy: PrecisionPolicy | None = None,
) -> SeriesCoefficients:
    """Numeric ``f_0 .. f_{n_max}`` at ``energy``, computed at ``policy.working_bits``.

    ``energy`` may be an int, Fraction, complex, gmpy2 number, or a string
    such as ``"0.9-0.007i"`` (parsed exactly before rounding).
    """
    potential = coerce_potential(potential)
    s = int(as_parity(parity))
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    bits = (policy or PrecisionPolicy.for_digits(30)).working_bits
    E = to_mpc(energy, bits)
    if not (gmpy2.is_finite(E.real) and gmpy2.is_finite(E.imag)):
        raise DomainError("energy must be finite")
    v = [to_mpfr(c, bits) for c in potential.coefficients]
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        f = series_values(v, s, E, n_max)
    last = f[-1]
    if not (gmpy2.is_finite(last.real) and gmpy2.is_finite(last.imag)):
        raise PrecisionExhaustedError("series coefficients overflowed the exponent range")
    return SeriesCoefficients(E, tuple(f), Parity(s), bits)


def symbolic_series_coefficients(
    potential: PolynomialPotential, parity, n_max: int
) -> list[RationalPolynomial]:
    """Exact ``f_j(E)`` for ``j = 0..n_max``; ``f_j`` has degree ``j + 1``."""
    potential = coerce_potential(potential)
    s = int(as_parity(parity))
    if n_max < 0:
        raise DomainError("n_max must be non-negative")
    f = [RationalPolynomial([0, Fraction(1, 1 + 2 * s)])]
    for n in range(1, n_max + 1):
        acc = RationalPolynomial()
        for i in range(n):
            acc = acc + f[i] * f[n - 1 - i]
        acc = acc - potential.coefficient(n)
        f.append(acc * Fraction(1, 2 * n + 1 + 2 * s))
    return f


def recurrence_residuals(potential: PolynomialPotential, coeffs: SeriesCoefficients) -> list[mpfr]:
    """``|(2n+1+2s) f_n - sum f_i f_j + v_n| / max(1, |f_n|)`` for each ``n >= 1``."""
    potential = coerce_potential(potential)
    s = int(coeffs.parity)
    f = list(coeffs.values)
    out = []
    with gmpy2.context(gmpy2.get_context(), precision=coeffs.working_bits):
        for n in range(1, len(f)):
            conv = 0
            for i in range(n):
                conv += f[i] * f[n - 1 - i]
            r = (2 * n + 1 + 2 * s) * f[n] - conv + to_mpfr(potential.coefficient(n), coeffs.working_bits)
            out.append(abs(r) / max(mpfr(1), abs(f[n])))
    return out
