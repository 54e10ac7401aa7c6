"""Hankel determinants ``H_D^d(E) = det[f_{d+i+j-1}]_{i,j=1..D}``.

Three routes to the same number:

* ``hankel_det_direct`` - Gaussian elimination with partial pivoting;
* ``hankel_table`` / ``hankel_det`` - the condensation recurrence
  ``H_D^d H_{D-2}^{d+2} = H_{D-1}^d H_{D-1}^{d+2} - (H_{D-1}^{d+1})^2``,
  O(D^2) per determinant, with a direct fallback for cells whose divisor
  has cancelled down to rounding noise;
* ``symbolic_hankel_det`` - fraction-free (Bareiss) elimination over Q[E].
"""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import DomainError, InsufficientCoefficientsError
from .polynomial import RationalPolynomial
from .precision import PrecisionPolicy
from .series import SeriesCoefficients

__all__ = [
    "HankelIndex",
    "HankelMethod",
    "HankelValue",
    "HankelTable",
    "hankel_det_direct",
    "hankel_det",
    "hankel_table",
    "condensed_det",
    "condensed_det_jet",
    "direct_det",
    "symbolic_hankel_det",
    "deflate_known_root",
    "FALLBACK_GUARD_BITS",
]

# a divisor is treated as zero below 2^(-bits + FALLBACK_GUARD_BITS) * its own scale
FALLBACK_GUARD_BITS = 20


@dataclass(frozen=True, order=True)
class HankelIndex:
    """Dimension ``D >= 1`` and offset ``d >= 0``."""

    dimension: int
    offset: int = 0

    def __post_init__(self):
        if self.dimension < 1:
            raise DomainError("Hankel dimension must be at least 1")
        if self.offset < 0:
            raise DomainError("Hankel offset must be non-negative")

    @property
    def highest_coefficient(self) -> int:
        """Index of the bottom-right entry, ``f_{d+2D-1}``."""
        return self.offset + 2 * self.dimension - 1

    def entry(self, i: int, j: int) -> int:
        """Series index at 1-based row ``i``, column ``j``."""
        return self.offset + i + j - 1


class HankelMethod(str, Enum):
    DIRECT = "direct"
    CONDENSATION = "condensation"
    SYMBOLIC = "symbolic-evaluated"


@dataclass(frozen=True)
class HankelValue:
    index: HankelIndex
    value: mpc
    method: HankelMethod


@dataclass
class HankelTable:
    """Condensation table ``(D, d) -> HankelValue`` with fallback flags."""

    D_max: int
    d_max: int
    working_bits: int
    entries: dict = field(default_factory=dict)
    fallback: set = field(default_factory=set)

    def __getitem__(self, key: tuple[int, int]) -> mpc:
        return self.entries[key].value

    def value(self, D: int, d: int) -> HankelValue:
        return self.entries[(D, d)]

    def condensation_residual(self, D: int, d: int) -> mpfr:
        """Relative defect of the condensation identity at cell ``(D, d)``."""
        with gmpy2.context(gmpy2.get_context(), precision=self.working_bits):
            a = self[(D, d)] * self[(D - 2, d + 2)]
            b = self[(D - 1, d)] * self[(D - 1, d + 2)]
            c = self[(D - 1, d + 1)] ** 2
            scale = max(abs(a), abs(b), abs(c))
            if scale == 0:
                return mpfr(0)
            return abs(a - b + c) / scale


def _check_length(coeffs, highest: int) -> None:
    if len(coeffs) <= highest:
        raise InsufficientCoefficientsError(
            f"need f_0..f_{highest}, got only {len(coeffs)} coefficients"
        )


def direct_det(f: Sequence, D: int, d: int = 0):
    """Determinant by row elimination with partial pivoting (current context)."""
    a = [[f[d + i + j + 1] for j in range(D)] for i in range(D)]
    det = mpc(1)
    for k in range(D):
        piv = max(range(k, D), key=lambda r: gmpy2.norm(a[r][k]))
        if a[piv][k] == 0:
            return mpc(0)
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        pk = a[k]
        det *= pk[k]
        inv = 1 / pk[k]
        for r in range(k + 1, D):
            row = a[r]
            m = row[k] * inv
            if m == 0:
                continue
            for c in range(k + 1, D):
                row[c] -= m * pk[c]
    return det


def _condense(f: Sequence, D_max: int, d_lo: int, d_hi: int, bits: int, table=None):
    """Fill condensation rows up to ``D_max`` for offsets ``d_lo..d_hi``.

    Row ``k`` is kept for offsets ``d_lo .. d_hi + 2 (D_max - k)`` so that the
    final row covers ``d_lo..d_hi``.  Returns the last row as a dict.
    """
    guard = mpfr(2) ** (2 * (FALLBACK_GUARD_BITS - bits))  # compared with squared norms
    width = lambda k: d_hi + 2 * (D_max - k)
    prev2 = {m: mpc(1) for m in range(d_lo, width(0) + 1)}
    scale2 = {m: mpfr(1) for m in prev2}  # squared cancellation scale of prev2 cells
    if table is not None:
        for m, v in prev2.items():
            table.entries[(0, m)] = _row0(m, v)
    if D_max == 0:
        return prev2
    prev = {m: f[m + 1] for m in range(d_lo, width(1) + 1)}
    scale1 = {m: gmpy2.norm(v) for m, v in prev.items()}
    if table is not None:
        _record(table, 1, prev)
    for k in range(2, D_max + 1):
        cur = {}
        cur_scale = {}
        for m in range(d_lo, width(k) + 1):
            a = prev[m] * prev[m + 2]
            b = prev[m + 1] * prev[m + 1]
            c = prev2[m + 2]
            nc = gmpy2.norm(c)
            if nc <= guard * scale2[m + 2]:
                val = direct_det(f, k, m)
                if table is not None:
                    table.fallback.add((k, m))
                cur[m] = val
                cur_scale[m] = gmpy2.norm(val)
                continue
            cur[m] = (a - b) / c
            cur_scale[m] = max(gmpy2.norm(a), gmpy2.norm(b)) / nc
        if table is not None:
            _record(table, k, cur)
        prev2, scale2 = prev, scale1
        prev, scale1 = cur, cur_scale
    return prev


def _record(table: HankelTable, k: int, row: dict) -> None:
    for m, v in row.items():
        method = HankelMethod.DIRECT if (k, m) in table.fallback else HankelMethod.CONDENSATION
        table.entries[(k, m)] = HankelValue(HankelIndex(k, m), v, method)


def condensed_det(f: Sequence, D: int, d: int, bits: int):
    """``H_D^d`` by condensation in the current gmpy2 context (solver hot path)."""
    if D == 1:
        return f[d + 1]
    return _condense(f, D, d, d, bits)[d]


def _jmul(x, y):
    return (x[0] * y[0], x[0] * y[1] + x[1] * y[0], x[0] * y[2] + x[1] * y[1] + x[2] * y[0])


def _jdiv(x, y):
    c0 = x[0] / y[0]
    c1 = (x[1] - c0 * y[1]) / y[0]
    return (c0, c1, (x[2] - c1 * y[1] - c0 * y[2]) / y[0])


def _jsub(x, y):
    return (x[0] - y[0], x[1] - y[1], x[2] - y[2])


def _direct_det_jet(f: Sequence, D: int, d: int):
    a = [[f[d + i + j + 1] for j in range(D)] for i in range(D)]
    det = (mpc(1), mpc(0), mpc(0))
    for k in range(D):
        piv = max(range(k, D), key=lambda r: gmpy2.norm(a[r][k][0]))
        if a[piv][k][0] == 0:
            # exact zero pivot: fall back to the value only
            return (mpc(0), mpc(0), mpc(0))
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = (-det[0], -det[1], -det[2])
        pk = a[k]
        det = _jmul(det, pk[k])
        for r in range(k + 1, D):
            row = a[r]
            m = _jdiv(row[k], pk[k])
            for c in range(k + 1, D):
                row[c] = _jsub(row[c], _jmul(m, pk[c]))
    return det


def condensed_det_jet(f: Sequence, D: int, d: int, bits: int):
    """``(H, H', H''/2)`` of ``H_D^d`` from series jets (current context).

    Same recurrence and fallback rule as :func:`condensed_det`, carried
    out on truncated Taylor jets in ``E``.
    """
    if D == 1:
        return f[d + 1]
    guard = mpfr(2) ** (2 * (FALLBACK_GUARD_BITS - bits))
    one = (mpc(1), mpc(0), mpc(0))
    width = lambda k: d + 2 * (D - k)
    prev2 = [one] * (width(0) + 1)
    scale2 = [mpfr(1)] * (width(0) + 1)
    prev = [f[m + 1] for m in range(width(1) + 1)]
    scale1 = [gmpy2.norm(v[0]) for v in prev]
    for k in range(2, D + 1):
        cur = []
        cur_scale = []
        for m in range(d, width(k) + 1):
            a = _jmul(prev[m], prev[m + 2])
            b = _jmul(prev[m + 1], prev[m + 1])
            c = prev2[m + 2]
            nc = gmpy2.norm(c[0])
            if nc <= guard * scale2[m + 2]:
                val = _direct_det_jet(f, k, m)
                cur_scale.append(gmpy2.norm(val[0]))
            else:
                val = _jdiv(_jsub(a, b), c)
                cur_scale.append(max(gmpy2.norm(a[0]), gmpy2.norm(b[0])) / nc)
            cur.append(val)
        # rows are indexed from offset d
        cur = [None] * d + cur
        cur_scale = [None] * d + cur_scale
        prev2, scale2 = prev, scale1
        prev, scale1 = cur, cur_scale
    return prev[d]


def hankel_det_direct(
    coeffs: SeriesCoefficients, index: HankelIndex, policy: PrecisionPolicy | None = None
) -> HankelValue:
    _check_length(coeffs, index.highest_coefficient)
    bits = policy.working_bits if policy else coeffs.working_bits
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        value = direct_det(coeffs.values, index.dimension, index.offset)
    return HankelValue(index, value, HankelMethod.DIRECT)


def hankel_det(
    coeffs: SeriesCoefficients, index: HankelIndex, policy: PrecisionPolicy | None = None
) -> HankelValue:
    """Single determinant through the condensation recurrence."""
    _check_length(coeffs, index.highest_coefficient)
    bits = policy.working_bits if policy else coeffs.working_bits
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        value = condensed_det(coeffs.values, index.dimension, index.offset, bits)
    return HankelValue(index, value, HankelMethod.CONDENSATION)


def hankel_table(
    coeffs: SeriesCoefficients, D_max: int, d_max: int, policy: PrecisionPolicy | None = None
) -> HankelTable:
    """All ``H_D^d`` for ``D = 0..D_max`` and ``d = 0..d_max``.

    Needs ``f`` up to index ``d_max + 2 D_max - 1``.  Row ``D`` of the
    returned table also holds the extra offsets computed on the way.
    """
    if D_max < 1 or d_max < 0:
        raise DomainError("need D_max >= 1 and d_max >= 0")
    _check_length(coeffs, d_max + 2 * D_max - 1)
    bits = policy.working_bits if policy else coeffs.working_bits
    table = HankelTable(D_max, d_max, bits)
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        _condense(coeffs.values, D_max, 0, d_max, bits, table)
    return table


def _row0(m: int, value) -> HankelValue:
    # H_0^d = 1 by convention; HankelIndex itself rejects D = 0
    idx = object.__new__(HankelIndex)
    object.__setattr__(idx, "dimension", 0)
    object.__setattr__(idx, "offset", m)
    return HankelValue(idx, value, HankelMethod.CONDENSATION)


def symbolic_hankel_det(poly_coeffs: Sequence[RationalPolynomial], index: HankelIndex) -> RationalPolynomial:
    """Exact ``H_D^d(E)`` by Bareiss elimination on polynomial entries."""
    D, d = index.dimension, index.offset
    _check_length(poly_coeffs, index.highest_coefficient)
    a = [[poly_coeffs[d + i + j + 1] for j in range(D)] for i in range(D)]
    sign = 1
    prev = RationalPolynomial([1])
    for k in range(D - 1):
        if a[k][k].is_zero():
            swap = next((r for r in range(k + 1, D) if not a[r][k].is_zero()), None)
            if swap is None:
                return RationalPolynomial()
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, D):
            for j in range(k + 1, D):
                a[i][j] = (a[k][k] * a[i][j] - a[i][k] * a[k][j]).exact_div(prev)
        prev = a[k][k]
    det = a[D - 1][D - 1]
    return det if sign > 0 else -det


def deflate_known_root(poly: RationalPolynomial, root) -> tuple[RationalPolynomial, bool]:
    """Divide by ``E - root``; the flag is true iff the remainder is exactly zero."""
    if poly.is_zero():
        raise DomainError("cannot deflate the zero polynomial")
    quotient, remainder = poly.synthetic_division(Fraction(root))
    return quotient, remainder == 0
