"""Working-precision policy and conversions into multiprecision complex numbers."""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, replace
from fractions import Fraction
from numbers import Complex, Rational

import gmpy2
from gmpy2 import mpc, mpfr, mpq

from .errors import DomainError, PrecisionExhaustedError

__all__ = [
    "BITS_PER_DIGIT",
    "PrecisionPolicy",
    "bits_for_digits",
    "parse_complex",
    "to_mpc",
    "to_mpfr",
    "format_real",
]

BITS_PER_DIGIT = 3.33  # log2(10) rounded up


def bits_for_digits(digits: int) -> int:
    """Smallest precision the policy accepts for ``digits`` target digits."""
    return math.ceil(BITS_PER_DIGIT * (digits + 10))


@dataclass(frozen=True)
class PrecisionPolicy:
    """How many bits to work with, and how far we may escalate.

    ``working_bits`` is the current mantissa size.  Each escalation
    multiplies it by ``escalation_factor``; going past ``max_bits`` raises
    :class:`PrecisionExhaustedError`.
    """

    working_bits: int
    target_digits: int
    max_bits: int = 1 << 15
    escalation_factor: Fraction = Fraction(2)

    def __post_init__(self):
        object.__setattr__(self, "escalation_factor", Fraction(self.escalation_factor))
        if self.target_digits < 0:
            raise DomainError("target_digits must be non-negative")
        if self.working_bits <= 0 or self.max_bits <= 0:
            raise DomainError("precision must be positive")
        if self.escalation_factor <= 1:
            raise DomainError("escalation_factor must exceed 1")
        if self.working_bits > self.max_bits:
            raise DomainError(
                f"working_bits={self.working_bits} exceeds max_bits={self.max_bits}"
            )
        if self.working_bits < bits_for_digits(self.target_digits):
            raise DomainError(
                f"working_bits={self.working_bits} is below the floor "
                f"{bits_for_digits(self.target_digits)} for {self.target_digits} digits"
            )

    @classmethod
    def for_digits(
        cls,
        target_digits: int,
        *,
        max_bits: int = 1 << 15,
        escalation_factor: Fraction | int = 2,
        working_bits: int | None = None,
    ) -> "PrecisionPolicy":
        """Policy starting at the precision floor (rounded up to 64 bits)."""
        floor = bits_for_digits(target_digits)
        bits = working_bits if working_bits is not None else max(128, -(-floor // 64) * 64)
        return cls(bits, target_digits, max_bits, Fraction(escalation_factor))

    def escalated(self) -> "PrecisionPolicy":
        new_bits = math.ceil(self.working_bits * self.escalation_factor)
        if new_bits > self.max_bits:
            raise PrecisionExhaustedError(
                f"escalating {self.working_bits} bits would exceed max_bits={self.max_bits}"
            )
        return replace(self, working_bits=new_bits)

    def with_bits(self, bits: int) -> "PrecisionPolicy":
        return replace(self, working_bits=max(bits, self.working_bits))

    def context(self):
        """A gmpy2 local context at the working precision."""
        return gmpy2.context(gmpy2.get_context(), precision=self.working_bits)


_NUM = r"(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?(?:/\d+)?"
_COMPLEX_RE = re.compile(
    rf"^(?P<re>[+-]?{_NUM})?(?:(?P<isign>[+-])(?P<im>{_NUM})?[ij])?$"
    rf"|^(?P<pure_sign>[+-]?)(?P<pure_im>{_NUM})?[ij]$"
)


def parse_complex(text: str) -> tuple[Fraction, Fraction]:
    """Parse ``a``, ``a+bi``, ``a-bi`` or ``bi`` into exact real/imaginary parts.

    >>> parse_complex("0.9-0.007i")
    (Fraction(9, 10), Fraction(-7, 1000))
    """
    s = text.strip().replace(" ", "")
    m = _COMPLEX_RE.match(s)
    if not s or not m:
        raise ValueError(f"not a complex literal: {text!r}")
    if m.group("pure_im") is not None or (m.group("re") is None and s[-1] in "ij"):
        sign = m.group("pure_sign") or m.group("isign") or ""
        mag = m.group("pure_im") or m.group("im") or "1"
        im = Fraction(mag)
        return Fraction(0), -im if sign == "-" else im
    re_part = Fraction(m.group("re"))
    if m.group("isign") is None:
        return re_part, Fraction(0)
    im = Fraction(m.group("im") or "1")
    return re_part, -im if m.group("isign") == "-" else im


def to_mpfr(value, bits: int) -> mpfr:
    """Round ``value`` (int, Fraction, str, float, mpfr) to ``bits`` bits."""
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        if isinstance(value, Rational):
            return mpfr(mpq(value.numerator, value.denominator))
        if isinstance(value, str):
            return mpfr(mpq(Fraction(value)))
        return mpfr(value)


def to_mpc(value, bits: int) -> mpc:
    """Round a real or complex value to an ``mpc`` with ``bits`` bits per part.

    Strings go through :func:`parse_complex`, so ``"0.1"`` is the rounded
    decimal and not the nearest double.
    """
    if isinstance(value, str):
        re_part, im_part = parse_complex(value)
        return to_mpc_parts(re_part, im_part, bits)
    if isinstance(value, Rational):
        return to_mpc_parts(Fraction(value), Fraction(0), bits)
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        if isinstance(value, (mpc, mpfr)):
            return mpc(value)
        if isinstance(value, Complex):
            return mpc(complex(value))
    raise TypeError(f"cannot convert {type(value).__name__} to a complex number")


def to_mpc_parts(re_part, im_part, bits: int) -> mpc:
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        return mpc(to_mpfr(re_part, bits), to_mpfr(im_part, bits))


def format_real(x, digits: int) -> str:
    """Locale-free decimal rendering of ``x`` with ``digits`` significant digits."""
    if not isinstance(x, mpfr):
        x = to_mpfr(x, 64 + 4 * int(digits))
    return format(x, f".{max(1, int(digits))}g")
