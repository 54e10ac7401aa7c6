"""Dense univariate polynomials in the energy with exact rational coefficients."""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]

__all__ = ["RationalPolynomial", "parse_rational"]


def parse_rational(text: str | int | Fraction) -> Fraction:
    """Parse ``"105/64"``, ``"-0.1"`` or ``"3"`` into an exact Fraction.

    Decimal literals are read exactly, so ``"0.1"`` becomes ``1/10``.
    """
    if isinstance(text, Fraction):
        return text
    if isinstance(text, int):
        return Fraction(text)
    if isinstance(text, float):
        raise TypeError("floats are not accepted as exact rationals; pass a string")
    s = str(text).strip()
    if not s:
        raise ValueError("empty rational literal")
    try:
        return Fraction(s)
    except (ValueError, ZeroDivisionError) as exc:
        raise ValueError(f"not a rational literal: {text!r}") from exc


class RationalPolynomial:
    """Polynomial ``sum(c[k] * E**k)`` stored lowest degree first.

    Instances are immutable; trailing zero coefficients are stripped so the
    zero polynomial has an empty coefficient tuple.
    """

    __slots__ = ("_c",)

    def __init__(self, coefficients: Iterable[Rational] = ()):
        c = [Fraction(x) for x in coefficients]
        while c and c[-1] == 0:
            c.pop()
        self._c = tuple(c)

    @classmethod
    def constant(cls, value: Rational) -> "RationalPolynomial":
        return cls([value])

    @classmethod
    def linear(cls, root: Rational) -> "RationalPolynomial":
        """The monic factor ``E - root``."""
        return cls([-Fraction(root), 1])

    @property
    def coefficients(self) -> tuple[Fraction, ...]:
        return self._c

    @property
    def degree(self) -> int:
        """Degree, with ``-1`` for the zero polynomial."""
        return len(self._c) - 1

    def is_zero(self) -> bool:
        return not self._c

    @property
    def leading(self) -> Fraction:
        return self._c[-1] if self._c else Fraction(0)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = RationalPolynomial([other])
        if not isinstance(other, RationalPolynomial):
            return NotImplemented
        return self._c == other._c

    def __hash__(self) -> int:
        return hash(self._c)

    def __repr__(self) -> str:
        return f"RationalPolynomial({[str(x) for x in self._c]})"

    def __str__(self) -> str:
        return self.to_text()

    @staticmethod
    def _coerce(other) -> "RationalPolynomial":
        if isinstance(other, RationalPolynomial):
            return other
        if isinstance(other, (int, Fraction)):
            return RationalPolynomial([other])
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        n = max(len(self._c), len(other._c))
        a = self._c + (Fraction(0),) * (n - len(self._c))
        b = other._c + (Fraction(0),) * (n - len(other._c))
        return RationalPolynomial(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return RationalPolynomial(-x for x in self._c)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        if self.is_zero() or other.is_zero():
            return RationalPolynomial()
        out = [Fraction(0)] * (len(self._c) + len(other._c) - 1)
        for i, a in enumerate(self._c):
            if a == 0:
                continue
            for j, b in enumerate(other._c):
                out[i + j] += a * b
        return RationalPolynomial(out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("negative powers are not polynomials")
        result = RationalPolynomial([1])
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def divmod(self, divisor: "RationalPolynomial") -> tuple["RationalPolynomial", "RationalPolynomial"]:
        """Euclidean division over the rationals."""
        divisor = self._coerce(divisor)
        if divisor.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self._c)
        dd = divisor.degree
        lead = divisor.leading
        if len(rem) - 1 < dd:
            return RationalPolynomial(), self
        quo = [Fraction(0)] * (len(rem) - dd)
        for k in range(len(rem) - 1 - dd, -1, -1):
            q = rem[k + dd] / lead
            quo[k] = q
            if q:
                for j, b in enumerate(divisor._c):
                    rem[k + j] -= q * b
        return RationalPolynomial(quo), RationalPolynomial(rem[:dd])

    def exact_div(self, divisor: "RationalPolynomial") -> "RationalPolynomial":
        q, r = self.divmod(divisor)
        if not r.is_zero():
            raise ArithmeticError("polynomial division is not exact")
        return q

    def __call__(self, x):
        """Horner evaluation at any value supporting ``*`` and ``+``."""
        acc = 0 * x
        for c in reversed(self._c):
            acc = acc * x + c
        return acc

    def evaluate_exact(self, x: Rational) -> Fraction:
        return self(Fraction(x))

    def synthetic_division(self, root: Rational) -> tuple["RationalPolynomial", Fraction]:
        """Divide by ``E - root``; returns the quotient and the scalar remainder."""
        root = Fraction(root)
        if self.is_zero():
            return RationalPolynomial(), Fraction(0)
        high_first = list(reversed(self._c))
        out = [high_first[0]]
        for c in high_first[1:]:
            out.append(c + out[-1] * root)
        remainder = out.pop()
        return RationalPolynomial(reversed(out)), remainder

    def content(self) -> Fraction:
        """Rational content with the sign of the leading coefficient.

        ``p == p.content() * p.primitive()`` and the primitive part has
        coprime integer coefficients and a positive leading coefficient.
        """
        if self.is_zero():
            return Fraction(0)
        num = 0
        den = 1
        for c in self._c:
            num = math.gcd(num, c.numerator)
            den = den * c.denominator // math.gcd(den, c.denominator)
        content = Fraction(num, den)
        return content if self.leading > 0 else -content

    def primitive(self) -> "RationalPolynomial":
        if self.is_zero():
            return self
        cont = self.content()
        return RationalPolynomial(c / cont for c in self._c)

    def integer_coefficients(self) -> list[int]:
        out = []
        for c in self._c:
            if c.denominator != 1:
                raise ValueError("polynomial has non-integer coefficients")
            out.append(c.numerator)
        return out

    def to_text(self, var: str = "E") -> str:
        if self.is_zero():
            return "0"
        terms = []
        for k in range(len(self._c) - 1, -1, -1):
            c = self._c[k]
            if c == 0:
                continue
            sign = "-" if c < 0 else "+"
            mag = abs(c)
            if k == 0:
                body = str(mag)
            else:
                power = var if k == 1 else f"{var}^{k}"
                body = power if mag == 1 else f"{mag}*{power}"
            terms.append((sign, body))
        first_sign, first_body = terms[0]
        text = ("-" if first_sign == "-" else "") + first_body
        for sign, body in terms[1:]:
            text += f" {sign} {body}"
        return text

    @classmethod
    def from_text(cls, text: str, var: str = "E") -> "RationalPolynomial":
        """Inverse of :meth:`to_text`."""
        s = text.replace(" ", "")
        if s == "0":
            return cls()
        if s[0] not in "+-":
            s = "+" + s
        term_re = re.compile(
            rf"([+-])(?:(\d+(?:/\d+)?)(?:\*{var}(?:\^(\d+))?)?|{var}(?:\^(\d+))?)"
        )
        coeffs: dict[int, Fraction] = {}
        pos = 0
        while pos < len(s):
            m = term_re.match(s, pos)
            if not m or m.end() == pos:
                raise ValueError(f"cannot parse polynomial term at {s[pos:]!r}")
            sign, mag, pow_a, pow_b = m.groups()
            body = m.group(0)[1:]
            if mag is None:
                c = Fraction(1)
                k = int(pow_b) if pow_b else 1
            else:
                c = Fraction(mag)
                if var in body:
                    k = int(pow_a) if pow_a else 1
                else:
                    k = 0
            if sign == "-":
                c = -c
            coeffs[k] = coeffs.get(k, Fraction(0)) + c
            pos = m.end()
        top = max(coeffs)
        return cls(coeffs.get(k, Fraction(0)) for k in range(top + 1))

    def to_strings(self) -> list[str]:
        return [str(c) for c in self._c]

    @classmethod
    def from_strings(cls, items: Sequence[str]) -> "RationalPolynomial":
        return cls(parse_rational(x) for x in items)
