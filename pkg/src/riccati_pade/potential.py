"""Even polynomial potentials with exact rational coefficients."""
from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError
from .polynomial import parse_rational

__all__ = ["Parity", "PolynomialPotential", "as_parity"]


class Parity(IntEnum):
    """Parity index ``s``: 0 for even states, 1 for odd states."""

    EVEN = 0
    ODD = 1


def as_parity(value) -> Parity:
    """Accept ``0``/``1``, ``"even"``/``"odd"`` or a :class:`Parity`."""
    if isinstance(value, Parity):
        return value
    if isinstance(value, str):
        key = value.strip().lower()
        if key in ("even", "0", "s0"):
            return Parity.EVEN
        if key in ("odd", "1", "s1"):
            return Parity.ODD
        raise DomainError(f"unknown parity {value!r}")
    if value in (0, 1):
        return Parity(int(value))
    raise DomainError(f"parity must be 0 or 1, got {value!r}")


@dataclass(frozen=True)
class PolynomialPotential:
    """``V(x) = sum_{j=1..K} v_j x^(2j)``; no constant term, no odd powers.

    Interior coefficients may vanish (the pure quartic is ``(0, 1)``), but
    the leading one may not.
    """

    coefficients: tuple[Fraction, ...]

    def __init__(self, coefficients: Iterable):
        coeffs = tuple(parse_rational(c) if not isinstance(c, Fraction) else c
                       for c in coefficients)
        if not coeffs:
            raise DomainError("a potential needs at least one coefficient")
        if coeffs[-1] == 0:
            raise DomainError("leading coefficient v_K must be non-zero")
        object.__setattr__(self, "coefficients", coeffs)

    @classmethod
    def parse(cls, text: str) -> "PolynomialPotential":
        """From a comma-separated list such as ``"105/64,-43/8,1,-1,1"``."""
        items = [t for t in text.replace(" ", "").split(",") if t]
        try:
            return cls(parse_rational(t) for t in items)
        except ValueError as exc:
            raise DomainError(str(exc)) from exc

    @property
    def degree_index(self) -> int:
        """``K``: the potential has degree ``2K``."""
        return len(self.coefficients)

    def coefficient(self, j: int) -> Fraction:
        """``v_j`` with ``v_j = 0`` for ``j > K`` (and for ``j < 1``)."""
        if 1 <= j <= len(self.coefficients):
            return self.coefficients[j - 1]
        return Fraction(0)

    def __call__(self, x):
        """Evaluate ``V(x)``; exact for rational ``x``."""
        x2 = x * x
        acc = 0 * x2
        for c in reversed(self.coefficients):
            acc = (acc + c) * x2
        return acc

    @property
    def is_confining(self) -> bool:
        """Discrete spectrum iff ``v_K > 0``."""
        return self.coefficients[-1] > 0

    def as_strings(self) -> list[str]:
        return [str(c) for c in self.coefficients]

    def __str__(self) -> str:
        return ",".join(self.as_strings())

    def __len__(self) -> int:
        return len(self.coefficients)

    def __iter__(self):
        return iter(self.coefficients)


def coerce_potential(value: "PolynomialPotential | Sequence | str") -> PolynomialPotential:
    if isinstance(value, PolynomialPotential):
        return value
    if isinstance(value, str):
        return PolynomialPotential.parse(value)
    return PolynomialPotential(value)
