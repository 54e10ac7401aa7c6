"""Exact Hankel determinants over Q[E] and deflation at known rational levels.

    series (exact polynomials in E) -> Bareiss determinant -> prefactor * primitive
                                                           -> divide by (E - root)
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError
from .hankel import HankelIndex, deflate_known_root, symbolic_hankel_det
from .models import QESModel
from .polynomial import RationalPolynomial, parse_rational
from .potential import Parity, PolynomialPotential, as_parity, coerce_potential
from .series import symbolic_series_coefficients

__all__ = [
    "QESReport",
    "exact_hankel_determinant",
    "verify_qes",
    "symbolic_report",
    "parse_symbolic_report",
    "REPORT_FORMATS",
]

REPORT_FORMATS = ("json", "text")


@dataclass(frozen=True)
class QESReport:
    """Exact ``H_D^d(E)`` and the outcome of dividing it by ``E - root``.

    ``determinant == prefactor * primitive``; when ``root_exact`` holds,
    ``determinant == (E - root) * quotient``.
    """

    label: str
    parity: Parity
    index: HankelIndex
    determinant: RationalPolynomial
    root: Fraction | None
    root_exact: bool
    quotient: RationalPolynomial | None

    @property
    def prefactor(self) -> Fraction:
        return self.determinant.content()

    @property
    def primitive(self) -> RationalPolynomial:
        return self.determinant.primitive()

    def factored_text(self, var: str = "E") -> str:
        """``(c) * (q E - p) * (primitive cofactor)`` or ``(c) * (primitive)``."""
        D, d = self.index.dimension, self.index.offset
        lhs = f"H_{D}^{d}({var})"
        if self.determinant.is_zero():
            return f"{lhs} = 0"
        if self.root is not None and self.root_exact:
            linear = RationalPolynomial([-self.root.numerator, self.root.denominator])
            cofactor = self.determinant.exact_div(linear)
            factors = [linear, cofactor.primitive()]
            scale = cofactor.content()
        else:
            factors = [self.primitive]
            scale = self.prefactor
        body = " * ".join(f"({f.to_text(var)})" for f in factors if f.degree > 0)
        return f"{lhs} = ({scale}) * {body}" if body else f"{lhs} = {scale}"


def exact_hankel_determinant(potential, parity, D: int, d: int = 0) -> RationalPolynomial:
    """``H_D^d(E)`` as an exact polynomial of degree ``D (D + 1) + d D``."""
    index = HankelIndex(D, d)
    series = symbolic_series_coefficients(coerce_potential(potential), parity, index.highest_coefficient)
    return symbolic_hankel_det(series, index)


def verify_qes(model: QESModel, D: int, *, root=None, d: int = 0) -> QESReport:
    """Compute ``H_D^d`` for ``model`` and deflate it at ``root``.

    ``root`` defaults to the model's exact energy; any rational may be
    supplied instead to test it as a candidate level.
    """
    root = model.exact_energy if root is None else parse_rational(root)
    return _report(model.label, model.potential, model.parity, D, d, root)


def _report(label, potential, parity, D, d, root) -> QESReport:
    det = exact_hankel_determinant(potential, parity, D, d)
    quotient, exact = None, False
    if root is not None and not det.is_zero():
        quotient, exact = deflate_known_root(det, root)
    return QESReport(label, as_parity(parity), HankelIndex(D, d), det, root, exact, quotient)


def symbolic_report(
    model: QESModel | PolynomialPotential | str,
    D: int,
    output_format: str = "json",
    *,
    parity=None,
    root=None,
    d: int = 0,
) -> str:
    """Lossless rendering of the exact determinant.

    ``model`` is a :class:`QESModel` or any potential (then ``parity`` is
    required and ``root`` optional).  Rationals are written as ``"p/q"``
    strings so that nothing is rounded.
    """
    fmt = output_format.lower()
    if fmt not in REPORT_FORMATS:
        raise DomainError(f"unsupported format {output_format!r}; choose json or text")
    if isinstance(model, QESModel):
        report = verify_qes(model, D, root=root, d=d) if parity is None or as_parity(parity) == model.parity \
            else _report(model.label, model.potential, parity, D, d,
                         model.exact_energy if root is None else parse_rational(root))
    else:
        if parity is None:
            raise DomainError("parity is required for a bare potential")
        potential = coerce_potential(model)
        report = _report(str(potential), potential, parity, D, d,
                         None if root is None else parse_rational(root))
    return _render_json(report) if fmt == "json" else _render_text(report)


def _render_json(report: QESReport) -> str:
    prefactor = report.prefactor
    deflation = None
    if report.root is not None:
        deflation = {
            "root": str(report.root),
            "exact": report.root_exact,
            "quotient_coefficients": report.quotient.to_strings() if report.quotient is not None else [],
        }
    payload = {
        "model": report.label,
        "parity": int(report.parity),
        "D": report.index.dimension,
        "d": report.index.offset,
        "prefactor": {"num": str(prefactor.numerator), "den": str(prefactor.denominator)},
        "primitive_coefficients": report.primitive.to_strings(),
        "deflation": deflation,
    }
    return json.dumps(payload, indent=2) + "\n"


def _render_text(report: QESReport) -> str:
    lines = [
        f"model: {report.label}  parity: s={int(report.parity)}",
        report.factored_text(),
        f"expanded: {report.determinant.to_text()}",
    ]
    if report.root is not None:
        verdict = "exact root" if report.root_exact else "not a root"
        lines.append(f"E = {report.root}: {verdict}")
    return "\n".join(lines) + "\n"


def parse_symbolic_report(text: str) -> dict:
    """Inverse of the JSON rendering: rebuilds the exact polynomials."""
    data = json.loads(text)
    prefactor = Fraction(int(data["prefactor"]["num"]), int(data["prefactor"]["den"]))
    primitive = RationalPolynomial.from_strings(data["primitive_coefficients"])
    out = {
        "model": data["model"],
        "parity": Parity(data.get("parity", 0)),
        "index": HankelIndex(data["D"], data["d"]),
        "prefactor": prefactor,
        "primitive": primitive,
        "determinant": primitive * prefactor,
        "deflation": None,
    }
    if data.get("deflation") is not None:
        defl = data["deflation"]
        out["deflation"] = {
            "root": Fraction(defl["root"]),
            "exact": bool(defl["exact"]),
            "quotient": RationalPolynomial.from_strings(defl["quotient_coefficients"]),
        }
    return out
