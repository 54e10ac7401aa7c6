"""Digit-agreement helpers shared by the test modules."""
import math
from fractions import Fraction

import gmpy2
from gmpy2 import mpfr, mpq


def exact(text: str) -> Fraction:
    return Fraction(text)


def agreeing_decimals(value, reference: str, magnitude: bool = False) -> int:
    """Number of decimal places on which ``value`` matches ``reference``.

    Measured as ``floor(-log10 |value - reference|)``, the usual
    absolute-accuracy count for numbers of order one.  With ``magnitude``
    the comparison uses ``|value|``, taken at full precision.
    """
    ref = Fraction(reference)
    with gmpy2.context(gmpy2.get_context(), precision=4096):
        x = abs(mpfr(value)) if magnitude else mpfr(value)
        err = abs(x - mpfr(mpq(ref.numerator, ref.denominator)))
        if err == 0:
            return 10 ** 6
        return math.floor(-float(gmpy2.log10(err)))
