"""Arbitrary-precision eigenvalues and resonances of even polynomial potentials.

The log-derivative of the wavefunction is expanded in a Taylor series whose
coefficients follow from the Riccati equation; eigenvalues (real) and
resonances (complex) are the limits of roots of Hankel determinants built
from those coefficients as the determinant dimension grows.
"""
from .errors import (
    DegenerateFitError,
    DomainError,
    InsufficientCoefficientsError,
    NoConvergenceError,
    NotConvergedError,
    PrecisionExhaustedError,
    RPMError,
)
from .hankel import (
    HankelIndex,
    HankelMethod,
    HankelTable,
    HankelValue,
    deflate_known_root,
    hankel_det,
    hankel_det_direct,
    hankel_table,
    symbolic_hankel_det,
)
from .models import (
    QESModel,
    Resonance,
    ThreeWellModel,
    WKBQuantity,
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
from .polynomial import RationalPolynomial, parse_rational
from .potential import Parity, PolynomialPotential, as_parity
from .precision import PrecisionPolicy, bits_for_digits, format_real, parse_complex
from .series import SeriesCoefficients, series_coefficients, symbolic_series_coefficients
from .solver import (
    EnergyEstimate,
    RootSequence,
    SlopeFit,
    bound_pair,
    certified_digits,
    sequence_certified_digits,
    convergence_slope,
    converged_eigenvalue,
    fit_log_diffs,
    geometric_test_sequence,
    harmonic_seed,
    refine_root,
    scan_real_roots,
    track_sequence,
)
from .symbolic import QESReport, parse_symbolic_report, symbolic_report, verify_qes

__version__ = "0.1.0"

__all__ = [
    name for name, obj in list(globals().items())
    if not name.startswith("_") and not isinstance(obj, type(__import__("sys")))
]
