"""Roots of ``H_D^d(E)``: polishing, continuation in D, certification, slopes.

A root is polished with a multiplicity-robust Newton step (Newton applied
to ``H/H'``); the first and second derivatives are exact, carried through
the series recurrence and the condensation as truncated Taylor jets.  Roots are continued from ``D`` to ``D + 1`` by reusing the
converged value as the next seed; working precision grows whenever a
probe shows the determinant has lost too many bits to cancellation, or
when successive differences stall at the rounding floor.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import gmpy2
from gmpy2 import mpc, mpfr

from .errors import (
    DegenerateFitError,
    DomainError,
    NoConvergenceError,
    NotConvergedError,
    PrecisionExhaustedError,
)
from .hankel import HankelIndex, condensed_det, condensed_det_jet
from .potential import Parity, PolynomialPotential, as_parity, coerce_potential
from .precision import PrecisionPolicy, to_mpc, to_mpfr
from .series import series_jets, series_values

__all__ = [
    "EnergyEstimate",
    "RootSequence",
    "SlopeFit",
    "HankelFunction",
    "refine_root",
    "track_sequence",
    "converged_eigenvalue",
    "certified_digits",
    "sequence_certified_digits",
    "bound_pair",
    "convergence_slope",
    "fit_log_diffs",
    "geometric_test_sequence",
    "harmonic_seed",
    "scan_real_roots",
    "precision_loss",
]

log = logging.getLogger(__name__)

MAX_ITERATIONS = 100
PROBE_EXTRA_BITS = 64
# correct bits required in H at the seed before polishing
SEED_RESOLUTION_BITS = 32
# largest allowed Newton step relative to max(1, |E|)
MAX_STEP = Fraction(1, 4)


class HankelFunction:
    """``E -> H_D^d(E)`` for a fixed potential, parity and index.

    Potential coefficients are rounded once per precision and cached.
    """

    def __init__(self, potential: PolynomialPotential, parity, index: HankelIndex):
        self.potential = coerce_potential(potential)
        self.parity = as_parity(parity)
        self.index = index
        self._rounded: dict[int, list] = {}

    def _v(self, bits: int) -> list:
        v = self._rounded.get(bits)
        if v is None:
            v = [to_mpfr(c, bits) for c in self.potential.coefficients]
            self._rounded[bits] = v
        return v

    def __call__(self, energy: mpc, bits: int) -> mpc:
        v = self._v(bits)
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            E = mpc(energy)
            f = series_values(v, int(self.parity), E, self.index.highest_coefficient)
            return condensed_det(f, self.index.dimension, self.index.offset, bits)

    def jet(self, energy: mpc, bits: int) -> tuple:
        """``(H, dH/dE, d2H/dE2)`` at ``energy``."""
        v = self._v(bits)
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            E = mpc(energy)
            f = series_jets(v, int(self.parity), E, self.index.highest_coefficient)
            h0, h1, h2 = condensed_det_jet(f, self.index.dimension, self.index.offset, bits)
            return h0, h1, 2 * h2


@dataclass(frozen=True)
class EnergyEstimate:
    """A polished root ``E^[D,d]``.

    ``residual`` is the last Newton correction ``|H/H'|`` relative to
    ``max(1, |E|)``; ``lost_bits`` is the cancellation measured by the
    precision probe at this dimension.
    """

    value: mpc
    index: HankelIndex
    residual: mpfr
    newton_iterations: int
    working_bits: int
    lost_bits: int = 0

    @property
    def real(self) -> mpfr:
        return self.value.real

    @property
    def imag(self) -> mpfr:
        return self.value.imag


@dataclass
class RootSequence:
    entries: list[EnergyEstimate]
    diffs: list[mpfr] = field(default_factory=list)
    parity: Parity = Parity.EVEN
    escalations: list[int] = field(default_factory=list)
    skipped: list[int] = field(default_factory=list)

    def __post_init__(self):
        offsets = {e.index.offset for e in self.entries}
        if len(offsets) > 1:
            raise DomainError("a root sequence must share one offset d")
        if self.entries and not self.diffs:
            self.diffs = _diffs(self.entries)
        if len(self.diffs) != max(0, len(self.entries) - 1):
            raise DomainError("diffs must be one shorter than entries")

    @property
    def offset(self) -> int:
        return self.entries[0].index.offset

    @property
    def dimensions(self) -> list[int]:
        return [e.index.dimension for e in self.entries]

    @property
    def last(self) -> EnergyEstimate:
        return self.entries[-1]

    @property
    def working_bits(self) -> int:
        return self.entries[-1].working_bits

    def log10_diffs(self) -> list[tuple[int, float]]:
        """``(D, log10|E^[D] - E^[D-1]|)`` for every non-zero difference."""
        out = []
        for e, df in zip(self.entries[1:], self.diffs):
            if df > 0:
                out.append((e.index.dimension, float(gmpy2.log10(df))))
        return out


def _diffs(entries: Sequence[EnergyEstimate]) -> list[mpfr]:
    out = []
    for a, b in zip(entries, entries[1:]):
        bits = max(a.working_bits, b.working_bits)
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            out.append(abs(b.value - a.value))
    return out


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line ``log10|E^[D] - E^[D-1]| = intercept + slope * D``."""

    intercept: float
    slope: float
    fit_range: tuple[int, int]
    slope_stderr: float
    points: tuple[tuple[int, float], ...]

    @property
    def relative_error(self) -> float:
        return abs(self.slope_stderr / self.slope) if self.slope else math.inf


def precision_loss(func: Callable, energy: mpc, bits: int) -> int:
    """Bits of ``func(energy)`` lost to cancellation at ``bits`` precision.

    Estimated by repeating the evaluation with extra precision; an exact
    zero at both precisions counts as fully resolved.
    """
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        E = mpc(energy)
    low = func(E, bits)
    high = func(E, bits + PROBE_EXTRA_BITS)
    with gmpy2.context(gmpy2.get_context(), precision=bits + PROBE_EXTRA_BITS):
        err = abs(mpc(low) - high)
        if err == 0:
            return 0
        if high == 0:
            return bits
        rel = err / abs(high)
        lost = bits + int(math.ceil(float(gmpy2.log2(rel))))
    return max(0, min(bits, lost))


def _offset_point(energy: mpc, bits: int) -> mpc:
    # off the root, where the value itself is not dominated by cancellation
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        E = mpc(energy)
        return E + max(mpfr(1), abs(E)) * mpfr(2) ** -10


class _NoiseFloor(Exception):
    pass


def _polish(func: "HankelFunction", guess: mpc, bits: int, max_iter: int):
    """Multiplicity-robust Newton at fixed precision.

    Returns ``(E, iterations, residual)``.  Raises ``_NoiseFloor`` when the
    steps stall at rounding level and :class:`NoConvergenceError` at the
    iteration cap.
    """
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        E = mpc(guess)
        tol = mpfr(2) ** -(bits // 2)
        noise_band = mpfr(2) ** -(bits // 6)
        max_step = mpfr(MAX_STEP.numerator) / MAX_STEP.denominator
        best = None
        since_best = 0
        for it in range(1, max_iter + 1):
            scale = max(mpfr(1), abs(E))
            p0, d1, d2 = func.jet(E, bits)
            if p0 == 0:
                return E, it, mpfr(0)
            if d1 == 0:
                raise NoConvergenceError("derivative vanished during root polishing")
            newton = p0 / d1
            denom = d1 * d1 - p0 * d2
            step = p0 * d1 / denom if denom != 0 else newton
            size = abs(step)
            if size > max_step * scale:
                step = step * (max_step * scale / size)
            E = E - step
            rel = abs(step) / max(mpfr(1), abs(E))
            if not gmpy2.is_finite(rel):
                raise NoConvergenceError("root polishing produced a non-finite iterate")
            if rel <= tol:
                return E, it, abs(newton) / max(mpfr(1), abs(E))
            if best is None or rel < best / 2:
                best, since_best = rel, 0
            else:
                since_best += 1
                if since_best >= 6 and best < noise_band:
                    raise _NoiseFloor()
        raise NoConvergenceError(f"no convergence after {max_iter} iterations")


def refine_root(
    potential: PolynomialPotential,
    parity,
    index: HankelIndex,
    guess,
    policy: PrecisionPolicy,
    *,
    max_iterations: int = MAX_ITERATIONS,
) -> EnergyEstimate:
    """Polish the root of ``H_D^d`` nearest ``guess``.

    Precision is escalated (by ``policy.escalation_factor``) until the
    determinant keeps at least half the working bits near the seed; a real
    seed stays on the real axis for real potentials.
    """
    func = HankelFunction(potential, parity, index)
    pol = policy
    seed_bits_before = None
    while True:
        bits = pol.working_bits
        seed = to_mpc(guess, bits)
        lost = precision_loss(func, _offset_point(seed, bits), bits)
        if lost > bits // 2 - 32:
            log.debug("D=%d: %d of %d bits lost, escalating", index.dimension, lost, bits)
            pol = pol.escalated()
            continue
        # the Newton step is only meaningful if H(seed) itself is resolved;
        # stop escalating when more bits do not help (seed sits on an exact root)
        seed_bits = bits - precision_loss(func, seed, bits)
        if seed_bits < SEED_RESOLUTION_BITS and (
            seed_bits_before is None or seed_bits > seed_bits_before + 8
        ):
            log.debug("D=%d: H(seed) has %d correct bits, escalating", index.dimension, seed_bits)
            seed_bits_before = seed_bits
            pol = pol.escalated()
            continue
        try:
            E, iterations, residual = _polish(func, seed, bits, max_iterations)
        except _NoiseFloor:
            log.debug("D=%d: Newton stalled at %d bits, escalating", index.dimension, bits)
            pol = pol.escalated()
            continue
        return EnergyEstimate(E, index, residual, iterations, bits, lost)


def certified_digits(diff: mpfr, bits: int) -> int:
    """``floor(-log10(diff)) - 2``, clamped at zero.

    A zero difference certifies everything the working precision can hold.
    """
    if diff == 0:
        return max(0, int(bits * math.log10(2)) - 2)
    return max(0, math.floor(-float(gmpy2.log10(diff))) - 2)


def sequence_certified_digits(diffs: Sequence[mpfr], bits: int) -> int:
    """Certified digits of the latest root in a sequence.

    The last difference is trusted only as far as the two before it
    extrapolate: with ``c_k = -log10 diff_k`` the count uses
    ``min(c_last, 2 c_prev - c_prevprev)``.  A regular geometric sequence
    is unaffected, while an isolated, accidentally tiny difference no
    longer certifies digits the sequence has not yet settled.
    """
    if not diffs:
        return 0
    last = certified_digits(diffs[-1], bits)
    if len(diffs) < 3 or any(df == 0 for df in diffs[-3:]):
        return last
    c_prev = -float(gmpy2.log10(diffs[-2]))
    c_prevprev = -float(gmpy2.log10(diffs[-3]))
    cap = max(0, math.floor(2 * c_prev - c_prevprev) - 2)
    return min(last, cap)


def track_sequence(
    potential: PolynomialPotential,
    parity,
    d: int,
    D_min: int,
    D_max: int,
    guess,
    policy: PrecisionPolicy,
    *,
    target_digits: int | None = None,
    max_skips: int = 3,
    on_step: Callable[[EnergyEstimate, mpfr | None], None] | None = None,
) -> RootSequence:
    """Continue one root of ``H_D^d`` from ``D_min`` towards ``D_max``.

    A dimension at which polishing fails, or at which a complex seed
    collapses onto the real axis, is skipped and the next dimension is
    seeded from the last accepted root; more than ``max_skips`` such
    dimensions in a row abort the run.  With ``target_digits`` the run stops
    as soon as the latest difference certifies that many digits
    (immediately when the target is zero).
    """
    if D_min < 2:
        raise DomainError("D_min must be at least 2")
    if D_max < D_min:
        raise DomainError("D_max must not be below D_min")
    potential = coerce_potential(potential)
    parity = as_parity(parity)
    pol = policy
    entries: list[EnergyEstimate] = []
    diffs: list[mpfr] = []
    escalations: list[int] = []
    skipped: list[int] = []
    seed = guess
    stalled = 0
    misses = 0
    for D in range(D_min, D_max + 1):
        index = HankelIndex(D, d)
        try:
            est = refine_root(potential, parity, index, seed, pol)
            if _collapsed_to_real(seed, est):
                raise NoConvergenceError("complex seed converged to a real root")
        except NoConvergenceError as exc:
            misses += 1
            skipped.append(D)
            log.debug("D=%d skipped: %s", D, exc)
            if misses > max_skips:
                raise NoConvergenceError(f"D={D}: {exc}", dimension=D) from exc
            continue
        except PrecisionExhaustedError as exc:
            raise PrecisionExhaustedError(f"D={D}: {exc}") from exc
        misses = 0
        if est.working_bits > pol.working_bits:
            escalations.append(D)
            pol = pol.with_bits(est.working_bits)
        diff = None
        if entries:
            with gmpy2.context(gmpy2.get_context(), precision=est.working_bits):
                diff = abs(est.value - entries[-1].value)
            stalled = stalled + 1 if diffs and diff >= diffs[-1] else 0
            diffs.append(diff)
        entries.append(est)
        seed = est.value
        if on_step is not None:
            on_step(est, diff)
        if target_digits is not None:
            if target_digits == 0 or (
                diff is not None and sequence_certified_digits(diffs, est.working_bits) >= target_digits
            ):
                break
        if stalled >= 3:
            stalled = 0
            floor = mpfr(2) ** -(est.working_bits // 4) * max(mpfr(1), abs(est.value))
            if diff < floor:
                try:
                    pol = pol.escalated()
                except PrecisionExhaustedError as exc:
                    raise PrecisionExhaustedError(f"D={D}: {exc}") from exc
                escalations.append(D)
    if not entries:
        raise NoConvergenceError(f"no root found for D={D_min}..{D_max}", dimension=D_max)
    return RootSequence(entries, diffs, parity, escalations, skipped)


def _collapsed_to_real(seed, est: EnergyEstimate) -> bool:
    bits = est.working_bits
    seed = to_mpc(seed, bits)
    if seed.imag == 0:
        return False
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        return abs(est.value.imag) <= mpfr(2) ** -(bits // 2) * max(mpfr(1), abs(est.value))


def converged_eigenvalue(sequence: RootSequence, target_digits: int) -> tuple[EnergyEstimate, int]:
    """Last estimate and its certified digit count; raises if below target."""
    if not sequence.entries:
        raise DomainError("empty root sequence")
    if len(sequence.entries) < 2:
        digits = 0
    else:
        digits = sequence_certified_digits(sequence.diffs, sequence.last.working_bits)
    if digits < target_digits:
        raise NotConvergedError(
            f"certified {digits} digits at D={sequence.last.index.dimension}, "
            f"target was {target_digits}"
        )
    return sequence.last, digits


def harmonic_seed(potential: PolynomialPotential, parity) -> Fraction | mpfr | None:
    """Lowest level of the given parity for the ``v_1 x^2`` part alone."""
    potential = coerce_potential(potential)
    v1 = potential.coefficient(1)
    if v1 <= 0:
        return None
    root = math.isqrt(v1.numerator * v1.denominator)
    if root * root == v1.numerator * v1.denominator:
        return Fraction(root, v1.denominator) * (1 + 2 * int(as_parity(parity)))
    return to_mpfr(v1, 128) ** 0.5 * (1 + 2 * int(as_parity(parity)))


def scan_real_roots(
    potential: PolynomialPotential,
    parity,
    index: HankelIndex,
    lo,
    hi,
    points: int,
    policy: PrecisionPolicy,
) -> list[EnergyEstimate]:
    """Sign changes of ``H_D^d`` on a uniform real grid, each polished."""
    if points < 2:
        raise DomainError("need at least two grid points")
    func = HankelFunction(potential, parity, index)
    bits = policy.working_bits
    lo_f, hi_f = to_mpfr(lo, bits), to_mpfr(hi, bits)
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        grid = [lo_f + (hi_f - lo_f) * k / (points - 1) for k in range(points)]
        values = [func(mpc(x), bits).real for x in grid]
    roots = []
    for (x0, y0), (x1, y1) in zip(zip(grid, values), zip(grid[1:], values[1:])):
        if y0 == 0 or (y0 < 0) != (y1 < 0):
            with gmpy2.context(gmpy2.get_context(), precision=bits):
                mid = (x0 + x1) / 2
            try:
                roots.append(refine_root(potential, parity, index, mid, policy))
            except NoConvergenceError:
                continue
    return roots


def bound_pair(
    potential: PolynomialPotential,
    parity,
    D: int,
    policy: PrecisionPolicy,
    *,
    guess=None,
    D_min: int = 2,
) -> tuple[EnergyEstimate, EnergyEstimate]:
    """The ``d = 0`` and ``d = 1`` roots at dimension ``D``.

    For ``V = a x^2 + b x^4`` with ``a >= 0`` and ``b > 0`` these bracket the
    ground-state energy from below and above.  Both roots are continued
    from ``D_min`` so that they stay on the ground-state branch.
    """
    potential = coerce_potential(potential)
    coeffs = potential.coefficients
    if len(coeffs) != 2 or coeffs[0] < 0 or coeffs[1] <= 0:
        raise DomainError("bound pairs are defined for a x^2 + b x^4 with a >= 0, b > 0")
    if guess is None:
        guess = harmonic_seed(potential, parity) or Fraction(1)
    start = min(D_min, D)
    if start < 2:
        raise DomainError("D must be at least 2")
    lower = track_sequence(potential, parity, 0, start, D, guess, policy).last
    upper = track_sequence(potential, parity, 1, start, D, lower.value, policy).last
    return lower, upper


def fit_log_diffs(points: Sequence[tuple[int, float]], fit_fraction=Fraction(1, 2)) -> SlopeFit:
    """Ordinary least squares on the trailing ``fit_fraction`` of the points."""
    fit_fraction = Fraction(fit_fraction)
    if not 0 < fit_fraction <= 1:
        raise DomainError("fit_fraction must lie in (0, 1]")
    pts = list(points)
    if len(pts) < 4:
        raise DegenerateFitError("need at least four differences for a slope fit")
    n = max(4, math.ceil(len(pts) * fit_fraction))
    tail = pts[-n:]
    xs = [float(D) for D, _ in tail]
    ys = [float(y) for _, y in tail]
    if not all(math.isfinite(y) for y in ys):
        raise DegenerateFitError("zero difference in the fit range (converged beyond precision)")
    xm = sum(xs) / n
    ym = sum(ys) / n
    sxx = sum((x - xm) ** 2 for x in xs)
    sxy = sum((x - xm) * (y - ym) for x, y in zip(xs, ys))
    slope = sxy / sxx
    intercept = ym - slope * xm
    sse = sum((y - intercept - slope * x) ** 2 for x, y in zip(xs, ys))
    stderr = math.sqrt(sse / (n - 2) / sxx) if n > 2 else math.inf
    return SlopeFit(intercept, slope, (int(xs[0]), int(xs[-1])), stderr, tuple(tail))


def convergence_slope(sequence: RootSequence, fit_fraction=Fraction(1, 2)) -> SlopeFit:
    """Exponential convergence rate: slope of ``log10`` differences against ``D``."""
    if len(sequence.diffs) < 4:
        raise DegenerateFitError("need at least four differences for a slope fit")
    if any(df == 0 for df in sequence.diffs):
        raise DegenerateFitError("a difference is exactly zero (converged beyond precision)")
    return fit_log_diffs(sequence.log10_diffs(), fit_fraction)


def geometric_test_sequence(D_min: int, D_max: int, decay: int = 2, limit="1") -> RootSequence:
    """Synthetic ``E^[D] = limit + 10^(-decay * D)``, for checking the fit plumbing."""
    bits = max(256, math.ceil(3.33 * (decay * D_max + 20)))
    entries = []
    with gmpy2.context(gmpy2.get_context(), precision=bits):
        base = to_mpc(limit, bits)
        for D in range(D_min, D_max + 1):
            value = base + mpfr(10) ** (-decay * D)
            entries.append(EnergyEstimate(value, HankelIndex(D, 0), mpfr(0), 0, bits))
    return RootSequence(entries)
