"""Command-line front end.

Usage:
    riccati-pade solve --coeffs 1,1 --parity even --seed 1.4 --digits 30
    riccati-pade solve --coeffs 1,-0.1 --seed 0.9-0.007i --digits 20
    riccati-pade scan-g --grid 0.15,0.2,0.3 --digits 12 > widths.csv
    riccati-pade slope --model quartic --dmax 30
    riccati-pade symbolic --model V3 --D 3 --format text

Exit codes: 0 success, 2 bad input, 3 no convergence, 4 precision exhausted.
Results go to stdout and are byte-for-byte reproducible; diagnostics go to
stderr and only with ``--verbose``.
"""
from __future__ import annotations

import argparse
import configparser
import csv
import json
import logging
import math
import sys
import time
from fractions import Fraction

import gmpy2

from .errors import (
    DegenerateFitError,
    DomainError,
    NoConvergenceError,
    NotConvergedError,
    PrecisionExhaustedError,
)
from .models import (
    pure_quartic,
    qes_model,
    quartic,
    resonance_seed,
    three_well,
    three_well_bound_seed,
    wkb_scaled_width,
)
from .polynomial import parse_rational
from .potential import PolynomialPotential, as_parity
from .precision import PrecisionPolicy, format_real, parse_complex
from .solver import (
    sequence_certified_digits,
    convergence_slope,
    geometric_test_sequence,
    harmonic_seed,
    track_sequence,
)
from .symbolic import REPORT_FORMATS, symbolic_report

__all__ = ["main", "build_parser", "EXIT_OK", "EXIT_USAGE", "EXIT_NO_CONVERGENCE", "EXIT_PRECISION"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3
EXIT_PRECISION = 4

MODELS = ("V1", "V2", "V3", "V4", "quartic", "pure-quartic", "three-well")
CSV_COLUMNS = ("g", "E_bs", "ReE_res", "ImE_res_abs", "scaled_width", "gap", "status")
# restart offset for bound states whose early roots wander
RESTART_STRIDE = 8

log = logging.getLogger("riccati_pade")


class UsageError(Exception):
    """Invalid option values (exit code 2)."""


def _int(text) -> int:
    return int(str(text).strip())


def _rational(text) -> Fraction:
    try:
        return parse_rational(str(text))
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _flag(text) -> bool:
    if isinstance(text, bool):
        return text
    return str(text).strip().lower() in ("1", "true", "yes", "on")


# dest -> (converter, default); None defaults mean "not set"
_SETTINGS = {
    "coeffs": (str, None),
    "model": (str, None),
    "lam": (_rational, Fraction(1)),
    "g": (_rational, Fraction(1, 5)),
    "k": (_int, 1),
    "parity": (str, None),
    "seed": (str, None),
    "state": (str, "bound"),
    "digits": (_int, None),
    "dmin": (_int, 2),
    "dmax": (_int, None),
    "offset": (_int, 0),
    "bits": (_int, None),
    "max_bits": (_int, 1 << 15),
    "grid": (str, ""),
    "prefactor": (_rational, Fraction(83, 100)),
    "fit_fraction": (_rational, Fraction(1, 2)),
    "test_sequence": (_flag, False),
    "decay": (_int, 2),
    "dimension": (_int, 2),
    "root": (str, None),
    "format": (str, "json"),
}
_COMMAND_DEFAULTS = {
    "solve": {"digits": 20, "dmax": 60},
    "scan-g": {"digits": 12, "dmax": 120},
    "slope": {"digits": 20, "dmax": 40},
    "symbolic": {},
}


def _add_model_options(p: argparse.ArgumentParser) -> None:
    grp = p.add_argument_group("potential")
    grp.add_argument("--coeffs", help="comma-separated exact rationals v_1..v_K, e.g. 1,-1/10")
    grp.add_argument("--model", help="named model: " + ", ".join(MODELS))
    grp.add_argument("--lambda", dest="lam", help="quartic coupling (default 1)")
    grp.add_argument("--g", help="three-well coupling (default 1/5)")
    grp.add_argument("--k", help="three-well exponent (default 1)")
    grp.add_argument("--parity", help="even|odd or 0|1 (default: the model's, else even)")


def _add_solver_options(p: argparse.ArgumentParser, *, digits_help: str) -> None:
    grp = p.add_argument_group("solver")
    grp.add_argument("--digits", help=digits_help)
    grp.add_argument("--dmin", help="first determinant dimension (default 2)")
    grp.add_argument("--dmax", help="largest determinant dimension")
    grp.add_argument("--offset", help="Hankel offset d (default 0)")
    grp.add_argument("--bits", help="initial working precision in bits")
    grp.add_argument("--max-bits", dest="max_bits", help="precision cap in bits (default 32768)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="riccati-pade",
        description="Eigenvalues and resonances of even polynomial potentials "
                    "from roots of Hankel determinants.",
    )
    parser.add_argument("--config", help="key = value file; command-line flags take precedence")
    parser.add_argument("--verbose", "-v", action="store_true", help="progress and timing on stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="continue one root in D and certify its digits (JSON)")
    _add_model_options(p)
    p.add_argument("--seed", help="starting energy a, a+bi or a-bi (default: harmonic estimate)")
    _add_solver_options(p, digits_help="digits to certify (default 20)")

    p = sub.add_parser("scan-g", help="three-well bound state and resonance over a g grid (CSV)")
    p.add_argument("--grid", help="g values: comma list (0.15,0.2) or start:stop:step")
    p.add_argument("--k", help="three-well exponent (default 1)")
    p.add_argument("--prefactor", help="A in the resonance seed E_bs + w(1-i) (default 0.83)")
    _add_solver_options(p, digits_help="digits to certify per point (default 12)")

    p = sub.add_parser("slope", help="fit log10|E[D]-E[D-1]| = a + b D (JSON)")
    _add_model_options(p)
    p.add_argument("--seed", help="starting energy (default depends on --state)")
    p.add_argument("--state", help="bound|resonance, selects the default three-well seed")
    p.add_argument("--fit-fraction", dest="fit_fraction", help="trailing fraction of points to fit (default 1/2)")
    p.add_argument("--test-sequence", dest="test_sequence", action="store_const", const=True,
                   help="fit the synthetic sequence 1 + 10^(-decay D) instead of a potential")
    p.add_argument("--decay", help="decay of the synthetic sequence (default 2)")
    _add_solver_options(p, digits_help="precision floor in digits (default 20)")

    p = sub.add_parser("symbolic", help="exact determinant and deflation (JSON or text)")
    _add_model_options(p)
    p.add_argument("--D", dest="dimension", help="determinant dimension (default 2)")
    p.add_argument("--offset", help="Hankel offset d (default 0)")
    p.add_argument("--root", help="rational to deflate at (default: the model's exact level)")
    p.add_argument("--format", help="json|text (default json)")
    return parser


def _read_config(path: str) -> dict:
    cp = configparser.ConfigParser(interpolation=None)
    try:
        with open(path, encoding="utf-8") as fh:
            cp.read_string("[settings]\n" + fh.read())
    except (OSError, configparser.Error) as exc:
        raise UsageError(f"cannot read config {path!r}: {exc}") from exc
    out = {}
    for key, value in cp.items("settings"):
        dest = key.strip().replace("-", "_")
        dest = {"lambda": "lam", "d": "dimension"}.get(dest, dest)
        if dest not in _SETTINGS:
            raise UsageError(f"unknown config key {key!r}")
        out[dest] = value
    return out


def _resolve(args: argparse.Namespace) -> argparse.Namespace:
    """Command-line value, else config value, else built-in default."""
    config = _read_config(args.config) if args.config else {}
    defaults = _COMMAND_DEFAULTS[args.command]
    for dest, (conv, default) in _SETTINGS.items():
        given = getattr(args, dest, None)
        if given is None:
            given = config.get(dest)
        if given is None:
            setattr(args, dest, defaults.get(dest, default))
            continue
        try:
            setattr(args, dest, conv(given))
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad value for {dest}: {given!r}") from exc
    return args


def _potential(args):
    """``(potential, default parity, default seed, three-well model or None)``."""
    if args.coeffs and args.model:
        raise UsageError("give either --coeffs or --model, not both")
    if args.coeffs:
        try:
            pot = PolynomialPotential.parse(args.coeffs)
        except (ValueError, TypeError) as exc:
            raise UsageError(f"bad --coeffs: {exc}") from exc
        return pot, 0, None, None
    name = (args.model or "").strip().lower()
    if not name:
        raise UsageError("a potential is required: --coeffs or --model")
    if name in ("v1", "v2", "v3", "v4"):
        m = qes_model(name)
        return m.potential, int(m.parity), None, None
    if name == "quartic":
        return quartic(args.lam), 0, None, None
    if name == "pure-quartic":
        return pure_quartic(), 0, Fraction(1), None
    if name == "three-well":
        tw = three_well(args.g, args.k)
        return tw.potential, 0, three_well_bound_seed(tw.g, tw.k), tw
    raise UsageError(f"unknown model {args.model!r}; choose from {', '.join(MODELS)}")


def _parity(args, default: int) -> int:
    if args.parity is None:
        return default
    try:
        return int(as_parity(args.parity))
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _seed(text):
    try:
        re_part, im_part = parse_complex(text)
    except ValueError as exc:
        raise UsageError(f"bad --seed: {exc}") from exc
    return text if im_part else re_part


def _policy(args) -> PrecisionPolicy:
    if args.digits < 0:
        raise UsageError("--digits must be non-negative")
    try:
        return PrecisionPolicy.for_digits(args.digits, max_bits=args.max_bits, working_bits=args.bits)
    except DomainError as exc:
        raise UsageError(str(exc)) from exc


def _check_range(args) -> None:
    if args.dmin < 2 or args.dmax < args.dmin:
        raise UsageError("need 2 <= --dmin <= --dmax")


def _progress(est, diff) -> None:
    d = "" if diff is None else f" diff={format_real(diff, 4)}"
    log.info("D=%d bits=%d newton=%d%s", est.index.dimension, est.working_bits,
             est.newton_iterations, d)


def _value_digits(certified: int, bits: int) -> int:
    return min(max(certified + 6, 17), int(bits * math.log10(2)))


def cmd_solve(args) -> int:
    pot, default_parity, default_seed, _ = _potential(args)
    parity = _parity(args, default_parity)
    _check_range(args)
    policy = _policy(args)
    if args.seed is not None:
        seed = _seed(args.seed)
    else:
        seed = default_seed or harmonic_seed(pot, parity) or Fraction(1)
    seq = track_sequence(pot, parity, args.offset, args.dmin, args.dmax, seed, policy,
                         target_digits=args.digits, on_step=_progress)
    last = seq.last
    digits = sequence_certified_digits(seq.diffs, last.working_bits)
    n = _value_digits(digits, last.working_bits)
    result = {
        "value_re": format_real(last.value.real, n),
        "value_im": format_real(last.value.imag, n),
        "certified_digits": digits,
        "D_final": last.index.dimension,
        "working_bits_final": last.working_bits,
        "diffs": [format_real(df, 6) for df in seq.diffs],
    }
    sys.stdout.write(json.dumps(result, indent=2) + "\n")
    if digits < args.digits:
        log.warning("certified %d digits, target was %d", digits, args.digits)
        return EXIT_NO_CONVERGENCE
    return EXIT_OK


def parse_grid(text: str) -> list[Fraction]:
    """``"0.15,0.2,0.3"`` or ``"0.1:0.3:0.05"`` (inclusive) as exact rationals."""
    text = (text or "").strip()
    if not text:
        return []
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise UsageError("grid range must be start:stop:step")
        start, stop, step = (_rational(p) for p in parts)
        if step <= 0:
            raise UsageError("grid step must be positive")
        out = []
        g = start
        while g <= stop:
            out.append(g)
            g += step
        return out
    return [_rational(t) for t in text.split(",") if t.strip()]


def _track_bound(pot, seed, args, policy, target=True):
    """Bound-state run, restarted at larger ``D_min`` if the early roots wander."""
    start = args.dmin
    while True:
        try:
            return track_sequence(pot, 0, args.offset, start, args.dmax, seed, policy,
                                  target_digits=args.digits if target else None,
                                  on_step=_progress)
        except NoConvergenceError:
            start += RESTART_STRIDE
            if start > args.dmax:
                raise
            log.info("bound state: restarting at D=%d", start)


def _certified(seq) -> int:
    return sequence_certified_digits(seq.diffs, seq.last.working_bits)


def three_well_pair(g, args, policy):
    """Bound-state and resonance sequences for one coupling ``g``."""
    tw = three_well(g, args.k)
    bound = _track_bound(tw.potential, three_well_bound_seed(tw.g, tw.k), args, policy)
    seed = resonance_seed(bound.last.value.real, tw.g, args.prefactor)
    res = track_sequence(tw.potential, 0, args.offset, args.dmin, args.dmax, seed, policy,
                         target_digits=args.digits, on_step=_progress)
    return tw, bound, res


def cmd_scan_g(args) -> int:
    grid = parse_grid(args.grid)
    _check_range(args)
    policy = _policy(args)
    out = csv.writer(sys.stdout, lineterminator="\n")
    out.writerow(CSV_COLUMNS)
    n = args.digits + 3
    for g in grid:
        g_text = _decimal(g)
        log.info("g=%s", g_text)
        try:
            tw, bound, res = three_well_pair(g, args, policy)
        except (NoConvergenceError, NotConvergedError) as exc:
            log.warning("g=%s: %s", g_text, exc)
            out.writerow([g_text, "", "", "", "", "", "no-convergence"])
            continue
        except PrecisionExhaustedError as exc:
            log.warning("g=%s: %s", g_text, exc)
            out.writerow([g_text, "", "", "", "", "", "precision-exhausted"])
            continue
        E_bs = bound.last.value.real
        E_res = res.last.value
        bits = max(bound.last.working_bits, res.last.working_bits)
        with gmpy2.context(gmpy2.get_context(), precision=bits):
            gap = abs(E_bs - E_res.real)
        width = wkb_scaled_width(tw.g, abs(E_res.imag), bits).scaled_width
        ok = min(_certified(bound), _certified(res)) >= args.digits
        out.writerow([
            g_text,
            format_real(E_bs, n),
            format_real(E_res.real, n),
            format_real(abs(E_res.imag), n),
            format_real(width, n),
            format_real(gap, n),
            "ok" if ok else "uncertified",
        ])
        sys.stdout.flush()
    return EXIT_OK


def _decimal(q: Fraction) -> str:
    """Exact decimal for terminating fractions, else ``p/q``."""
    scale = 0
    while scale < 64 and (q * 10 ** scale).denominator != 1:
        scale += 1
    if (q * 10 ** scale).denominator != 1:
        return str(q)
    digits = str(abs(q.numerator) * 10 ** scale // q.denominator)
    if scale:
        digits = digits.rjust(scale + 1, "0")
        digits = digits[:-scale] + "." + digits[-scale:]
    return ("-" if q < 0 else "") + digits


def _round(x: float) -> float:
    return float(f"{x:.12g}")


def cmd_slope(args) -> int:
    _check_range(args)
    if args.test_sequence:
        seq = geometric_test_sequence(args.dmin, args.dmax, args.decay)
    else:
        pot, default_parity, default_seed, tw = _potential(args)
        parity = _parity(args, default_parity)
        policy = _policy(args)
        state = args.state.strip().lower()
        if state not in ("bound", "resonance"):
            raise UsageError("--state must be bound or resonance")
        if args.seed is not None:
            seed = _seed(args.seed)
        elif state == "resonance":
            if tw is None:
                raise UsageError("a resonance needs a complex --seed for this potential")
            bound = _track_bound(pot, default_seed, args, policy)
            seed = resonance_seed(bound.last.value.real, tw.g, args.prefactor)
        else:
            seed = default_seed or harmonic_seed(pot, parity) or Fraction(1)
        if state == "bound" and tw is not None and args.seed is None:
            seq = _track_bound(pot, seed, args, policy, target=False)
        else:
            seq = track_sequence(pot, parity, args.offset, args.dmin, args.dmax, seed, policy,
                                 on_step=_progress)
    fit = convergence_slope(seq, args.fit_fraction)
    result = {
        "a": _round(fit.intercept),
        "b": _round(fit.slope),
        "b_stderr": _round(fit.slope_stderr),
        "fit_range": list(fit.fit_range),
        "points": [[D, _round(y)] for D, y in seq.log10_diffs()],
    }
    sys.stdout.write(json.dumps(result, indent=2) + "\n")
    return EXIT_OK


def cmd_symbolic(args) -> int:
    if args.format.lower() not in REPORT_FORMATS:
        raise UsageError(f"--format must be one of {', '.join(REPORT_FORMATS)}")
    if args.dimension < 1:
        raise UsageError("--D must be at least 1")
    name = (args.model or "").strip().lower()
    if name in ("v1", "v2", "v3", "v4") and not args.coeffs:
        model = qes_model(name)
        text = symbolic_report(model, args.dimension, args.format, parity=args.parity,
                               root=args.root, d=args.offset)
    else:
        pot, default_parity, _, _ = _potential(args)
        parity = _parity(args, default_parity)
        root = None if args.root is None else _rational(args.root)
        text = symbolic_report(pot, args.dimension, args.format, parity=parity, root=root,
                               d=args.offset)
    sys.stdout.write(text)
    return EXIT_OK


_COMMANDS = {
    "solve": cmd_solve,
    "scan-g": cmd_scan_g,
    "slope": cmd_slope,
    "symbolic": cmd_symbolic,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.ERROR,
        format="%(levelname)s %(message)s",
        stream=sys.stderr,
    )
    started = time.perf_counter()
    try:
        args = _resolve(args)
        code = _COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NoConvergenceError, NotConvergedError, DegenerateFitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except PrecisionExhaustedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECISION
    log.info("%s finished in %.2f s", args.command, time.perf_counter() - started)
    return code


if __name__ == "__main__":
    sys.exit(main())
