"""
Command Line Interface

Subcommands:

    certify         L(r) < 0 certificate for one exact spectrum
    scan            seeded bulk certification over random rational spectra
    derivatives     eigenvalue derivatives three ways, with discrepancy
    stokes          Stokes quantity A both ways plus the rigidity verdict
    isoparametric   scalar curvature along an isoparametric family
    clifford        power sums of a minimal Clifford torus
    multiplicities  recover multiplicities from power sums
    cases           (n, g) pairs left possible by the rigidity corollary

Exit codes: 0 success, 1 verification failure, 2 input error,
3 degenerate input, 4 internal identity violation.
"""

import argparse
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from itertools import repeat
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

from dotenv import load_dotenv
from loguru import logger

from lib import brito_inequality, hypersurface_models, stokes_quantity, vandermonde
from lib.errors import (
    IdentityViolation,
    InvalidRange,
    ParseError,
    RigidityError,
    VerificationFailure,
)
from lib.reports import OUTPUT_FORMATS, CommandReport, write_report
from lib.sampling import TrialKey, spectrum_for_trial, trial_keys
from lib.settings import N_MAX, N_MIN, Tolerances, get_scan_defaults, get_tolerances, load_settings
from lib.spectral_core import (
    ScalarKind,
    Spectrum,
    format_values,
    parse_rational,
    parse_rational_list,
    solve_multiplicities,
)

SEED_ENV = "RIGIDITYKIT_SEED"
LOG_LEVELS = ("TRACE", "DEBUG", "INFO", "SUCCESS", "WARNING", "ERROR")


# =============================================================================
# RUN CONFIG
# =============================================================================

@dataclass(frozen=True)
class RunConfig:
    seed: int
    trials: int
    n_range: Tuple[int, int]
    rational_bound: int
    tolerances: Tolerances
    output_format: str
    out: Optional[Path] = None
    workers: int = 1
    kind: ScalarKind = ScalarKind.EXACT

    def __post_init__(self):
        if not 0 <= self.seed < 2 ** 64:
            raise ParseError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.trials < 1:
            raise ParseError(f"trials must be positive, got {self.trials}")
        lo, hi = self.n_range
        if not N_MIN <= lo <= hi <= N_MAX:
            raise InvalidRange(f"n range {lo}..{hi} must lie within {N_MIN}..{N_MAX}")
        if self.rational_bound < 1:
            raise ParseError(f"rational bound must be positive, got {self.rational_bound}")
        if self.workers < 1:
            raise ParseError(f"workers must be positive, got {self.workers}")
        if self.output_format not in OUTPUT_FORMATS:
            raise ParseError(f"output format must be one of {OUTPUT_FORMATS}")

    @property
    def n_values(self) -> List[int]:
        return list(range(self.n_range[0], self.n_range[1] + 1))


def parse_n_range(text: str) -> Tuple[int, int]:
    """"3..6" or a single "4"."""
    match = re.fullmatch(r"\s*(\d+)\s*(?:\.\.\s*(\d+)\s*)?", text)
    if not match:
        raise ParseError(f"'{text}' is not an n range like 3..6")
    lo = int(match.group(1))
    hi = int(match.group(2)) if match.group(2) else lo
    if lo > hi:
        raise InvalidRange(f"empty n range {lo}..{hi}")
    return lo, hi


def parse_seed(text: Optional[str]) -> Optional[int]:
    if text is None or text == "":
        return None
    try:
        return int(text)
    except ValueError:
        raise ParseError(f"seed '{text}' is not an integer") from None


def parse_int_list(text: str) -> List[int]:
    try:
        return [int(item) for item in text.split(",")]
    except ValueError:
        raise ParseError(f"'{text}' is not a comma-separated integer list") from None


def parse_values(text: str, kind: ScalarKind) -> List[Any]:
    """Comma-separated scalars; float kind also takes decimals and p/q."""
    if kind is ScalarKind.EXACT:
        return parse_rational_list(text)
    values = []
    for item in text.split(","):
        try:
            values.append(float(parse_rational(item)))
        except ParseError:
            try:
                values.append(float(item))
            except ValueError:
                raise ParseError(f"'{item}' is not a number") from None
    return values


def build_config(args: argparse.Namespace) -> RunConfig:
    load_dotenv()
    defaults = get_scan_defaults()
    seed = args.seed if args.seed is not None else parse_seed(os.environ.get(SEED_ENV))
    n_range = parse_n_range(args.n_range) if getattr(args, "n_range", None) else defaults.n_range
    trials = getattr(args, "trials", None)
    bound = getattr(args, "bound", None)
    return RunConfig(
        seed=defaults.seed if seed is None else seed,
        trials=defaults.trials if trials is None else trials,
        n_range=n_range,
        rational_bound=defaults.rational_bound if bound is None else bound,
        tolerances=get_tolerances(),
        output_format=args.output,
        out=Path(args.out) if args.out else None,
        workers=defaults.workers if args.workers is None else args.workers,
        kind=ScalarKind.FLOAT if getattr(args, "kind", "exact") == "float" else ScalarKind.EXACT,
    )


# =============================================================================
# COMMANDS
# =============================================================================

CommandResult = Tuple[CommandReport, int]


def _other_indices(n: int, r: int) -> List[int]:
    return [p for p in range(1, n + 1) if p != r]


def cmd_certify(lambdas: str, r: Optional[int], config: RunConfig) -> CommandResult:
    s = Spectrum.exact(parse_rational_list(lambdas))
    logger.info(f"[CLI] Certifying λ={format_values(s.values)}" + (f" r={r}" if r else " for every r"))
    certificates = (
        [brito_inequality.certify(s, r, config.tolerances)]
        if r is not None
        else brito_inequality.certify_all(s, config.tolerances)
    )
    columns = ["r", "index", "b", "c", "d"]
    rows = [
        [cert.r, index, b, c, d]
        for cert in certificates
        for index, b, c, d in zip(_other_indices(s.n, cert.r), cert.b, cert.c, cert.d)
    ]
    if r is not None:
        payload = certificates[0].to_dict()
    else:
        payload = {
            "spectrum": s.to_dict(),
            "L": [cert.L for cert in certificates],
            "all_negative": all(cert.L < 0 for cert in certificates),
            "certificates": [cert.to_dict() for cert in certificates],
        }
    logger.success(f"[CLI] L < 0 certified for {len(certificates)} index(es)")
    return CommandReport("certify", payload, columns, rows, title="L(r) certificate"), 0


@dataclass(frozen=True)
class TrialOutcome:
    n: int
    trial: int
    values: Tuple[Fraction, ...]
    L_values: Tuple[Fraction, ...]
    violation: Optional[str] = None
    error: Optional[str] = None


def run_trial(key: TrialKey, bound: int, tolerances: Tolerances) -> TrialOutcome:
    """Certify every r for one sampled spectrum."""
    s = spectrum_for_trial(key, bound)
    try:
        certificates = brito_inequality.certify_all(s, tolerances)
    except (VerificationFailure, IdentityViolation) as exc:
        return TrialOutcome(key.n, key.trial, s.values, (), str(exc), type(exc).__name__)
    return TrialOutcome(key.n, key.trial, s.values, tuple(c.L for c in certificates))


def _run_trials(keys: List[TrialKey], config: RunConfig) -> List[TrialOutcome]:
    if config.workers == 1:
        return [run_trial(k, config.rational_bound, config.tolerances) for k in keys]
    chunksize = max(1, len(keys) // (config.workers * 4))
    with ProcessPoolExecutor(max_workers=config.workers) as executor:
        return list(executor.map(
            run_trial, keys, repeat(config.rational_bound), repeat(config.tolerances), chunksize=chunksize,
        ))


def cmd_scan(config: RunConfig) -> CommandResult:
    keys = list(trial_keys(config.seed, config.n_values, config.trials))
    logger.info(
        f"[Scan] {config.trials} trials for n in {config.n_range[0]}..{config.n_range[1]} "
        f"(seed {config.seed}, bound {config.rational_bound}, {config.workers} worker(s))"
    )
    started = time.perf_counter()
    outcomes = _run_trials(keys, config)
    elapsed = time.perf_counter() - started

    rows = []
    per_n: Dict[int, Dict[str, Any]] = {}
    violations = []
    for n in config.n_values:
        batch = [o for o in outcomes if o.n == n]
        L_values = [L for o in batch for L in o.L_values]
        bad = [o for o in batch if o.violation]
        per_n[n] = {
            "trials": len(batch),
            "certificates": len(L_values),
            "violations": len(bad),
            "min_L": min(L_values) if L_values else None,
            "max_L": max(L_values) if L_values else None,
        }
        rows.append([n, len(batch), len(L_values), len(bad), per_n[n]["min_L"], per_n[n]["max_L"]])
        violations.extend(bad)

    all_L = [L for o in outcomes for L in o.L_values]
    payload = {
        "seed": config.seed,
        "trials": config.trials,
        "n_range": list(config.n_range),
        "rational_bound": config.rational_bound,
        "certificates": len(all_L),
        "violations": len(violations),
        "min_L": min(all_L) if all_L else None,
        "max_L": max(all_L) if all_L else None,
        "per_n": {str(n): stats for n, stats in per_n.items()},
        "offending": [
            {"n": o.n, "trial": o.trial, "spectrum": list(o.values), "error": o.error, "message": o.violation}
            for o in violations
        ],
    }
    logger.info(f"[Scan] {len(outcomes)} spectra, {len(all_L)} certificates in {elapsed:.2f}s")
    report = CommandReport(
        "scan", payload,
        ["n", "trials", "certificates", "violations", "min_L", "max_L"], rows,
        title="L(r) < 0 scan",
    )
    if violations:
        for o in violations:
            logger.error(f"[Scan] violation n={o.n} trial={o.trial} λ={format_values(o.values)}: {o.violation}")
        return report, VerificationFailure.exit_code
    logger.success("[Scan] no violations")
    return report, 0


def cmd_derivatives(lambdas: str, f_j: str, config: RunConfig) -> CommandResult:
    s = Spectrum(tuple(parse_values(lambdas, config.kind)), config.kind, config.tolerances.distinctness)
    f = parse_values(f_j, config.kind)
    if len(f) != 1:
        raise ParseError(f"--fj takes a single value, got {len(f)}")
    tol = config.tolerances

    generic = vandermonde.solve_derivatives_generic(s, f[0], tol)
    closed = vandermonde.derivatives_closed_form(s, f[0])
    cofactor = vandermonde.derivatives_cofactor_form(s, f[0], tol)
    discrepancy = max(
        vandermonde.max_discrepancy(generic, closed),
        vandermonde.max_discrepancy(generic, cofactor),
        vandermonde.max_discrepancy(closed, cofactor),
    )
    moments = vandermonde.moments_hold(s, closed, tol)

    if s.kind is ScalarKind.EXACT:
        if discrepancy != 0 or not moments:
            raise IdentityViolation(
                f"derivative paths disagree by {discrepancy} on λ={format_values(s.values)}"
            )
    elif discrepancy > tol.residual:
        logger.warning(f"[Vandermonde] float paths disagree by {discrepancy:.3e}")

    payload = {
        "spectrum": s.to_dict(),
        "f_j": generic.f_j,
        "generic": generic.to_dict(),
        "closed_form": closed.to_dict(),
        "cofactor": cofactor.to_dict(),
        "vandermonde_det": vandermonde.vandermonde_det(s, tol),
        "max_discrepancy": discrepancy,
        "moments_hold": moments,
        "signs_alternate": vandermonde.signs_alternate(s, closed),
    }
    rows = [
        [i, lam, g, c, k]
        for i, (lam, g, c, k) in enumerate(
            zip(s.values, generic.lambda_derivs, closed.lambda_derivs, cofactor.lambda_derivs), start=1
        )
    ]
    return CommandReport(
        "derivatives", payload, ["i", "lambda", "generic", "closed_form", "cofactor"], rows,
        title="Eigenvalue derivatives",
    ), 0


def cmd_stokes(lambdas: str, f: str, config: RunConfig) -> CommandResult:
    s = Spectrum(tuple(parse_values(lambdas, config.kind)), config.kind, config.tolerances.distinctness)
    g = stokes_quantity.GradientData.for_spectrum(s, parse_values(f, config.kind))
    tol = config.tolerances

    via_l = stokes_quantity.A_via_L(s, g)
    via_sum = stokes_quantity.A_via_triple_sum(s, g)
    if s.kind is ScalarKind.EXACT:
        if via_l != via_sum:
            raise IdentityViolation(f"A via L(r) = {via_l} but triple sum = {via_sum}")
    elif not math.isclose(via_l, via_sum, rel_tol=tol.residual, abs_tol=tol.strictness_margin):
        logger.warning(f"[Stokes] float A paths disagree: {via_l!r} vs {via_sum!r}")
    verdict = stokes_quantity.rigidity_verdict(s, g, tol)

    L_values = [brito_inequality.L_direct(s, r) for r in range(1, s.n + 1)]
    payload = {
        "spectrum": s.to_dict(),
        "gradient": g.to_dict(),
        "A": verdict.A,
        "A_via_L": via_l,
        "A_via_triple_sum": via_sum,
        "L": L_values,
        **{k: v for k, v in verdict.to_dict().items() if k != "A"},
    }
    rows = [
        [r, lam, f_r, L, L * f_r * f_r]
        for r, (lam, f_r, L) in enumerate(zip(s.values, g.f, L_values), start=1)
    ]
    return CommandReport(
        "stokes", payload, ["r", "lambda", "f", "L", "L_f_sq"], rows, title="Stokes quantity",
    ), 0


def cmd_isoparametric(
    n: int,
    g: int,
    multiplicities: Optional[str],
    samples: Optional[int],
    minimal: bool,
    config: RunConfig,
) -> CommandResult:
    if multiplicities:
        m = parse_int_list(multiplicities)
    elif n == g:
        m = [1] * g
    else:
        raise InvalidRange(f"n = {n} and g = {g} differ; pass --m with the multiplicities")
    fam = hypersurface_models.IsoparametricFamily(n=n, g=g, multiplicities=tuple(m))
    tol = config.tolerances

    if minimal:
        theta = hypersurface_models.find_minimal_theta(fam, tol)
        report = hypersurface_models.curvature_report(fam, theta, tol)
        payload = {
            "family": fam.to_dict(),
            "minimal": True,
            "theta_star": theta,
            "theta_star_over_pi": theta / math.pi,
            **{k: v for k, v in report.to_dict().items() if k != "theta"},
        }
        rows = [_curvature_row(report)]
        logger.success(f"[Isoparametric] minimal member at θ* = {theta!r}, S = {report.S!r}")
        return CommandReport(
            "isoparametric", payload, _curvature_columns(n), rows, title="Minimal isoparametric member",
        ), 0

    count = samples if samples is not None else int(load_settings()["isoparametric"]["samples"])
    remark = hypersurface_models.verify_remark(fam, count, tol)
    payload = {
        "family": fam.to_dict(),
        "samples": len(remark.rows),
        "max_abs_R": remark.max_abs_R,
        "tolerance": remark.tolerance,
        "holds": remark.holds,
        "simple": fam.is_simple,
    }
    rows = [_curvature_row(row) for row in remark.rows]
    out = CommandReport(
        "isoparametric", payload, _curvature_columns(n), rows, title="Scalar curvature along the family",
    )
    if fam.is_simple and not remark.holds:
        logger.error(f"[Isoparametric] max|R| = {remark.max_abs_R!r} exceeds {remark.tolerance:g}")
        return out, VerificationFailure.exit_code
    return out, 0


def _curvature_columns(n: int) -> List[str]:
    return ["theta"] + [f"l{i}" for i in range(1, n + 1)] + ["H", "S", "R"]


def _curvature_row(report: hypersurface_models.CurvatureReport) -> List[Any]:
    return [report.theta, *report.lambdas, report.H, report.S, report.R]


def cmd_clifford(n: int, r: int, config: RunConfig) -> CommandResult:
    tol = config.tolerances
    profile = hypersurface_models.clifford_torus_spectrum(n, r)
    sums = profile.power_sums(2)
    fam = hypersurface_models.clifford_family(n, r)
    theta = hypersurface_models.find_minimal_theta(fam, tol)
    closed_theta = math.atan(math.sqrt(r / (n - r)))
    p1, p2 = sums.p_k(1), sums.p_k(2)
    payload = {
        "n": n,
        "r": r,
        "profile": profile.to_dict(),
        "spectrum": list(profile.expanded()),
        "p1": p1,
        "p2": p2,
        "S": p2,
        "S_minus_n": p2 - n,
        "theta_star": theta,
        "theta_star_closed_form": closed_theta,
        "tolerance": tol.clifford,
        "holds": abs(p1) <= tol.clifford and abs(p2 - n) <= tol.clifford,
    }
    rows = [[v, m] for v, m in zip(profile.values, profile.multiplicities)]
    if not payload["holds"]:
        logger.error(f"[Isoparametric] Clifford torus n={n} r={r}: p1={p1!r}, p2={p2!r}")
        return CommandReport("clifford", payload, ["value", "multiplicity"], rows), VerificationFailure.exit_code
    return CommandReport(
        "clifford", payload, ["value", "multiplicity"], rows, title="Minimal Clifford torus",
    ), 0


def cmd_multiplicities(values: str, c: str, config: RunConfig) -> CommandResult:
    lam = parse_values(values, config.kind)
    rhs = parse_values(c, config.kind)
    profile = solve_multiplicities(len(lam), lam, rhs, config.tolerances)
    payload = {"c": rhs, "profile": profile.to_dict()}
    rows = [[v, m] for v, m in zip(profile.values, profile.multiplicities)]
    return CommandReport(
        "multiplicities", payload, ["value", "multiplicity"], rows, title="Recovered multiplicities",
    ), 0


def cmd_cases(n_max: int, config: RunConfig) -> CommandResult:
    if n_max < 1:
        raise InvalidRange(f"n_max must be positive, got {n_max}")
    cases = hypersurface_models.corollary_cases(n_max)
    payload = {"n_max": n_max, "cases": [{"n": n, "g": g} for n, g in cases]}
    return CommandReport("cases", payload, ["n", "g"], [list(case) for case in cases], title="Possible cases"), 0


# =============================================================================
# PARSER
# =============================================================================

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", choices=OUTPUT_FORMATS, default="json", help="Report format.")
    common.add_argument("--out", type=str, default=None, help="Write the report to FILE instead of stdout.")
    common.add_argument("--seed", type=int, default=None, help=f"RNG seed (falls back to ${SEED_ENV}).")
    common.add_argument("--workers", type=int, default=None, help="Worker processes for scans.")
    common.add_argument("--log-level", choices=LOG_LEVELS, default=None, help="Console log level.")

    kinds = argparse.ArgumentParser(add_help=False)
    kinds.add_argument("--kind", choices=["exact", "float"], default="exact", help="Scalar kind.")

    parser = argparse.ArgumentParser(
        prog="rigidity-kit",
        description="Verify the algebra behind the constant-eigenvalue rigidity theorem.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("certify", parents=[common], help="Certify L(r) < 0 for one spectrum.")
    p.add_argument("--lambdas", required=True, help="Comma-separated rationals, e.g. 0,1/2,3.")
    p.add_argument("--r", type=int, default=None, help="1-based index; every r when omitted.")

    p = sub.add_parser("scan", parents=[common], help="Certify random rational spectra.")
    p.add_argument("--n", dest="n_range", default=None, help="n range such as 3..6.")
    p.add_argument("--trials", type=int, default=None, help="Spectra per n.")
    p.add_argument("--bound", type=int, default=None, help="Max |numerator| and denominator.")

    p = sub.add_parser("derivatives", parents=[common, kinds], help="Solve the Vandermonde system.")
    p.add_argument("--lambdas", required=True)
    p.add_argument("--fj", required=True, help="Driving component f_j.")

    p = sub.add_parser("stokes", parents=[common, kinds], help="Evaluate the Stokes quantity A.")
    p.add_argument("--lambdas", required=True)
    p.add_argument("--f", required=True, help="Comma-separated f_1..f_n.")

    p = sub.add_parser("isoparametric", parents=[common], help="Scalar curvature of an isoparametric family.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--g", type=int, required=True)
    p.add_argument("--m", default=None, help="Comma-separated multiplicities (all 1 when n = g).")
    p.add_argument("--samples", type=int, default=None)
    p.add_argument("--minimal", action="store_true", help="Report the minimal member only.")

    p = sub.add_parser("clifford", parents=[common], help="Minimal Clifford torus power sums.")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--r", type=int, required=True)

    p = sub.add_parser("multiplicities", parents=[common, kinds], help="Recover multiplicities.")
    p.add_argument("--values", required=True)
    p.add_argument("--c", required=True, help="Power sums c_1..c_g.")

    p = sub.add_parser("cases", parents=[common], help="Simple-curvature cases of the corollary.")
    p.add_argument("--n-max", type=int, default=N_MAX)

    return parser


COMMANDS: Dict[str, Callable[[argparse.Namespace, RunConfig], CommandResult]] = {
    "certify": lambda a, c: cmd_certify(a.lambdas, a.r, c),
    "scan": lambda a, c: cmd_scan(c),
    "derivatives": lambda a, c: cmd_derivatives(a.lambdas, a.fj, c),
    "stokes": lambda a, c: cmd_stokes(a.lambdas, a.f, c),
    "isoparametric": lambda a, c: cmd_isoparametric(a.n, a.g, a.m, a.samples, a.minimal, c),
    "clifford": lambda a, c: cmd_clifford(a.n, a.r, c),
    "multiplicities": lambda a, c: cmd_multiplicities(a.values, a.c, c),
    "cases": lambda a, c: cmd_cases(a.n_max, c),
}


def execute(args: argparse.Namespace, stream=None) -> int:
    """Run a parsed command, write its report and return the exit code."""
    try:
        config = build_config(args)
        report, code = COMMANDS[args.command](args, config)
    except RigidityError as exc:
        logger.error(f"[CLI] {type(exc).__name__}: {exc}")
        return exc.exit_code
    write_report(report, config.output_format, config.out, stream)
    return code


def run(argv: Optional[Sequence[str]] = None, stream=None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    return execute(args, stream)
