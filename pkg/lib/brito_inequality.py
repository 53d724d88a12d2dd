"""
Fundamental Inequality Module

For n >= 3 distinct reals λ_1..λ_n and a distinguished index r,

    L(r) = Σ_{p≠q; p,q≠r} 1 / [(λ_r-λ_p)(λ_r-λ_q) Π_{k≠p}(λ_k-λ_p) Π_{l≠q}(λ_l-λ_q)]

is strictly negative. This module evaluates L(r) by definition and through
the substitution b_p = 1/(λ_p-λ_r), checks every identity the argument
passes through (the interpolation polynomial H, the coefficient identity
B = Σd_p = Σb_p) and replays the exponential bound chain, collecting the
whole trail into an InequalityCertificate.

The sum runs over ordered pairs (p, q), so each unordered pair counts twice.
Indices r, p, q are 1-based everywhere in the public API.

Load-bearing checks run in exact rationals. The exponential chain needs
exp() and therefore runs in float64 with a strictness margin; it is
informative, the exact conclusion L < 0 is not.
"""

import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from lib import polynomials
from lib.errors import (
    BoundViolation,
    DegenerateSpectrum,
    IdentityViolation,
    IndexOutOfRange,
    InequalityViolation,
    UnsupportedKind,
)
from lib.settings import Tolerances, get_tolerances
from lib.spectral_core import (
    Scalar,
    ScalarKind,
    Spectrum,
    format_scalar,
    format_values,
    one,
    zero,
)


# =============================================================================
# DATA STRUCTURES
# =============================================================================

@dataclass(frozen=True)
class BCDTransform:
    """b, c, d values for one r, ordered by ascending p ≠ r."""
    r: int
    indices: Tuple[int, ...]
    b: Tuple[Scalar, ...]
    c: Tuple[Scalar, ...]
    d: Tuple[Scalar, ...]
    B: Scalar
    prod_b: Scalar

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "indices": list(self.indices),
            "b": list(self.b),
            "c": list(self.c),
            "d": list(self.d),
            "B": self.B,
            "prod_b": self.prod_b,
        }


@dataclass(frozen=True)
class InterpolationReport:
    """H(x) = Σ_q d_q Π_{k≠q,r}(x - b_k) and the identities it satisfies."""
    r: int
    h_coefficients: Tuple[Scalar, ...]
    lhs_coefficients: Tuple[Scalar, ...]   # x^(n-1) - H(x)
    rhs_coefficients: Tuple[Scalar, ...]   # Π_{k≠r}(x - b_k)
    node_checks: Tuple[Tuple[int, Scalar, Scalar], ...]  # (p, H(b_p), b_p^(n-1))
    flags: Dict[str, bool]

    @property
    def holds(self) -> bool:
        return all(self.flags.values())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "H_coefficients": list(self.h_coefficients),
            "lhs_coefficients": list(self.lhs_coefficients),
            "rhs_coefficients": list(self.rhs_coefficients),
            "node_checks": [
                {"p": p, "H_at_b_p": h, "b_p_pow": power} for p, h, power in self.node_checks
            ],
            "flags": dict(self.flags),
        }


@dataclass(frozen=True)
class BoundCheck:
    """One float inequality lhs < rhs (or lhs <= rhs) of the exponential chain."""
    label: str
    k: Optional[int]
    lhs: float
    rhs: float
    strict: bool
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "label": self.label,
            "k": self.k,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "strict": self.strict,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class BoundReport:
    r: int
    branch: str            # "max" when B > 0, "min" when B <= 0
    p0: int
    b_p0: Scalar
    B: Scalar
    d_p0: Scalar
    checks: Tuple[BoundCheck, ...]
    d_dominates_B: bool
    sum_d_sq_exceeds_B_sq: bool

    @property
    def holds(self) -> bool:
        return all(c.holds for c in self.checks) and self.d_dominates_B and self.sum_d_sq_exceeds_B_sq

    def to_dict(self) -> Dict[str, Any]:
        return {
            "r": self.r,
            "branch": self.branch,
            "p0": self.p0,
            "b_p0": self.b_p0,
            "B": self.B,
            "d_p0": self.d_p0,
            "checks": [c.to_dict() for c in self.checks],
            "d_dominates_B": self.d_dominates_B,
            "sum_d_sq_exceeds_B_sq": self.sum_d_sq_exceeds_B_sq,
            "holds": self.holds,
        }


@dataclass(frozen=True)
class InequalityCertificate:
    """Audit trail of L(r) < 0 for one exact spectrum and one r."""
    spectrum: Spectrum
    r: int
    b: Tuple[Scalar, ...]
    c: Tuple[Scalar, ...]
    d: Tuple[Scalar, ...]
    B: Scalar
    sum_d_sq: Scalar
    L_direct: Scalar
    L_factored: Scalar
    L_via_c: Scalar
    identity_flags: Dict[str, bool]
    interpolation: InterpolationReport
    bound_chain: BoundReport

    @property
    def L(self) -> Scalar:
        return self.L_direct

    @property
    def all_flags_true(self) -> bool:
        return all(self.identity_flags.values()) and self.bound_chain.holds

    def to_dict(self) -> Dict[str, Any]:
        return {
            "spectrum": self.spectrum.to_dict(),
            "r": self.r,
            "L": self.L_direct,
            "L_direct": self.L_direct,
            "L_factored": self.L_factored,
            "L_via_c": self.L_via_c,
            "negative": self.L_direct < 0,
            "b": list(self.b),
            "c": list(self.c),
            "d": list(self.d),
            "B": self.B,
            "sum_d_sq": self.sum_d_sq,
            "identity_flags": dict(self.identity_flags),
            "interpolation": self.interpolation.to_dict(),
            "bound_chain": self.bound_chain.to_dict(),
        }


# =============================================================================
# HELPERS
# =============================================================================

def _check_input(s: Spectrum, r: int):
    if s.n < 3:
        raise DegenerateSpectrum(f"L(r) needs n >= 3 (the defining sum is empty for n = {s.n})")
    if not 1 <= r <= s.n:
        raise IndexOutOfRange(f"r = {r} outside 1..{s.n}")


def _prod(terms: Sequence[Scalar], kind: ScalarKind) -> Scalar:
    acc = one(kind)
    for t in terms:
        acc = acc * t
    return acc


def _sum(terms: Sequence[Scalar], kind: ScalarKind) -> Scalar:
    acc = zero(kind)
    for t in terms:
        acc = acc + t
    return acc


def _node_product(values: Sequence[Scalar], p: int, kind: ScalarKind) -> Scalar:
    """Π_{k≠p}(λ_k - λ_p), 0-based p."""
    return _prod([values[k] - values[p] for k in range(len(values)) if k != p], kind)


def _agree(a: Scalar, b: Scalar, kind: ScalarKind, tol: Tolerances) -> bool:
    if kind is ScalarKind.EXACT:
        return a == b
    return math.isclose(a, b, rel_tol=tol.residual, abs_tol=tol.strictness_margin)


def _agree_coefficients(a: Sequence[Scalar], b: Sequence[Scalar], kind: ScalarKind, tol: Tolerances) -> bool:
    size = max(len(a), len(b))
    return all(
        _agree(polynomials.coefficient(a, i), polynomials.coefficient(b, i), kind, tol)
        for i in range(size)
    )


# =============================================================================
# L(r) THREE WAYS
# =============================================================================

def L_direct(s: Spectrum, r: int) -> Scalar:
    """L(r) summed straight from its definition over ordered pairs."""
    _check_input(s, r)
    lam, kind = s.values, s.kind
    ir = r - 1
    others = [p for p in range(s.n) if p != ir]
    weights = {p: _node_product(lam, p, kind) for p in others}
    total = zero(kind)
    for p in others:
        for q in others:
            if p == q:
                continue
            denom = (lam[ir] - lam[p]) * (lam[ir] - lam[q]) * weights[p] * weights[q]
            total = total + one(kind) / denom
    return total


def transform_bcd(s: Spectrum, r: int, tolerances: Optional[Tolerances] = None) -> BCDTransform:
    """b_p = 1/(λ_p-λ_r), c_p, d_p = b_p^(n-1)/Π_{k≠p,r}(b_p-b_k) and B = Σd_p.

    Asserts c_p = d_p · Π_{k≠r} b_k for every p.
    """
    _check_input(s, r)
    tol = get_tolerances(tolerances)
    lam, kind, n = s.values, s.kind, s.n
    ir = r - 1
    others = [p for p in range(n) if p != ir]

    b = {p: one(kind) / (lam[p] - lam[ir]) for p in others}
    c = {p: one(kind) / ((lam[ir] - lam[p]) * _node_product(lam, p, kind)) for p in others}
    d = {
        p: b[p] ** (n - 1) / _prod([b[p] - b[k] for k in others if k != p], kind)
        for p in others
    }
    prod_b = _prod([b[p] for p in others], kind)
    for p in others:
        if not _agree(c[p], d[p] * prod_b, kind, tol):
            raise IdentityViolation(
                f"c_{p + 1} = {format_scalar(c[p])} but d_{p + 1}·Πb = {format_scalar(d[p] * prod_b)}"
            )

    return BCDTransform(
        r=r,
        indices=tuple(p + 1 for p in others),
        b=tuple(b[p] for p in others),
        c=tuple(c[p] for p in others),
        d=tuple(d[p] for p in others),
        B=_sum([d[p] for p in others], kind),
        prod_b=prod_b,
    )


def _factored(t: BCDTransform, kind: ScalarKind) -> Scalar:
    sum_d_sq = _sum([x * x for x in t.d], kind)
    return t.prod_b * t.prod_b * (t.B * t.B - sum_d_sq)


def L_factored(s: Spectrum, r: int, tolerances: Optional[Tolerances] = None) -> Scalar:
    """(Π_{k≠r} b_k)² · [(Σ d_p)² - Σ d_p²]."""
    return _factored(transform_bcd(s, r, tolerances), s.kind)


def L_via_c(s: Spectrum, r: int, tolerances: Optional[Tolerances] = None) -> Scalar:
    """(Σ c_p)² - Σ c_p², the ordered-pair sum written through c_p."""
    t = transform_bcd(s, r, tolerances)
    sum_c = _sum(t.c, s.kind)
    return sum_c * sum_c - _sum([x * x for x in t.c], s.kind)


# =============================================================================
# INTERPOLATION IDENTITY
# =============================================================================

def check_interpolation_identity(
    s: Spectrum,
    r: int,
    tolerances: Optional[Tolerances] = None,
) -> InterpolationReport:
    """Build H(x) and check H(b_p) = b_p^(n-1), x^(n-1) - H(x) = Π(x - b_k), B = Σ b_p."""
    tol = get_tolerances(tolerances)
    t = transform_bcd(s, r, tol)
    kind, n = s.kind, s.n
    unit = one(kind)

    h: List[Scalar] = []
    for q, d_q in enumerate(t.d):
        roots = [b_k for k, b_k in enumerate(t.b) if k != q]
        h = polynomials.plus(h, polynomials.scale(polynomials.from_roots(roots, unit), d_q))

    lhs = polynomials.minus(polynomials.monomial(n - 1, unit), h)
    rhs = polynomials.from_roots(t.b, unit)

    node_checks = tuple(
        (p, polynomials.evaluate(h, b_p), b_p ** (n - 1)) for p, b_p in zip(t.indices, t.b)
    )
    sum_b = _sum(t.b, kind)
    flags = {
        "H_matches_powers": all(_agree(hv, pw, kind, tol) for _, hv, pw in node_checks),
        "polynomial_identity": _agree_coefficients(lhs, rhs, kind, tol),
        "B_equals_sum_b": _agree(t.B, sum_b, kind, tol),
    }
    report = InterpolationReport(
        r=r,
        h_coefficients=tuple(h),
        lhs_coefficients=tuple(lhs),
        rhs_coefficients=tuple(rhs),
        node_checks=node_checks,
        flags=flags,
    )
    if not report.holds:
        failed = [name for name, ok in flags.items() if not ok]
        raise IdentityViolation(
            f"interpolation identities {failed} failed for r={r}, λ={format_values(s.values)}"
        )
    return report


# =============================================================================
# EXPONENTIAL BOUND CHAIN
# =============================================================================

def _within(lhs: float, rhs: float, margin: float) -> bool:
    """lhs <= rhs up to a relative margin on rhs."""
    if math.isinf(rhs) and rhs > 0:
        return True
    return lhs - rhs <= margin * max(1.0, abs(rhs))


def verify_exponential_bound_chain(
    s: Spectrum,
    r: int,
    tolerances: Optional[Tolerances] = None,
) -> BoundReport:
    """Replay the bound chain that shows Σ d_p² > B².

    B > 0 picks p0 = argmax b_p; B <= 0 picks p0 = argmin b_p and mirrors
    every inequality (σ = -1). The chain is

        σ(b_p0 - b_k) < σ b_p0 exp(-b_k/b_p0)      for k ≠ p0, r
        σ B <= σ b_p0 exp(B/b_p0 - 1)

    whose product gives σ d_p0 > σ B, hence |d_p0| > |B|.
    """
    tol = get_tolerances(tolerances)
    t = transform_bcd(s, r, tol)
    kind = s.kind

    if t.B > 0:
        branch, sigma = "max", 1.0
        pos = max(range(len(t.b)), key=lambda i: t.b[i])
    else:
        branch, sigma = "min", -1.0
        pos = min(range(len(t.b)), key=lambda i: t.b[i])
    p0 = t.indices[pos]
    b_p0 = t.b[pos]
    d_p0 = t.d[pos]

    if sigma * b_p0 <= 0:
        raise BoundViolation(
            f"branch '{branch}' needs σ·b_p0 > 0, got b_p0 = {format_scalar(b_p0)} (r={r})"
        )

    fb = [float(x) for x in t.b]
    fb0 = float(b_p0)
    fB = float(t.B)
    margin = tol.strictness_margin
    checks: List[BoundCheck] = []

    with np.errstate(over="ignore", under="ignore"):
        for i, k in enumerate(t.indices):
            if i == pos:
                continue
            lhs = sigma * (fb0 - fb[i])
            rhs = float(sigma * fb0 * np.exp(-fb[i] / fb0))
            checks.append(BoundCheck(
                label="σ(b_p0 - b_k) < σ b_p0 exp(-b_k/b_p0)",
                k=k, lhs=lhs, rhs=rhs, strict=lhs < rhs, holds=_within(lhs, rhs, margin),
            ))
        lhs = sigma * fB
        rhs = float(sigma * fb0 * np.exp(fB / fb0 - 1.0))
        checks.append(BoundCheck(
            label="σB <= σ b_p0 exp(B/b_p0 - 1)",
            k=None, lhs=lhs, rhs=rhs, strict=lhs < rhs, holds=_within(lhs, rhs, margin),
        ))

    # conclusions are rational, so exact inputs get exact comparisons
    d_dominates = abs(d_p0) > abs(t.B) and (d_p0 > t.B if sigma > 0 else d_p0 < t.B)
    sum_d_sq = _sum([x * x for x in t.d], kind)
    exceeds = sum_d_sq > t.B * t.B

    report = BoundReport(
        r=r,
        branch=branch,
        p0=p0,
        b_p0=b_p0,
        B=t.B,
        d_p0=d_p0,
        checks=tuple(checks),
        d_dominates_B=d_dominates,
        sum_d_sq_exceeds_B_sq=exceeds,
    )
    if not report.holds:
        failed = [c.label + (f" (k={c.k})" if c.k else "") for c in checks if not c.holds]
        if not d_dominates:
            failed.append("|d_p0| > |B|")
        if not exceeds:
            failed.append("Σd² > B²")
        raise BoundViolation(f"bound chain failed for r={r}, λ={format_values(s.values)}: {failed}")
    for c in checks:
        if not c.strict:
            logger.warning(f"[Brito] {c.label} (k={c.k}) only holds within the margin: {c.lhs!r} vs {c.rhs!r}")
    return report


# =============================================================================
# CERTIFICATE
# =============================================================================

def certify(s: Spectrum, r: int, tolerances: Optional[Tolerances] = None) -> InequalityCertificate:
    """Run every check for (s, r) in exact arithmetic and assert L(r) < 0."""
    if s.kind is not ScalarKind.EXACT:
        raise UnsupportedKind("certification runs on exact-rational spectra only")
    _check_input(s, r)
    tol = get_tolerances(tolerances)

    direct = L_direct(s, r)
    t = transform_bcd(s, r, tol)
    factored = _factored(t, s.kind)
    sum_c = _sum(t.c, s.kind)
    via_c = sum_c * sum_c - _sum([x * x for x in t.c], s.kind)
    interpolation = check_interpolation_identity(s, r, tol)
    bounds = verify_exponential_bound_chain(s, r, tol)

    flags = {
        "L_direct_equals_L_factored": direct == factored,
        "L_direct_equals_L_via_c": direct == via_c,
        "c_equals_d_times_prod_b": all(c == d * t.prod_b for c, d in zip(t.c, t.d)),
        **interpolation.flags,
    }
    if not all(flags.values()):
        failed = [name for name, ok in flags.items() if not ok]
        raise IdentityViolation(f"identities {failed} failed for r={r}, λ={format_values(s.values)}")
    if not direct < 0:
        raise InequalityViolation(
            f"L({r}) = {format_scalar(direct)} is not negative for λ={format_values(s.values)}"
        )

    logger.debug(f"[Brito] λ={format_values(s.values)} r={r} L={format_scalar(direct)}")
    return InequalityCertificate(
        spectrum=s,
        r=r,
        b=t.b,
        c=t.c,
        d=t.d,
        B=t.B,
        sum_d_sq=_sum([x * x for x in t.d], s.kind),
        L_direct=direct,
        L_factored=factored,
        L_via_c=via_c,
        identity_flags=flags,
        interpolation=interpolation,
        bound_chain=bounds,
    )


def certify_all(s: Spectrum, tolerances: Optional[Tolerances] = None) -> List[InequalityCertificate]:
    """certify() for r = 1..n."""
    return [certify(s, r, tolerances) for r in range(1, s.n + 1)]
