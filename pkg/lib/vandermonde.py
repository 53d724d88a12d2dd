"""
Vandermonde Module

Eigenvalue derivatives λ_ij solve the system obtained by differentiating
the power-sum constraints p_1..p_(n-1) = const, p_n = f:

    D · (λ_1j, ..., λ_nj)^T = (0, ..., 0, f_j/n)^T,   D[k][i] = λ_i^k, k = 0..n-1

Three independent routes to the same vector are kept side by side:
elimination on D, the closed form (-1)^(n+1) (f_j/n) / Π_{k≠i}(λ_k-λ_i),
and the cofactor expression through det D.
"""

import math
import warnings
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from loguru import logger

from lib.errors import IdentityViolation, IllConditioned
from lib.settings import Tolerances, get_tolerances
from lib.spectral_core import (
    Scalar,
    ScalarKind,
    Spectrum,
    coerce,
    exact_determinant,
    exact_solve,
    format_scalar,
    one,
    zero,
)


@dataclass(frozen=True)
class DerivativeSolution:
    """(λ_1j..λ_nj) for one driving component f_j."""
    lambda_derivs: Tuple[Scalar, ...]
    f_j: Scalar
    kind: ScalarKind
    method: str
    residual: Optional[float] = None   # float kind only: max |D x - rhs|

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "f_j": self.f_j,
            "lambda_derivs": list(self.lambda_derivs),
            "residual": self.residual,
        }


# =============================================================================
# MATRIX AND DETERMINANT
# =============================================================================

def vandermonde_matrix(s: Spectrum) -> List[List[Scalar]]:
    """Row k (k = 0..n-1) is (λ_1^k, ..., λ_n^k)."""
    unit = one(s.kind)
    return [[unit * v ** k for v in s.values] for k in range(s.n)]


def vandermonde_det(s: Spectrum, tolerances: Optional[Tolerances] = None) -> Scalar:
    """γ = Π_{k>l}(λ_k - λ_l), cross-checked against elimination."""
    tol = get_tolerances(tolerances)
    gamma = one(s.kind)
    for k in range(s.n):
        for l in range(k):
            gamma = gamma * (s.values[k] - s.values[l])
    if gamma == 0:
        raise IdentityViolation("Vandermonde determinant vanished on a distinct spectrum")

    if s.kind is ScalarKind.EXACT:
        eliminated = exact_determinant(vandermonde_matrix(s))
        if eliminated != gamma:
            raise IdentityViolation(
                f"product formula {format_scalar(gamma)} != elimination {format_scalar(eliminated)}"
            )
    else:
        eliminated = float(np.linalg.det(np.array(vandermonde_matrix(s), dtype=float)))
        if not math.isclose(eliminated, gamma, rel_tol=tol.residual):
            logger.warning(
                f"[Vandermonde] det mismatch in float: product {gamma!r}, LU {eliminated!r}"
            )
    return gamma


# =============================================================================
# SOLUTION PATHS
# =============================================================================

def _rhs(s: Spectrum, f_j: Scalar) -> List[Scalar]:
    rhs = [zero(s.kind)] * s.n
    rhs[-1] = f_j / s.n
    return rhs


def residual_of(s: Spectrum, x: Sequence[Scalar], f_j: Scalar) -> Scalar:
    """max_k |Σ_i λ_i^k x_i - rhs_k|."""
    rhs = _rhs(s, f_j)
    worst = zero(s.kind)
    for row, target in zip(vandermonde_matrix(s), rhs):
        value = zero(s.kind)
        for a, xi in zip(row, x):
            value = value + a * xi
        worst = max(worst, abs(value - target))
    return worst


def solve_derivatives_generic(
    s: Spectrum,
    f_j: Any,
    tolerances: Optional[Tolerances] = None,
) -> DerivativeSolution:
    """Solve D x = (0, ..., 0, f_j/n) by elimination.

    Exact kind uses sympy LU over rationals. Float kind uses LAPACK's
    partial-pivot solve and records the residual; clustered nodes make D
    badly conditioned, which surfaces as an IllConditioned warning.
    """
    tol = get_tolerances(tolerances)
    f_j = coerce(f_j, s.kind)
    matrix = vandermonde_matrix(s)
    rhs = _rhs(s, f_j)

    if s.kind is ScalarKind.EXACT:
        x = tuple(exact_solve(matrix, rhs))
        return DerivativeSolution(x, f_j, s.kind, "generic")

    x = tuple(float(v) for v in np.linalg.solve(np.array(matrix, dtype=float), np.array(rhs, dtype=float)))
    residual = float(residual_of(s, x, f_j))
    if residual > tol.residual:
        message = f"Vandermonde residual {residual:.3e} exceeds {tol.residual:g} for n={s.n}"
        logger.warning(f"[Vandermonde] {message}")
        warnings.warn(message, IllConditioned, stacklevel=2)
    return DerivativeSolution(x, f_j, s.kind, "generic", residual)


def derivatives_closed_form(s: Spectrum, f_j: Any) -> DerivativeSolution:
    """λ_ij = (-1)^(n+1) · (f_j/n) · 1/Π_{k≠i}(λ_k - λ_i)."""
    f_j = coerce(f_j, s.kind)
    lam, n = s.values, s.n
    sign = 1 if (n + 1) % 2 == 0 else -1
    derivs = []
    for i in range(n):
        node = one(s.kind)
        for k in range(n):
            if k != i:
                node = node * (lam[k] - lam[i])
        derivs.append(sign * (f_j / n) / node)
    residual = None if s.kind is ScalarKind.EXACT else float(residual_of(s, derivs, f_j))
    return DerivativeSolution(tuple(derivs), f_j, s.kind, "closed_form", residual)


def derivatives_cofactor_form(
    s: Spectrum,
    f_j: Any,
    tolerances: Optional[Tolerances] = None,
) -> DerivativeSolution:
    """λ_ij = (-1)^(i+n) · f_j/(n γ) · Π_{k>l; k,l≠i}(λ_k - λ_l), i 1-based.

    The cofactor of the last-row entry of D is the Vandermonde determinant
    of the remaining nodes.
    """
    f_j = coerce(f_j, s.kind)
    gamma = vandermonde_det(s, tolerances)
    lam, n = s.values, s.n
    derivs = []
    for i in range(n):
        minor = one(s.kind)
        rest = [lam[k] for k in range(n) if k != i]
        for k in range(len(rest)):
            for l in range(k):
                minor = minor * (rest[k] - rest[l])
        sign = 1 if (i + 1 + n) % 2 == 0 else -1
        derivs.append(sign * f_j / (n * gamma) * minor)
    residual = None if s.kind is ScalarKind.EXACT else float(residual_of(s, derivs, f_j))
    return DerivativeSolution(tuple(derivs), f_j, s.kind, "cofactor", residual)


# =============================================================================
# CHECKS
# =============================================================================

def moment_residuals(s: Spectrum, solution: DerivativeSolution) -> List[Scalar]:
    """Σ_i λ_i^t λ_ij - target_t for t = 0..n-1 (targets 0, ..., 0, f_j/n)."""
    rhs = _rhs(s, solution.f_j)
    out = []
    for row, target in zip(vandermonde_matrix(s), rhs):
        value = zero(s.kind)
        for a, x in zip(row, solution.lambda_derivs):
            value = value + a * x
        out.append(value - target)
    return out


def moments_hold(s: Spectrum, solution: DerivativeSolution, tolerances: Optional[Tolerances] = None) -> bool:
    tol = get_tolerances(tolerances)
    residuals = moment_residuals(s, solution)
    if s.kind is ScalarKind.EXACT:
        return all(r == 0 for r in residuals)
    return all(abs(r) <= tol.residual for r in residuals)


def max_discrepancy(a: DerivativeSolution, b: DerivativeSolution) -> Scalar:
    """max_i |a_i - b_i|."""
    return max(abs(x - y) for x, y in zip(a.lambda_derivs, b.lambda_derivs))


def signs_alternate(s: Spectrum, solution: DerivativeSolution) -> bool:
    """On an increasing spectrum with f_j != 0, consecutive λ_ij alternate in sign."""
    derivs = solution.lambda_derivs
    return all((x > 0) != (y > 0) for x, y in zip(derivs, derivs[1:]))
