"""
Hypersurface Models

Isoparametric hypersurfaces of the unit sphere S^(n+1) come in one-parameter
families of parallel tubes. A family with g distinct principal curvatures
(g ∈ {1, 2, 3, 4, 6}) and tube angle θ ∈ (0, π/g) has curvatures

    cot(θ + (k-1)π/g),   k = 1..g

with multiplicities m_k, m_k = m_(k+2) (indices mod g). This module builds
those spectra, the Clifford tori (g = 2, minimal), and the scalar curvature
from the Gauss equation R = n(n-1) + H² - S, H = p_1, S = p_2.

Everything here is float64: cotangents are irrational.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from loguru import logger
from scipy import optimize

from lib.errors import ConvergenceFailure, InvalidRange, PoleProximity
from lib.settings import Tolerances, get_tolerances
from lib.spectral_core import (
    MultiplicityProfile,
    ScalarKind,
    Spectrum,
    solve_multiplicities,
)

# Possible numbers of distinct principal curvatures
ALLOWED_G = (1, 2, 3, 4, 6)


# =============================================================================
# DATA STRUCTURES
# =============================================================================

@dataclass(frozen=True)
class IsoparametricFamily:
    n: int
    g: int
    multiplicities: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "multiplicities", tuple(int(m) for m in self.multiplicities))
        if self.g not in ALLOWED_G:
            raise InvalidRange(f"g = {self.g} is not one of {ALLOWED_G}")
        if len(self.multiplicities) != self.g:
            raise InvalidRange(f"g = {self.g} needs {self.g} multiplicities, got {len(self.multiplicities)}")
        if any(m < 1 for m in self.multiplicities):
            raise InvalidRange(f"multiplicities must be positive, got {list(self.multiplicities)}")
        if sum(self.multiplicities) != self.n:
            raise InvalidRange(f"multiplicities {list(self.multiplicities)} do not sum to n = {self.n}")
        m = self.multiplicities
        if any(m[i] != m[(i + 2) % self.g] for i in range(self.g)):
            raise InvalidRange(f"multiplicities {list(m)} break the m_k = m_(k+2) pattern")

    @classmethod
    def simple(cls, g: int) -> "IsoparametricFamily":
        """All curvatures simple: n = g."""
        return cls(n=g, g=g, multiplicities=(1,) * g)

    @property
    def is_simple(self) -> bool:
        return all(m == 1 for m in self.multiplicities)

    @property
    def theta_domain(self) -> Tuple[float, float]:
        return (0.0, math.pi / self.g)

    def trimmed_domain(self, tolerances: Optional[Tolerances] = None) -> Tuple[float, float]:
        margin = get_tolerances(tolerances).pole_margin
        lo, hi = self.theta_domain
        return (lo + margin, hi - margin)

    def to_dict(self) -> Dict[str, Any]:
        return {"n": self.n, "g": self.g, "multiplicities": list(self.multiplicities)}


@dataclass(frozen=True)
class CurvatureReport:
    theta: float
    lambdas: Tuple[float, ...]
    H: float
    S: float
    R: float

    def to_dict(self) -> Dict[str, Any]:
        return {
            "theta": self.theta,
            "lambdas": list(self.lambdas),
            "H": self.H,
            "S": self.S,
            "R": self.R,
        }


@dataclass(frozen=True)
class RemarkReport:
    family: IsoparametricFamily
    rows: Tuple[CurvatureReport, ...]
    max_abs_R: float
    tolerance: float

    @property
    def holds(self) -> bool:
        return self.max_abs_R <= self.tolerance

    def to_dict(self) -> Dict[str, Any]:
        return {
            "family": self.family.to_dict(),
            "samples": len(self.rows),
            "max_abs_R": self.max_abs_R,
            "tolerance": self.tolerance,
            "holds": self.holds,
            "rows": [row.to_dict() for row in self.rows],
        }


# =============================================================================
# SPECTRA
# =============================================================================

def principal_curvatures(
    fam: IsoparametricFamily,
    theta: float,
    tolerances: Optional[Tolerances] = None,
) -> MultiplicityProfile:
    """The g values cot(θ + (k-1)π/g) with the family's multiplicities."""
    tol = get_tolerances(tolerances)
    lo, hi = fam.trimmed_domain(tol)
    if not lo <= theta <= hi:
        raise PoleProximity(
            f"θ = {theta!r} is within {tol.pole_margin:g} of a pole; admissible range is [{lo!r}, {hi!r}]"
        )
    angles = theta + np.arange(fam.g) * math.pi / fam.g
    values = 1.0 / np.tan(angles)
    return MultiplicityProfile(tuple(float(v) for v in values), fam.multiplicities, ScalarKind.FLOAT, tol.distinctness)


def principal_spectrum(
    fam: IsoparametricFamily,
    theta: float,
    tolerances: Optional[Tolerances] = None,
) -> Spectrum:
    """Expanded curvatures as a Spectrum; simple families only."""
    return principal_curvatures(fam, theta, tolerances).spectrum()


def gauss_scalar_curvature(s: Union[Spectrum, Sequence[float]], n: int) -> float:
    """R = n(n-1) + (Σλ_i)² - Σλ_i² for a hypersurface of the unit sphere.

    Summed as n(n-1) + 2 Σ_{i<j} λ_i λ_j: near a pole H² and S are both
    huge and their difference would lose every significant digit.
    """
    values = np.asarray([float(v) for v in s], dtype=float)
    if values.size != n:
        raise InvalidRange(f"expected {n} principal curvatures, got {values.size}")
    i, j = np.triu_indices(n, k=1)
    return math.fsum([float(n * (n - 1)), *(2.0 * values[i] * values[j])])


def curvature_report(
    fam: IsoparametricFamily,
    theta: float,
    tolerances: Optional[Tolerances] = None,
) -> CurvatureReport:
    lambdas = principal_curvatures(fam, theta, tolerances).expanded()
    h = math.fsum(lambdas)
    squared = math.fsum(v * v for v in lambdas)
    return CurvatureReport(
        theta=float(theta),
        lambdas=tuple(lambdas),
        H=h,
        S=squared,
        R=gauss_scalar_curvature(lambdas, fam.n),
    )


def clifford_torus_spectrum(n: int, r: int) -> MultiplicityProfile:
    """Minimal Clifford torus S^r(√(r/n)) x S^(n-r)(√((n-r)/n)) in S^(n+1).

    √((n-r)/r) with multiplicity r and -√(r/(n-r)) with multiplicity n-r.
    """
    if not 0 < r < n:
        raise InvalidRange(f"Clifford torus needs 0 < r < n, got n = {n}, r = {r}")
    return MultiplicityProfile(
        (math.sqrt((n - r) / r), -math.sqrt(r / (n - r))),
        (r, n - r),
        ScalarKind.FLOAT,
    )


def clifford_family(n: int, r: int) -> IsoparametricFamily:
    """The g = 2 family through the Clifford torus with factor dimensions r, n-r."""
    if not 0 < r < n:
        raise InvalidRange(f"Clifford torus needs 0 < r < n, got n = {n}, r = {r}")
    return IsoparametricFamily(n=n, g=2, multiplicities=(r, n - r))


# =============================================================================
# MINIMAL MEMBER
# =============================================================================

def mean_curvature(fam: IsoparametricFamily, theta: float, tolerances: Optional[Tolerances] = None) -> float:
    """p_1(θ) = Σ_k m_k cot(θ + (k-1)π/g)."""
    return math.fsum(principal_curvatures(fam, theta, tolerances).expanded())


def find_minimal_theta(fam: IsoparametricFamily, tolerances: Optional[Tolerances] = None) -> float:
    """Unique θ* in (0, π/g) with p_1(θ*) = 0.

    p_1 falls strictly from +∞ to -∞ across the domain, so bisection on the
    pole-trimmed interval brackets exactly one root.
    """
    tol = get_tolerances(tolerances)
    lo, hi = fam.trimmed_domain(tol)
    f = lambda t: mean_curvature(fam, t, tol)
    if not f(lo) > 0 > f(hi):
        raise ConvergenceFailure(f"p_1 does not change sign on [{lo!r}, {hi!r}]")
    root, result = optimize.bisect(
        f, lo, hi,
        xtol=tol.bisection_xtol,
        maxiter=tol.bisection_max_iter,
        full_output=True,
        disp=False,
    )
    if not result.converged:
        raise ConvergenceFailure(
            f"bisection stopped after {result.iterations} iterations ({result.flag})"
        )
    logger.debug(f"[Isoparametric] n={fam.n} g={fam.g}: θ* = {root!r} after {result.iterations} steps")
    return float(root)


# =============================================================================
# VERIFICATION
# =============================================================================

def sample_thetas(fam: IsoparametricFamily, sample_count: int, tolerances: Optional[Tolerances] = None) -> List[float]:
    """Midpoints of sample_count equal cells of the pole-trimmed domain."""
    if sample_count < 1:
        raise InvalidRange(f"sample count must be positive, got {sample_count}")
    lo, hi = fam.trimmed_domain(tolerances)
    edges = np.linspace(lo, hi, sample_count + 1)
    return [float(t) for t in (edges[:-1] + edges[1:]) / 2]


def verify_remark(
    fam: IsoparametricFamily,
    sample_count: int,
    tolerances: Optional[Tolerances] = None,
) -> RemarkReport:
    """max |R(θ)| over sampled members; zero for every simple family."""
    tol = get_tolerances(tolerances)
    if not fam.is_simple:
        logger.info(
            f"[Isoparametric] multiplicities {list(fam.multiplicities)} are not all 1; "
            "R = 0 is not expected for this family"
        )
    rows = tuple(curvature_report(fam, theta, tol) for theta in sample_thetas(fam, sample_count, tol))
    max_abs_r = max(abs(row.R) for row in rows)
    report = RemarkReport(family=fam, rows=rows, max_abs_R=max_abs_r, tolerance=tol.remark)
    logger.info(
        f"[Isoparametric] n={fam.n} g={fam.g} m={list(fam.multiplicities)}: "
        f"max|R| = {max_abs_r:.3e} over {len(rows)} members"
    )
    return report


def corollary_cases(n_max: int) -> List[Tuple[int, int]]:
    """(n, g) with n > 3 where an isoparametric hypersurface has n simple curvatures."""
    return [(g, g) for g in ALLOWED_G if 3 < g <= n_max]


def recover_multiplicities(
    fam: IsoparametricFamily,
    theta: float,
    tolerances: Optional[Tolerances] = None,
) -> MultiplicityProfile:
    """Solve the multiplicity system from a member's own power sums p_1..p_g."""
    profile = principal_curvatures(fam, theta, tolerances)
    sums = profile.power_sums(fam.g)
    return solve_multiplicities(fam.g, profile.values, sums.p, tolerances)
