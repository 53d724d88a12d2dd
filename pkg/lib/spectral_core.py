"""
Spectral Core

Scalar kinds, spectra, power sums, Newton's identities and the
multiplicity system

    m_1 λ_1^k + ... + m_g λ_g^k = c_k      (k = 1..g)

Two scalar kinds share one interface: exact rationals (fractions.Fraction)
for everything that certifies an inequality, float64 for the trigonometric
hypersurface models. Every value object is frozen after construction.
"""

import math
import re
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Any, Dict, Iterable, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np
import sympy as sp
from loguru import logger

from lib import polynomials
from lib.errors import (
    DegenerateSpectrum,
    InvalidRange,
    NonIntegralSolution,
    ParseError,
    SingularSystem,
    UnsupportedKind,
)
from lib.settings import Tolerances, get_tolerances

Scalar = Union[Fraction, float]


class ScalarKind(Enum):
    """Arithmetic a value lives in."""
    EXACT = "exact-rational"
    FLOAT = "float64"


# =============================================================================
# SCALARS
# =============================================================================

_RATIONAL_RE = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")


def parse_rational(text: str) -> Fraction:
    """Parse "p/q" or an integer into a reduced Fraction."""
    match = _RATIONAL_RE.match(text)
    if not match:
        raise ParseError(f"'{text}' is not an integer or a p/q rational")
    numerator = int(match.group(1))
    denominator = int(match.group(2)) if match.group(2) else 1
    if denominator == 0:
        raise ParseError(f"'{text}' has a zero denominator")
    return Fraction(numerator, denominator)


def parse_rational_list(text: str) -> List[Fraction]:
    """Parse a comma-separated list such as "0,1/2,-3"."""
    if not text or not text.strip():
        raise ParseError("empty value list")
    return [parse_rational(item) for item in text.split(",")]


def kind_of(value: Any) -> ScalarKind:
    if isinstance(value, bool):
        raise UnsupportedKind(f"booleans are not scalars: {value!r}")
    if isinstance(value, (Fraction, int)):
        return ScalarKind.EXACT
    if isinstance(value, (float, np.floating)):
        return ScalarKind.FLOAT
    raise UnsupportedKind(f"unsupported scalar type {type(value).__name__}")


def common_kind(values: Iterable[Any]) -> ScalarKind:
    """EXACT only if every value is exact."""
    kinds = {kind_of(v) for v in values}
    return ScalarKind.FLOAT if ScalarKind.FLOAT in kinds else ScalarKind.EXACT


def coerce(value: Any, kind: ScalarKind) -> Scalar:
    """Convert a value into the given kind, refusing lossy or invalid moves."""
    if kind is ScalarKind.EXACT:
        if kind_of(value) is not ScalarKind.EXACT:
            raise UnsupportedKind(f"float {value!r} cannot enter the exact kind")
        return Fraction(value)
    result = float(value)
    if not math.isfinite(result):
        raise ParseError(f"float scalars must be finite, got {result!r}")
    return result


def zero(kind: ScalarKind) -> Scalar:
    return Fraction(0) if kind is ScalarKind.EXACT else 0.0


def one(kind: ScalarKind) -> Scalar:
    return Fraction(1) if kind is ScalarKind.EXACT else 1.0


def format_scalar(value: Scalar) -> str:
    if isinstance(value, Fraction):
        return str(value)
    return format(value, ".17g")


def format_values(values: Iterable[Scalar]) -> str:
    return "(" + ", ".join(format_scalar(v) for v in values) + ")"


def min_gap(values: Sequence[Scalar]) -> Scalar:
    ordered = sorted(values)
    return min(b - a for a, b in zip(ordered, ordered[1:]))


def _check_distinct(values: Tuple[Scalar, ...], kind: ScalarKind, tolerance: float, what: str):
    if kind is ScalarKind.EXACT:
        if len(set(values)) != len(values):
            raise DegenerateSpectrum(f"{what} has a repeated value: {format_values(values)}")
    elif len(values) > 1:
        gap = min_gap(values)
        if gap <= tolerance:
            raise DegenerateSpectrum(
                f"{what} values closer than {tolerance:g} (min gap {gap:.3e}): {format_values(values)}"
            )


# =============================================================================
# DATA STRUCTURES
# =============================================================================

@dataclass(frozen=True)
class Spectrum:
    """n pairwise-distinct eigenvalues λ_1..λ_n of a single kind (n >= 2)."""
    values: Tuple[Scalar, ...]
    kind: ScalarKind
    distinctness_tolerance: Optional[float] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        values = tuple(coerce(v, self.kind) for v in self.values)
        object.__setattr__(self, "values", values)
        if len(values) < 2:
            raise DegenerateSpectrum(f"a spectrum needs at least 2 values, got {len(values)}")
        tolerance = self.distinctness_tolerance
        if tolerance is None:
            tolerance = get_tolerances().distinctness
        _check_distinct(values, self.kind, tolerance, "spectrum")

    @classmethod
    def exact(cls, values: Iterable[Any]) -> "Spectrum":
        return cls(tuple(values), ScalarKind.EXACT)

    @classmethod
    def floats(cls, values: Iterable[Any], distinctness: Optional[float] = None) -> "Spectrum":
        return cls(tuple(values), ScalarKind.FLOAT, distinctness)

    @property
    def n(self) -> int:
        return len(self.values)

    def __len__(self) -> int:
        return len(self.values)

    def __iter__(self) -> Iterator[Scalar]:
        return iter(self.values)

    def shifted(self, t: Scalar) -> "Spectrum":
        t = coerce(t, self.kind)
        return Spectrum(tuple(v + t for v in self.values), self.kind, self.distinctness_tolerance)

    def scaled(self, t: Scalar) -> "Spectrum":
        t = coerce(t, self.kind)
        return Spectrum(tuple(v * t for v in self.values), self.kind, self.distinctness_tolerance)

    def permuted(self, order: Sequence[int]) -> "Spectrum":
        """Reorder by 0-based positions: new[i] = old[order[i]]."""
        if sorted(order) != list(range(self.n)):
            raise InvalidRange(f"{list(order)} is not a permutation of 0..{self.n - 1}")
        return Spectrum(tuple(self.values[i] for i in order), self.kind, self.distinctness_tolerance)

    def to_float(self) -> "Spectrum":
        return Spectrum(tuple(float(v) for v in self.values), ScalarKind.FLOAT, self.distinctness_tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "n": self.n, "values": list(self.values)}


@dataclass(frozen=True)
class PowerSums:
    """p[k] = Σ_i λ_i^k for k = 1..m, stored 0-based in `p`."""
    p: Tuple[Scalar, ...]
    kind: ScalarKind

    def __post_init__(self):
        if len(self.p) < 1:
            raise InvalidRange("power sums need m >= 1")

    @property
    def m(self) -> int:
        return len(self.p)

    def p_k(self, k: int) -> Scalar:
        """1-based access: p_k(1) is the first power sum."""
        if not 1 <= k <= self.m:
            raise InvalidRange(f"power sum index {k} outside 1..{self.m}")
        return self.p[k - 1]


@dataclass(frozen=True)
class MultiplicityProfile:
    """g distinct values with positive integer multiplicities summing to n."""
    values: Tuple[Scalar, ...]
    multiplicities: Tuple[int, ...]
    kind: ScalarKind
    distinctness_tolerance: Optional[float] = field(default=None, compare=False, repr=False)

    def __post_init__(self):
        values = tuple(coerce(v, self.kind) for v in self.values)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "multiplicities", tuple(self.multiplicities))
        if not values:
            raise InvalidRange("a multiplicity profile needs g >= 1 values")
        if len(self.multiplicities) != len(values):
            raise InvalidRange(
                f"{len(values)} values but {len(self.multiplicities)} multiplicities"
            )
        for m in self.multiplicities:
            if isinstance(m, bool) or not isinstance(m, (int, np.integer)) or m < 1:
                raise InvalidRange(f"multiplicities must be positive integers, got {m!r}")
        tolerance = self.distinctness_tolerance
        if tolerance is None:
            tolerance = get_tolerances().distinctness
        _check_distinct(values, self.kind, tolerance, "profile")

    @property
    def g(self) -> int:
        return len(self.values)

    @property
    def n(self) -> int:
        return int(sum(self.multiplicities))

    @property
    def is_simple(self) -> bool:
        return all(m == 1 for m in self.multiplicities)

    def expanded(self) -> Tuple[Scalar, ...]:
        """Each value repeated by its multiplicity, in profile order."""
        return tuple(v for v, m in zip(self.values, self.multiplicities) for _ in range(m))

    def power_sums(self, m: int) -> PowerSums:
        if m < 1:
            raise InvalidRange(f"power sums need m >= 1, got {m}")
        sums = []
        for k in range(1, m + 1):
            terms = [mult * v ** k for v, mult in zip(self.values, self.multiplicities)]
            sums.append(_sum(terms, self.kind))
        return PowerSums(tuple(sums), self.kind)

    def spectrum(self) -> Spectrum:
        """The expanded values as a Spectrum; only simple profiles qualify."""
        if not self.is_simple:
            raise DegenerateSpectrum(
                f"multiplicities {list(self.multiplicities)} repeat eigenvalues"
            )
        return Spectrum(self.values, self.kind, self.distinctness_tolerance)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "kind": self.kind.value,
            "g": self.g,
            "n": self.n,
            "values": list(self.values),
            "multiplicities": [int(m) for m in self.multiplicities],
        }


def _sum(terms: Sequence[Scalar], kind: ScalarKind) -> Scalar:
    if kind is ScalarKind.EXACT:
        return sum(terms, Fraction(0))
    return math.fsum(terms)


# =============================================================================
# POWER SUMS AND NEWTON'S IDENTITIES
# =============================================================================

def power_sums(s: Spectrum, m: int) -> PowerSums:
    """p_k = Σ_i λ_i^k for k = 1..m."""
    if m < 1:
        raise InvalidRange(f"power sums need m >= 1, got {m}")
    return PowerSums(tuple(_sum([v ** k for v in s.values], s.kind) for k in range(1, m + 1)), s.kind)


def newton_power_to_elementary(p: PowerSums, n: int) -> List[Scalar]:
    """Elementary symmetric e_1..e_n from power sums p_1..p_n.

    k e_k = Σ_{i=1..k} (-1)^(i-1) e_{k-i} p_i, with e_0 = 1.
    """
    if n < 1 or p.m < n:
        raise InvalidRange(f"need at least n = {n} power sums, have {p.m}")
    e: List[Scalar] = [one(p.kind)]
    for k in range(1, n + 1):
        acc = zero(p.kind)
        for i in range(1, k + 1):
            term = e[k - i] * p.p_k(i)
            acc = acc + term if i % 2 == 1 else acc - term
        e.append(acc / k)
    return e[1:]


def characteristic_polynomial(e: Sequence[Scalar]) -> List[Scalar]:
    """Ascending coefficients of x^n - e_1 x^(n-1) + e_2 x^(n-2) - ... ."""
    n = len(e)
    unit = Fraction(1) if all(kind_of(v) is ScalarKind.EXACT for v in e) else 1.0
    coeffs: List[Scalar] = [0] * (n + 1)
    coeffs[n] = unit
    for k, e_k in enumerate(e, start=1):
        coeffs[n - k] = e_k if k % 2 == 0 else -e_k
    return coeffs


def roots_recovered(s: Spectrum, tolerances: Optional[Tolerances] = None) -> bool:
    """True when every λ_i is a root of the polynomial rebuilt from its power sums."""
    tol = get_tolerances(tolerances)
    e = newton_power_to_elementary(power_sums(s, s.n), s.n)
    poly = characteristic_polynomial(e)
    for v in s.values:
        value = polynomials.evaluate(poly, v)
        if s.kind is ScalarKind.EXACT:
            if value != 0:
                return False
        else:
            scale = max(1.0, abs(v)) ** s.n
            if abs(value) > tol.residual * scale:
                return False
    return True


# =============================================================================
# EXACT LINEAR ALGEBRA
# =============================================================================

def _to_sympy_matrix(rows: Sequence[Sequence[Any]]) -> sp.Matrix:
    return sp.Matrix([[sp.Rational(Fraction(x).numerator, Fraction(x).denominator) for x in row] for row in rows])


def _to_fraction(value: Any) -> Fraction:
    value = sp.Rational(value)
    return Fraction(int(value.p), int(value.q))


def exact_determinant(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    """Exact determinant of a square rational matrix (Bareiss, via sympy)."""
    return _to_fraction(_to_sympy_matrix(matrix).det(method="bareiss"))


def exact_solve(matrix: Sequence[Sequence[Fraction]], rhs: Sequence[Fraction]) -> List[Fraction]:
    """Solve a square rational system exactly with sympy's LU solver."""
    a = _to_sympy_matrix(matrix)
    if a.det(method="bareiss") == 0:
        raise SingularSystem(f"{a.rows}x{a.cols} system is not invertible")
    b = _to_sympy_matrix([[v] for v in rhs])
    try:
        x = a.LUsolve(b)
    except ValueError as exc:
        raise SingularSystem(f"{a.rows}x{a.cols} system is not invertible: {exc}") from exc
    return [_to_fraction(v) for v in x]


# =============================================================================
# MULTIPLICITY SYSTEM
# =============================================================================

def solve_multiplicities(
    g: int,
    values: Sequence[Any],
    c: Sequence[Any],
    tolerances: Optional[Tolerances] = None,
) -> MultiplicityProfile:
    """Recover m_1..m_g from Σ_i m_i λ_i^k = c_k, k = 1..g.

    Exact kind solves exactly and requires a positive integer solution.
    Float kind rounds the real solution and accepts it only if it is
    positive and re-substitution matches every c_k within tolerance.
    """
    tol = get_tolerances(tolerances)
    if g < 1 or len(values) != g or len(c) != g:
        raise InvalidRange(f"need g = {g} values and g power sums, got {len(values)} and {len(c)}")
    kind = common_kind(list(values) + list(c))
    lam = tuple(coerce(v, kind) for v in values)
    rhs = tuple(coerce(v, kind) for v in c)

    try:
        _check_distinct(lam, kind, tol.distinctness, "multiplicity system")
    except DegenerateSpectrum as exc:
        raise SingularSystem(str(exc)) from exc
    if any(abs(v) <= (0 if kind is ScalarKind.EXACT else tol.distinctness) for v in lam):
        raise SingularSystem(f"a zero value leaves its multiplicity undetermined: {format_values(lam)}")

    matrix = [[v ** k for v in lam] for k in range(1, g + 1)]

    if kind is ScalarKind.EXACT:
        solution = exact_solve(matrix, rhs)
        if any(x.denominator != 1 or x <= 0 for x in solution):
            raise NonIntegralSolution(
                f"solution {format_values(solution)} is not a positive integer vector"
            )
        multiplicities = tuple(int(x) for x in solution)
    else:
        a = np.array(matrix, dtype=float)
        b = np.array(rhs, dtype=float)
        try:
            raw = np.linalg.solve(a, b)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem(f"multiplicity system is singular: {exc}") from exc
        rounded = np.rint(raw).astype(int)
        if np.any(rounded <= 0):
            raise NonIntegralSolution(f"rounded solution {rounded.tolist()} is not positive (raw {raw.tolist()})")
        residual = np.abs(a @ rounded - b)
        limit = tol.multiplicity_residual * np.maximum(1.0, np.abs(b))
        if np.any(residual > limit):
            raise NonIntegralSolution(
                f"rounded solution {rounded.tolist()} misses the power sums by {residual.max():.3e}"
            )
        multiplicities = tuple(int(m) for m in rounded)

    logger.debug(f"[Multiplicity] g={g} values={format_values(lam)} -> m={list(multiplicities)}")
    return MultiplicityProfile(lam, multiplicities, kind, tol.distinctness)
