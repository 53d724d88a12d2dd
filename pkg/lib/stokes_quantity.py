"""
Stokes Quantity Module

The integrand left after Stokes' theorem is applied to the (n-1)-form of
the rigidity argument reduces, pointwise, to

    A = (n-3)! Σ_{p,q,r distinct} λ_pr λ_qr / ((λ_r-λ_p)(λ_r-λ_q))
      = (n-3)!/n² Σ_r L(r) f_r²

with λ_pr taken from the closed-form derivative solution driven by f_r.
Because every L(r) < 0, A <= 0 with equality exactly when f = 0; a
vanishing integral of A therefore forces df = 0 and constant eigenvalues.
"""

import math
from dataclasses import dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

from loguru import logger

from lib.brito_inequality import L_direct
from lib.errors import DegenerateSpectrum, InvalidRange, PositivityViolation
from lib.settings import Tolerances, get_tolerances
from lib.spectral_core import Scalar, ScalarKind, Spectrum, coerce, format_scalar, format_values, zero
from lib.vandermonde import derivatives_closed_form


@dataclass(frozen=True)
class GradientData:
    """Components f_1..f_n of df in the eigenframe."""
    f: Tuple[Scalar, ...]
    kind: ScalarKind

    @classmethod
    def for_spectrum(cls, s: Spectrum, f: Sequence[Any]) -> "GradientData":
        if len(f) != s.n:
            raise InvalidRange(f"gradient has {len(f)} components, spectrum has n = {s.n}")
        return cls(tuple(coerce(v, s.kind) for v in f), s.kind)

    @property
    def is_zero(self) -> bool:
        return all(v == 0 for v in self.f)

    def scaled(self, t: Any) -> "GradientData":
        t = coerce(t, self.kind)
        return GradientData(tuple(v * t for v in self.f), self.kind)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": self.kind.value, "f": list(self.f)}


@dataclass(frozen=True)
class RigidityVerdict:
    A: Scalar
    is_rigid: bool
    forced_f_zero: bool
    f_is_zero: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "A": self.A,
            "is_rigid": self.is_rigid,
            "forced_f_zero": self.forced_f_zero,
            "f_is_zero": self.f_is_zero,
        }


def _check(s: Spectrum, g: GradientData):
    if s.n < 3:
        raise DegenerateSpectrum(f"the Stokes quantity needs n >= 3, got n = {s.n}")
    if len(g.f) != s.n:
        raise InvalidRange(f"gradient has {len(g.f)} components, spectrum has n = {s.n}")
    if g.kind is not s.kind:
        g = GradientData.for_spectrum(s, g.f)
    return g


def A_via_L(s: Spectrum, g: GradientData) -> Scalar:
    """((n-3)!/n²) · Σ_r L(r) f_r²."""
    g = _check(s, g)
    n = s.n
    total = zero(s.kind)
    for r in range(1, n + 1):
        f_r = g.f[r - 1]
        if f_r == 0:
            continue
        total = total + L_direct(s, r) * f_r * f_r
    return total * math.factorial(n - 3) / (n * n)


def A_via_triple_sum(s: Spectrum, g: GradientData) -> Scalar:
    """(n-3)! · Σ over distinct (p, q, r) of λ_pr λ_qr / ((λ_r-λ_p)(λ_r-λ_q)).

    Column r of the derivative matrix is the closed-form solution driven by f_r.
    """
    g = _check(s, g)
    lam, n = s.values, s.n
    columns = [derivatives_closed_form(s, g.f[r]).lambda_derivs for r in range(n)]
    total = zero(s.kind)
    for r in range(n):
        col = columns[r]
        for p in range(n):
            if p == r:
                continue
            for q in range(n):
                if q == r or q == p:
                    continue
                total = total + col[p] * col[q] / ((lam[r] - lam[p]) * (lam[r] - lam[q]))
    return total * math.factorial(n - 3)


def rigidity_verdict(
    s: Spectrum,
    g: GradientData,
    tolerances: Optional[Tolerances] = None,
) -> RigidityVerdict:
    """A <= 0, and A = 0 exactly when f = 0."""
    tol = get_tolerances(tolerances)
    g = _check(s, g)
    a = A_via_L(s, g)

    if s.kind is ScalarKind.EXACT:
        positive = a > 0
    else:
        positive = a > tol.strictness_margin
    if positive:
        raise PositivityViolation(
            f"A = {format_scalar(a)} > 0 for λ={format_values(s.values)}, f={format_values(g.f)}"
        )

    is_rigid = a == 0
    if is_rigid != g.is_zero:
        if s.kind is ScalarKind.EXACT:
            raise PositivityViolation(
                f"A = {format_scalar(a)} but f {'is' if g.is_zero else 'is not'} zero"
            )
        logger.warning(f"[Stokes] A = {a!r} underflowed against f = {format_values(g.f)}")

    logger.debug(f"[Stokes] λ={format_values(s.values)} f={format_values(g.f)} A={format_scalar(a)}")
    return RigidityVerdict(A=a, is_rigid=is_rigid, forced_f_zero=is_rigid, f_is_zero=g.is_zero)
