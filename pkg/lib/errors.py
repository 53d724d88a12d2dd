"""
Error types for rigidity-kit.

Every failure the library can signal is a RigidityError. The class carries
the exit code the CLI returns for it:

    0  success
    1  verification failure (a claimed inequality failed numerically)
    2  input error
    3  degenerate input
    4  internal identity violation
"""


class RigidityError(Exception):
    """Base class for all library errors."""
    exit_code = 1


# =============================================================================
# INPUT ERRORS (exit 2)
# =============================================================================

class InputError(RigidityError):
    exit_code = 2


class ParseError(InputError):
    """Malformed CLI value or out-of-range configuration."""


class IndexOutOfRange(InputError):
    """Distinguished index r outside 1..n."""


class InvalidRange(InputError):
    """Parameter outside its admissible interval (e.g. Clifford r)."""


class PoleProximity(InputError):
    """Tube angle too close to a pole of the cotangent."""


class NonIntegralSolution(InputError):
    """Power sums inconsistent with any multiplicity profile."""


class UnsupportedKind(InputError):
    """Operation requires a different scalar kind."""


# =============================================================================
# DEGENERATE INPUT (exit 3)
# =============================================================================

class DegenerateSpectrum(RigidityError):
    """Repeated eigenvalues, or too few of them for the operation."""
    exit_code = 3


class SingularSystem(DegenerateSpectrum):
    """Multiplicity system has no unique solution."""


# =============================================================================
# INTERNAL (exit 4)
# =============================================================================

class IdentityViolation(RigidityError):
    """An algebraic identity failed. Always an implementation bug."""
    exit_code = 4


# =============================================================================
# VERIFICATION FAILURES (exit 1)
# =============================================================================

class VerificationFailure(RigidityError):
    exit_code = 1


class InequalityViolation(VerificationFailure):
    """L(r) < 0 failed."""


class BoundViolation(VerificationFailure):
    """A step of the exponential bound chain failed."""


class PositivityViolation(VerificationFailure):
    """The Stokes quantity came out positive."""


class ConvergenceFailure(VerificationFailure):
    """Root search hit its iteration cap."""


class IllConditioned(RuntimeWarning):
    """Float solve residual above tolerance. Emitted as a warning only."""
