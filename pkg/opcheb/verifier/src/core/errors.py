"""
Error hierarchy for the verifier.

Every error derives from VerifierError and from the builtin it specializes,
so callers may catch either. Failures of an inequality are NOT errors: they
are reported as data (GapReport verdicts, AxiomReport failures).
"""


class VerifierError(Exception):
    """Base class for all verifier errors."""


class NonSquare(VerifierError, ValueError):
    pass


class NotNearlyHermitian(VerifierError, ValueError):
    """Asymmetry exceeds recon_tol; signals a caller bug."""


class ConvergenceFailure(VerifierError, RuntimeError):
    """Jacobi sweep cap exceeded."""


class DomainError(VerifierError, ValueError):
    """A scalar function is undefined at some eigenvalue."""


class SingularForNegativePower(DomainError):
    pass


class NotStrictlyPositive(DomainError):
    pass


class NonpositiveArgument(DomainError):
    pass


class DimensionMismatch(VerifierError, ValueError):
    pass


class LengthMismatch(VerifierError, ValueError):
    pass


class ShapeMismatch(VerifierError, ValueError):
    pass


class IndexOutOfRange(VerifierError, IndexError):
    pass


class MonotonicityViolation(VerifierError, ValueError):
    pass


class HypothesisViolation(VerifierError, ValueError):
    """Input fields fail the certificate a theorem assumes."""


class UnknownInequality(VerifierError, LookupError):
    pass


class UnknownGenerator(VerifierError, LookupError):
    pass


class ConfigError(VerifierError, ValueError):
    pass


class DigestError(VerifierError, ValueError):
    """A replay digest is malformed or fails its checksum."""
