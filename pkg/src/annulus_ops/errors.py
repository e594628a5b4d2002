"""Exception hierarchy.

Every error raised on purpose by this package derives from
:class:`AnnulusError`, so callers (and the CLI) can tell them apart from
generic numpy failures. The class name doubles as the error code in CLI
reports.
"""


class AnnulusError(Exception):
    """Base class for all package errors."""


class InvalidMatrix(AnnulusError, ValueError):
    """Input is not a finite square 2-D array."""


class DimensionMismatch(AnnulusError, ValueError):
    """Operands live on spaces of different dimension."""


class NumericalFailure(AnnulusError, ArithmeticError):
    """A factorization failed or produced an inconsistent result."""


class StallError(NumericalFailure):
    """Subspace refinement did not reach a fixpoint within its cap."""


class SingularOperator(AnnulusError, ValueError):
    """The operator is not invertible to tolerance."""


class NotArUnitary(AnnulusError, ValueError):
    pass


class NotArIsometry(AnnulusError, ValueError):
    pass


class NotACandidate(AnnulusError, ValueError):
    """Operator fails the necessary conditions for the closed annulus to be a spectral set."""


class NotCnu(AnnulusError, ValueError):
    pass


class MixedType(AnnulusError, ValueError):
    """An annulus unitary has both a unitary and an r-times-unitary part."""


class NotCommuting(AnnulusError, ValueError):
    pass


class NotDoublyCommuting(AnnulusError, ValueError):
    pass


class ExplicitCapError(AnnulusError, ValueError):
    """Tuple too long for an explicit 2**n report."""


class EigenvalueOffBoundary(AnnulusError, ValueError):
    pass


class WindowTooSmall(AnnulusError, ValueError):
    pass


class InconsistentBlocks(AnnulusError, ValueError):
    pass


class BadMultiIndex(AnnulusError, ValueError):
    pass


class ParseError(AnnulusError, ValueError):
    """Malformed matrix file."""
