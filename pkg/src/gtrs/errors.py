"""Exception hierarchy.

Every failure the solver can report maps onto one of these classes; the CLI
turns them into its frozen exit codes.
"""


class GTRSError(Exception):
    """Base class for all solver errors."""


class InputError(GTRSError, ValueError):
    """Malformed data: bad dimensions, indices, or parameters."""


class DegenerateInputError(InputError):
    """Both quadratics are identically zero."""


class NumericalError(GTRSError, ArithmeticError):
    """A non-finite value appeared where a finite one is required."""


class ProbabilisticFailure(GTRSError):
    """A randomized subroutine produced an outcome its guarantee excludes.

    Raised only in situations that are impossible when every eigensolver call
    succeeds, so it signals an (improbable) eigensolver failure or a violated
    precondition.
    """


class BisectionFailed(ProbabilisticFailure):
    pass


class RoundingFailed(ProbabilisticFailure):
    pass


class CertificateError(ProbabilisticFailure):
    """The supplied regularity certificate is demonstrably wrong."""


class NotCertifiablyDefinite(ProbabilisticFailure):
    """No point with a positive definite pencil was found above 2**-60."""


class IndefiniteClassification(ProbabilisticFailure):
    """Probes could not decide the pencil regime."""

    def __init__(self, message, margins=None):
        super().__init__(message)
        self.margins = dict(margins or {})


class UnboundedBelow(GTRSError):
    """The set of convexifying multipliers is empty; the optimal value is -inf."""


class ConvexConstraintRegime(GTRSError):
    """The constraint looks convex (no negative eigenvalue certified).

    This regime is classified and reported but not solved.
    """


class OracleInconsistency(GTRSError):
    """Two independent reference computations disagree."""
