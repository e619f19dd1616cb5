"""Exception hierarchy.

Every library failure derives from ``PovmError`` so the CLI can map it to an
input-error exit code without catching unrelated bugs.
"""


class PovmError(ValueError):
    """Base class for all library errors."""


class NotHermitianError(PovmError):
    pass


class NotPSDError(PovmError):
    pass


class DimensionMismatchError(PovmError):
    pass


class OutcomeMismatchError(PovmError):
    pass


class NotNormalizedError(PovmError):
    pass


class NotPVMError(PovmError):
    pass


class NotDominatedError(PovmError):
    pass


class CoefficientSumError(PovmError):
    """C*-convex coefficients do not satisfy sum T_i^* T_i = I."""


class SingularOperatorError(PovmError):
    pass


class CommutationError(PovmError):
    pass


class VacuousProbeError(PovmError):
    pass


class WitnessSearchError(PovmError):
    pass


class PerturbationError(PovmError):
    pass


class CertificateError(PovmError):
    """A constructed certificate failed its own re-verification."""
