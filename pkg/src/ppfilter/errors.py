"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets a named class;
generic ValueError/TypeError are reserved for plain argument mistakes.
"""


class PpfilterError(Exception):
    """Base class for package-specific failures."""


class NotPositiveDefiniteError(PpfilterError):
    """A matrix required to be symmetric positive definite is not."""


class SingularCombinationError(PpfilterError):
    """A weight-matrix sum that must be invertible could not be factorized."""


class UnstableDynamicsError(PpfilterError):
    """Drift matrix has an eigenvalue with non-negative real part."""


class InvalidStepError(PpfilterError):
    """A step size or horizon is non-positive or otherwise unusable."""


class StepTooLargeError(PpfilterError):
    """Covariance lost positive definiteness even after step-halving retries."""


class DegenerateEnsembleError(PpfilterError):
    """All particle weights underflowed; the ensemble carries no information."""


class ConfigError(PpfilterError):
    """A config file line or key could not be parsed; names the offender."""
