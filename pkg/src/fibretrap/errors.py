"""Exception and warning types shared across modules."""


class FibreTrapError(Exception):
    """Base class for all package errors."""


class ConfigError(FibreTrapError, ValueError):
    pass


class NumericalError(FibreTrapError):
    """Base class for failures of a numerical procedure (CLI exit code 3)."""


class NoGuidedMode(NumericalError):
    pass


class MultipleRoots(NumericalError):
    pass


class InsideFibre(FibreTrapError, ValueError):
    pass


class GridTooCoarse(NumericalError):
    pass


class CoverageError(NumericalError):
    pass


class CaseMismatch(FibreTrapError, ValueError):
    pass


class MissingDecomposition(FibreTrapError, ValueError):
    pass


class NoMinimum(NumericalError):
    def __init__(self, message, scan=None):
        super().__init__(message)
        # (R/a, U in mK) pairs of the failed radial scan, for diagnosis
        self.scan = scan


class NegativeCurvature(NumericalError):
    pass


class AboveBarrier(NumericalError):
    pass


class ResonanceProximity(UserWarning):
    """Evaluation frequency sits inside the guard band of a transition."""
