"""Exception types shared across the package."""


class NuSampleError(Exception):
    """Base class for all package-specific errors."""


class InputError(NuSampleError):
    """Malformed user input (files, CLI arguments)."""


class RootFindingError(NuSampleError):
    """Root extraction failed or returned an inconsistent conjugate structure."""


class NonMinimalError(NuSampleError):
    """The modal data violates the minimality condition (a highest-order
    block coefficient is numerically zero)."""


class DegenerateSamplingError(NuSampleError):
    """Sampling instants are not strictly increasing."""


class RankDeficientError(NuSampleError):
    """A linear solve hit a numerically rank-deficient matrix."""

    def __init__(self, message, sigma_min=None, condition_number=None):
        super().__init__(message)
        self.sigma_min = sigma_min
        self.condition_number = condition_number


class DesignError(NuSampleError):
    """A sampling-design method cannot be applied to the given system."""


class InadmissibleDesignError(DesignError):
    """No admissible candidate found during a design search.  The best
    sequence found anyway is attached as ``best``."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
