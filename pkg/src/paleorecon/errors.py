"""Exception taxonomy.

The command-line layer maps these to process exit codes: configuration
problems exit 2, data problems exit 3, numerical failures exit 4.
"""


class PaleoreconError(Exception):
    """Base class for all package-specific errors."""


class ConfigurationError(PaleoreconError):
    """Invalid configuration: unknown keys, malformed values, bad windows."""


class ParameterDomainError(ConfigurationError):
    """A model parameter lies outside its admissible domain."""


class DataError(PaleoreconError):
    """Input data cannot support the requested computation."""


class DegenerateInputError(DataError):
    """Input is degenerate (constant series, too short, all missing)."""


class InsufficientSampleError(DataError):
    """Too few draws or observations for a stable estimate."""


class CollinearityError(DataError):
    """Design matrix is numerically rank-deficient."""


class NumericalDegeneracyError(PaleoreconError):
    """A numerically singular or non-positive-definite system was met."""


class EstimationFailureError(NumericalDegeneracyError):
    """An estimator failed to converge or produced an unusable value."""
