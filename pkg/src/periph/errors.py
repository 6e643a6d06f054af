"""Exception types shared across the package.

The command line layer maps these onto process exit codes, so library code
should raise the most specific class that applies and put every number a
caller might act on (defects, caps, candidate indices) into the message.
"""


class PeriphError(Exception):
    """Base class for all package-specific errors."""


class ValidationError(PeriphError):
    """Channel construction or validation rejected the input."""


class ChannelFormatError(PeriphError):
    """A channel or matrix file does not conform to the JSON schema."""


class CapExceededError(PeriphError):
    """A requested dilation tower exceeds the ambient dimension cap."""

    def __init__(self, message: str, required: int | None = None,
                 allowed: int | None = None):
        super().__init__(message)
        self.required = required
        self.allowed = allowed


class ToleranceConflictError(PeriphError):
    """An eigenvalue product lies within tolerance of two spectral clusters."""


class PeripheralSpanError(PeriphError):
    """An input matrix is not in the span of the peripheral eigenspaces."""

    def __init__(self, message: str, defect: float | None = None):
        super().__init__(message)
        self.defect = defect


class DefectiveEigenvalueError(PeriphError):
    """A peripheral eigenvalue cluster is numerically defective."""


class EigensolverError(PeriphError):
    """The dense nonsymmetric eigensolver failed to converge."""


class AlmostPeriodError(PeriphError):
    """No simultaneous almost-period was found within the scan bound."""

    def __init__(self, message: str, best_n: int | None = None,
                 best_error: float | None = None):
        super().__init__(message)
        self.best_n = best_n
        self.best_error = best_error
