"""Exception hierarchy shared by all flagquant modules."""


class FlagQuantError(Exception):
    """Base class for library errors."""


class ConfigurationError(FlagQuantError):
    """Unsupported type label, missing suite field, failed precondition on a setup."""


class UsageError(FlagQuantError, ValueError):
    """Invalid argument to an operation (non-dominant weight, mixed root data, ...)."""


class ResourceError(FlagQuantError):
    """A configured cap (dimension, degree) would be exceeded."""


class InvariantViolation(FlagQuantError, AssertionError):
    """Internal consistency check failed; indicates a bug, not bad input."""


class NotInAlgebra(FlagQuantError):
    """A function is not (numerically) in the symbol algebra at level ``n``."""

    def __init__(self, n, residual, threshold):
        self.n = n
        self.residual = residual
        self.threshold = threshold
        super().__init__(
            f"function not in symbol algebra at level n={n}: "
            f"residual {residual:.3e} > {threshold:.1e}"
        )
