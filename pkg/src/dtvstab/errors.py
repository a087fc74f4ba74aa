"""Exception hierarchy shared by the package."""


class StabilityError(Exception):
    """Base class for every error raised by dtvstab."""


class InvalidParameter(StabilityError, ValueError):
    pass


class DomainError(StabilityError, ValueError):
    """An index pair outside the admissible set n >= m, or mismatched shapes."""


class InvalidSequence(StabilityError, ValueError):
    """A sequence violating the f_0 = 0 convention or containing non-finite entries."""


class ConvergenceFailure(StabilityError, RuntimeError):
    def __init__(self, message, last_iterate=None, residual=None):
        super().__init__(message)
        self.last_iterate = last_iterate
        self.residual = residual


class NumericFailure(StabilityError, ArithmeticError):
    pass


class ResolventSingular(StabilityError, ArithmeticError):
    """z lies in (or numerically next to) the spectrum."""


class InsufficientBound(StabilityError):
    pass


class ResourceError(StabilityError, MemoryError):
    pass


class NotStableCertified(StabilityError):
    """No exponential bound with negative exponent could be certified."""


class NotExponentiallyBounded(StabilityError):
    """exponential_bound could not certify a finite constant for the requested omega.

    ``status`` is ``"unbounded"`` when the supremum is provably infinite and
    ``"inconclusive"`` when the available spectral bracket cannot decide.
    """

    def __init__(self, message, status, bracket):
        super().__init__(message)
        self.status = status
        self.bracket = bracket


class ConfigError(StabilityError, ValueError):
    def __init__(self, message, field=None, line=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if field is not None:
            where.append(f"field {field!r}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.field = field
        self.line = line


class TheoremViolation(StabilityError, AssertionError):
    """A proven inequality failed even at the favorable bracket corner (always a bug)."""
