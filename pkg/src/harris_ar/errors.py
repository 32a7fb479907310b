"""Exception hierarchy shared by every module of the toolkit."""


class HarrisARError(Exception):
    """Base class for all toolkit errors."""


class InvalidParameterError(HarrisARError, ValueError):
    pass


class DomainError(HarrisARError, ValueError):
    pass


class UnsupportedError(HarrisARError):
    pass


class NumericDegeneracyError(HarrisARError, ArithmeticError):
    pass


class BranchAmbiguityError(HarrisARError, ArithmeticError):
    """A k-th root or logarithm could not be tracked continuously."""

    def __init__(self, message, t=None):
        super().__init__(message)
        self.t = t


class InvalidPGFError(HarrisARError):
    """Series coefficients of a candidate PGF violate nonnegativity or mass."""

    def __init__(self, message, coefficients=None):
        super().__init__(message)
        self.coefficients = coefficients


class TruncationError(HarrisARError):
    pass


class BracketError(HarrisARError, ValueError):
    pass


class DescriptorError(HarrisARError, ValueError):
    """Parse or resolution failure for a law descriptor string."""

    def __init__(self, message, position=None):
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)
        self.position = position


class ConfigError(HarrisARError, ValueError):
    def __init__(self, key, message):
        super().__init__(f"config key {key!r}: {message}")
        self.key = key
