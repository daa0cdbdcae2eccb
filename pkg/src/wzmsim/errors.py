"""Exception types raised across the package."""


class InvalidArgument(ValueError):
    """A constructor or operation received an argument outside its domain."""


class UndefinedCoherence(ArithmeticError):
    """g1 was requested from zero intensities (0/0)."""


class ConvergenceFailure(RuntimeError):
    """The Fock cutoff schedule hit its cap before the moments settled."""

    def __init__(self, message, history=(), moments=None, error=None):
        super().__init__(message)
        self.history = list(history)
        self.moments = moments
        self.error = error


class ConfigError(ValueError):
    """A scan configuration field is invalid."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
