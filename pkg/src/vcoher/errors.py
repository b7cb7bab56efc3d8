"""Exception hierarchy shared by the solver, response and bistability layers."""


class VcoherError(Exception):
    """Base class for all library errors."""


class SingularMatrix(VcoherError):
    """Raised when elimination meets a pivot below the relative threshold."""

    def __init__(self, message, block=None):
        super().__init__(message)
        self.block = block


class TruncationNotConverged(VcoherError):
    """Harmonic truncation changed the k = 1 probe coherence by too much."""

    def __init__(self, message, relative_change):
        super().__init__(message)
        self.relative_change = relative_change


class ZeroDenominator(VcoherError):
    pass


class ModeMismatch(VcoherError):
    pass


class NoBracket(VcoherError):
    pass


class WindowTooShort(VcoherError):
    pass


class StepTooLarge(VcoherError):
    def __init__(self, message, max_change):
        super().__init__(message)
        self.max_change = max_change


class GridTooCoarse(VcoherError):
    def __init__(self, message, max_change):
        super().__init__(message)
        self.max_change = max_change


class ConfigError(VcoherError):
    pass
