"""Exception types raised across the package."""


class DGBOError(Exception):
    """Base class for all errors raised by :mod:`dgbo_lab`."""


class InvariantError(DGBOError, ValueError):
    """A field violates reality, mean-zero or finiteness."""


class GridMismatchError(DGBOError, ValueError):
    """Two operands live on different grids, or sizes disagree."""


class ProfileError(DGBOError, ValueError):
    """A damping profile is empty, unnormalised or negative."""


class PrecisionError(DGBOError, ArithmeticError):
    """A truncation or quadrature did not reach its tolerance."""


class ConditioningError(DGBOError, ArithmeticError):
    """A linear system is too ill-conditioned to be trusted.

    Attributes
    ----------
    condition : float
        The estimated condition number.
    """

    def __init__(self, message, condition):
        super().__init__(message)
        self.condition = condition


class BlowUpError(DGBOError, ArithmeticError):
    """The time integrator produced non-finite or exploding values.

    Attributes
    ----------
    time : float
        Last time reached before the failure was detected.
    """

    def __init__(self, message, time):
        super().__init__(message)
        self.time = time


class ConfigError(DGBOError, ValueError):
    """A run configuration is malformed; ``key`` names the culprit."""

    def __init__(self, message, key=None):
        super().__init__(message)
        self.key = key
