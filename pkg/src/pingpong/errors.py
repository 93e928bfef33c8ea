"""Shared exception types raised across the library."""


class PingPongError(Exception):
    """Base class for all library errors."""


class FieldError(PingPongError):
    """Scalar fields of the operands do not match or are unsupported."""


class ShapeError(PingPongError):
    """Dimensions of the operands are incompatible."""


class DomainError(PingPongError):
    """Input is outside the mathematical domain of the operation."""


class ConfigError(PingPongError):
    """Invalid configuration value (unknown case tag, bad index, ...)."""


class DegenerateInput(PingPongError):
    """Zero vector / rank-deficient basis where a nondegenerate one is required."""


class GapTooSmall(PingPongError):
    """Top two singular values too close to define an attracting flag."""


class NearSingularConfig(PingPongError):
    """Flags too close to the repelling data for a contraction estimate."""


class NotProximal(PingPongError):
    """A construction required a (bi)proximal matrix and did not get one."""


class NotContracting(PingPongError):
    """Representation failed the singular-gap pre-screen."""


class SearchBudgetExceeded(PingPongError):
    """Finite-index completion search ran out of budget."""

    def __init__(self, message, attempted_index=None):
        super().__init__(message)
        self.attempted_index = attempted_index


class ProximalizationFailed(PingPongError):
    """No power p <= p_max made the stable letter biproximal."""


class NoValidEpsilon(PingPongError):
    """Epsilon grid exhausted while building an interactive pair."""


class NoValidParameters(PingPongError):
    """Parameter grid exhausted while building HNN ping-pong sets."""
