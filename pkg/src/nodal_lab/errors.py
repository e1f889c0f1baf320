"""Exception types shared across the package."""


class NodalLabError(Exception):
    """Base class for all package errors."""


class PreconditionError(NodalLabError, ValueError):
    """An operation was called outside its documented domain."""


class ChartError(NodalLabError):
    """A cube or ball does not fit inside its coordinate chart."""


class QuadratureError(NodalLabError):
    """A sampled value was not finite.

    The offending point is kept on ``point`` so callers can report it.
    """

    def __init__(self, message, point=None):
        super().__init__(message)
        self.point = point


class MassUnderflowError(NodalLabError):
    """Squared mass on a cube fell below the floor guard."""
