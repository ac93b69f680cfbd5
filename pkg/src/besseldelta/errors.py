"""Exception types shared across the package."""


class BesselDeltaError(Exception):
    """Base class for all package errors."""


class DomainError(BesselDeltaError):
    """Argument outside the mathematical domain of the operation."""


class ParameterError(BesselDeltaError):
    """Precondition on the parameters is violated; the message names the inequality."""


class PrecisionLossError(BesselDeltaError):
    """Requested tolerance could not be reached; carries the achieved error estimate."""

    def __init__(self, message, achieved=None, value=None):
        super().__init__(message)
        self.achieved = achieved
        self.value = value


class ResourceError(BesselDeltaError):
    """A work budget (node count, table size, truncation length) was exceeded."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class HypothesisError(BesselDeltaError):
    """A grid spot-check found a derivative-test hypothesis violated."""

    def __init__(self, message, order=None, point=None):
        super().__init__(message)
        self.order = order
        self.point = point


class DegenerateInputError(BesselDeltaError):
    """Input is degenerate for the requested sum (principal character, empty amplifier)."""


class InsufficientDataError(BesselDeltaError):
    """Not enough usable samples to perform a fit."""
