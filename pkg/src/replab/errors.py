"""Exception types shared across the package."""


class InsufficientPrecision(ArithmeticError):
    """An irrational input is not known precisely enough for the request.

    ``required`` is the largest approximation error that would have been
    acceptable, when it can be stated.
    """

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class ResourceLimit(RuntimeError):
    """An integer grew past the configured size budget."""


class Anomaly(RuntimeError):
    """A guaranteed-to-succeed search failed. Always a bug."""


class DimensionMismatch(ValueError):
    pass


class HorizonExceeded(ValueError):
    """A table-backed sequence was asked for an index past its end."""


class HypothesisViolation(ValueError):
    """A sequence does not satisfy the recurrence a transform relies on."""
