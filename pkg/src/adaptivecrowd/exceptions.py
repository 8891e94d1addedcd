"""Exception types raised by adaptivecrowd."""


class ConfigurationError(ValueError):
    """Invalid parameters or configuration file contents."""


class InvariantViolation(RuntimeError):
    """A model invariant broke during a run (share conservation, row sums, ...)."""

    def __init__(self, message, snapshot=None):
        super().__init__(message)
        self.snapshot = snapshot


class DegenerateTaskError(ValueError):
    """A scatter task has zero variance on one axis."""


class UndefinedMetricError(ValueError):
    """A metric is undefined for the given input (too few agents, zero baseline, ...)."""
