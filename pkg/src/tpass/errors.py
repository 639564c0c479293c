"""Exception types shared across the package."""


class TpassError(Exception):
    """Base class for all package-specific errors."""


class InvalidParamsError(TpassError, ValueError):
    """A system parameter violates its documented range.

    The message lists every offending field so a bad config file can be
    fixed in one pass.
    """


class ConfigError(TpassError, ValueError):
    """A config file could not be parsed (unknown key, bad value, bad unit)."""


class DegenerateGeometryError(TpassError, ValueError):
    """A propagation distance collapsed below the supported minimum."""


class InfeasibleError(TpassError, RuntimeError):
    """No operating point satisfies the QoS constraints.

    `constraint` names the binding constraint ("power-split", "time-budget",
    "wired-qos", "sic-order", "spacing", ...) so callers can aggregate
    infeasibility causes without string matching on the message.
    """

    def __init__(self, constraint: str, message: str | None = None):
        self.constraint = constraint
        super().__init__(message or f"infeasible: binding constraint '{constraint}'")
