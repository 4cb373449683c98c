"""Exception types raised by the solvers and diagnostics."""


class APCSFError(Exception):
    """Base class for all package errors."""


class DegenerateEdge(APCSFError):
    """An edge of the polygon collapsed below the degeneracy threshold.

    ``time`` is set when the failure happened during a time integration.
    """

    def __init__(self, message, index=None, length=None, time=None):
        super().__init__(message)
        self.index = index
        self.length = length
        self.time = time

    def __str__(self):
        msg = super().__str__()
        if self.time is not None:
            msg += f" (t={self.time:.6g})"
        return msg


class InvalidIndex(APCSFError, ValueError):
    pass


class InvalidN(APCSFError, ValueError):
    pass


class DomainError(APCSFError, ValueError):
    pass


class SingularSystem(APCSFError):
    """A pivot block (or capacitance matrix) failed the condition guard."""


class IncompatibleRefinement(APCSFError, ValueError):
    """Two trajectories are not a (h, tau) / (h/2, tau/4) pair."""


class ConfigError(APCSFError, ValueError):
    """Invalid run configuration; ``field`` names the offending option."""

    def __init__(self, field, message):
        super().__init__(f"{field}: {message}")
        self.field = field
