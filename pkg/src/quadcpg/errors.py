"""Exception types shared across the gait engine."""


class GaitEngineError(Exception):
    """Base class for every error raised by this package."""


class InvalidInputError(GaitEngineError):
    """A numeric input was non-finite or outside its documented domain."""


class ConfigurationError(GaitEngineError):
    """Invalid configuration value or combination of values."""


class WorkspaceError(GaitEngineError):
    """Requested foot position lies outside the reachable annulus."""

    def __init__(self, message: str, radius: float | None = None):
        super().__init__(message)
        self.radius = radius


class SingularInputError(GaitEngineError):
    """Input sits on a kinematic singularity (e.g. foot at the hip pivot)."""


class FitError(GaitEngineError):
    """Trajectory fit could not be computed from the given samples."""


class CommandError(GaitEngineError):
    """Operator command rejected; runtime state is unchanged."""


class SessionError(GaitEngineError):
    """Session record could not be read, verified, or replayed."""
