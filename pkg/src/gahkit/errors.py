"""Exception types shared across the toolkit."""


class GahkitError(Exception):
    """Base class for all toolkit errors."""


class StepSizeUnderflow(GahkitError):
    """Adaptive step shrank below the resolvable size (stiffness or blow-up)."""


class NonFiniteState(GahkitError):
    """The vector field returned NaN or Inf during integration."""


class EmptyTrajectory(GahkitError):
    """A trajectory with fewer than two samples cannot be sectioned."""


class NoReturn(GahkitError):
    """No direction-matching crossing occurred within the time span."""

    def __init__(self, message, completed=None, failure_index=None):
        super().__init__(message)
        self.completed = completed if completed is not None else []
        self.failure_index = failure_index


class NoConvergence(GahkitError):
    """Newton iteration did not converge within the step budget."""


class SingularJacobian(GahkitError):
    """The finite-difference Jacobian of the return map is singular."""


class AmbiguousBranch(GahkitError):
    """No branch predicate of the piecewise field matched (implementation fault)."""


class OutOfDomain(GahkitError):
    """A point lies outside the map's trapping rectangle."""


class NoFixedPoint(GahkitError):
    """The straight-leg fixed point falls outside the trapping rectangle."""


class ConfigError(GahkitError):
    """A run configuration failed validation."""
